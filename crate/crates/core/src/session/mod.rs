//! Multiview state: datasets, views in a grid, the shared camera and the
//! interaction mode.
//!
//! Each view's data lives in its own cell-local frame. Placement into the
//! world is the rigid map
//! `p -> origin + translation + R (p + base - origin)` where `base` is the
//! cell offset in the xy plane and `origin` the rotation pivot (data box
//! center plus `base`). The shared camera is expressed in cell-local
//! coordinates; a view is drawn with the camera shifted by its `base`.

mod event;
mod interact;
mod persist;

pub use event::Event;
pub use interact::{AnimKind, AnimSpec, FrameState, PointerEvent, PointerKind};
pub use persist::{SessionDocument, ViewDocument, SESSION_FORMAT_VERSION};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldError, Reducer, ScalarField};
use crate::geometry::{field_bounds, marching_cubes, Aabb, CutPlane, GeometryError, PlaneFrame, TriangleMesh};
use crate::math::{Quat, Rigid, Vec3};
use crate::render::{Camera, Palette, RenderError, TransferFunction};

pub type Field = ScalarField<f64>;

/// Opacity per unit length at the top of a default transfer function.
pub const DEFAULT_MAX_OPACITY: f64 = 0.3;
pub const DEFAULT_HIST_BINS: usize = 64;
pub const DEFAULT_FOV: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("unknown dataset: {0}")]
    UnknownDataset(String),
    #[error("unknown view: {0}")]
    UnknownView(u32),
    #[error("cell ({0}, {1}) is occupied")]
    CellOccupied(usize, usize),
    #[error("cell ({row}, {col}) is outside a {cols}-column layout")]
    CellOutsideLayout { row: usize, col: usize, cols: usize },
    #[error("view data must be 3D, {name} is {ndim}D")]
    NotThreeD { name: String, ndim: usize },
    #[error("object mode needs a target view")]
    MissingTarget,
    #[error("invalid dataset name: {0:?}")]
    InvalidName(String),
    #[error("{0}")]
    Argument(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

pub type Result<T, E = SessionError> = std::result::Result<T, E>;

/// Whether `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Camera,
    Object,
    Sync,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Camera, Mode::Object, Mode::Sync];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Camera => "camera",
            Mode::Object => "object",
            Mode::Sync => "sync",
        }
    }

    /// Key binding: `c`, `o`, `s`.
    pub fn from_key(key: char) -> Option<Mode> {
        match key {
            'c' => Some(Mode::Camera),
            'o' => Some(Mode::Object),
            's' => Some(Mode::Sync),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode: {s}; expected camera|object|sync"))
    }
}

/// Grid geometry: cells are `cell_width x cell_height` world units, rows
/// grow downwards (negative y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub cols: usize,
    pub cell_width: f64,
    pub cell_height: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Self { cols: 4, cell_width: 20.0, cell_height: 20.0 }
    }
}

impl Layout {
    pub fn new(cols: usize, cell_width: f64, cell_height: f64) -> Result<Self> {
        if cols == 0 {
            return Err(SessionError::Argument("layout needs at least one column".into()));
        }
        if !(cell_width > 0.0 && cell_width.is_finite() && cell_height > 0.0 && cell_height.is_finite()) {
            return Err(SessionError::Argument(format!("cell size {cell_width}x{cell_height} must be positive")));
        }
        Ok(Self { cols, cell_width, cell_height })
    }

    pub fn base_position(&self, (row, col): (usize, usize)) -> Vec3<f64> {
        Vec3::new(col as f64 * self.cell_width, -(row as f64) * self.cell_height, 0.0)
    }

    /// Row-major cell of the `k`-th slot.
    pub fn cell_of(&self, k: usize) -> (usize, usize) {
        (k / self.cols, k % self.cols)
    }
}

/// How a view's 3D data derives from its source dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Derivation {
    #[default]
    None,
    Slice { axis: usize, index: usize },
    Project { axis: usize, reducer: Reducer },
}

impl Derivation {
    pub fn apply(&self, source: &Field) -> Result<Field> {
        Ok(match *self {
            Derivation::None => source.clone(),
            Derivation::Slice { axis, index } => source.slice(axis, index)?,
            Derivation::Project { axis, reducer } => source.project(axis, reducer)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    QcdLumps,
    Meteorite,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::QcdLumps => "qcd_lumps",
            Generator::Meteorite => "meteorite",
        }
    }
}

impl FromStr for Generator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "qcd_lumps" => Ok(Generator::QcdLumps),
            "meteorite" => Ok(Generator::Meteorite),
            _ => Err(format!("unknown generator: {s}; expected qcd_lumps|meteorite")),
        }
    }
}

/// One dataset-producing step; the ordered log rebuilds every dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Provenance {
    Load { path: String, name: String },
    Synth { generator: Generator, dims: Vec<usize>, lumps: Option<usize>, seed: u64, name: String },
    Slice { source: String, axis: usize, index: usize, name: String },
    Project { source: String, axis: usize, reducer: Reducer, name: String },
    Filter { name: String, lo: Option<f64>, hi: Option<f64> },
}

/// Cut plane request resolved against a view's data box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutSpec {
    Axis { axis: usize, offset: Option<f64> },
    Normal { normal: Vec3<f64>, offset: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewTarget {
    One(u32),
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct View {
    pub id: u32,
    pub cell: (usize, usize),
    pub source_name: String,
    pub derivation: Derivation,
    /// 3D data in cell-local coordinates.
    pub data: Arc<Field>,
    pub show_volume: bool,
    pub iso_levels: Vec<f64>,
    pub cut_planes: Vec<CutPlane<f64>>,
    pub tf: TransferFunction<f64>,
    pub show_colorbar: bool,
    pub show_histogram: bool,
    pub hist_bins: usize,
    pub base_position: Vec3<f64>,
    pub object_origin: Vec3<f64>,
    pub object_rotation: Quat<f64>,
    pub object_translation: Vec3<f64>,
}

impl View {
    /// Bounds of the data in cell-local coordinates.
    pub fn local_bounds(&self) -> Aabb<f64> {
        field_bounds(&self.data).expect("view data is 3D")
    }

    /// Cell-local to world map.
    pub fn placement(&self) -> Rigid<f64> {
        let r = self.object_rotation;
        let pivot = self.object_origin;
        Rigid {
            rotation: r,
            translation: pivot + self.object_translation + r.rotate(self.base_position - pivot),
        }
    }

    /// Shared camera moved into this view's cell.
    pub fn camera_for(&self, camera: &Camera<f64>) -> Camera<f64> {
        Camera {
            position: camera.position + self.base_position,
            focal_point: camera.focal_point + self.base_position,
            ..*camera
        }
    }

    pub fn iso_meshes(&self) -> Result<Vec<(f64, TriangleMesh<f64>)>> {
        self.iso_levels.iter().map(|&l| Ok((l, marching_cubes(&self.data, l)?))).collect()
    }
}

/// Geometry of one view placed in the world.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedView {
    pub view_id: u32,
    pub transform: Rigid<f64>,
    pub volume_corners: [Vec3<f64>; 8],
    pub iso_meshes: Vec<(f64, TriangleMesh<f64>)>,
    pub cut_frames: Vec<PlaneFrame<f64>>,
}

fn default_tf(data: &Field) -> Result<TransferFunction<f64>> {
    let (lo, hi) = data.valid_range().unwrap_or((0.0, 1.0));
    Ok(TransferFunction::from_palette(Palette::Rainbow, lo, hi, DEFAULT_MAX_OPACITY)?)
}

fn require_3d(name: &str, field: &Field) -> Result<()> {
    if field.ndim() != 3 {
        return Err(SessionError::NotThreeD { name: name.to_string(), ndim: field.ndim() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    datasets: BTreeMap<String, Arc<Field>>,
    provenance: Vec<Provenance>,
    views: Vec<View>,
    layout: Layout,
    camera: Camera<f64>,
    camera_set: bool,
    mode: Mode,
    next_view_id: u32,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Self {
            datasets: BTreeMap::new(),
            provenance: Vec::new(),
            views: Vec::new(),
            layout: Layout::default(),
            camera: Camera {
                position: Vec3::new(0.0, -40.0, 20.0),
                focal_point: Vec3::zero(),
                view_up: Vec3::new(0.0, 0.0, 1.0),
                vertical_fov_degrees: DEFAULT_FOV,
            },
            camera_set: false,
            mode: Mode::Camera,
            next_view_id: 0,
        }
    }

    pub fn datasets(&self) -> &BTreeMap<String, Arc<Field>> {
        &self.datasets
    }

    pub fn dataset(&self, name: &str) -> Result<&Arc<Field>> {
        self.datasets.get(name).ok_or_else(|| SessionError::UnknownDataset(name.to_string()))
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Views ordered by id.
    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn view(&self, id: u32) -> Result<&View> {
        self.views.iter().find(|v| v.id == id).ok_or(SessionError::UnknownView(id))
    }

    fn view_index(&self, id: u32) -> Result<usize> {
        self.views.iter().position(|v| v.id == id).ok_or(SessionError::UnknownView(id))
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn camera(&self) -> &Camera<f64> {
        &self.camera
    }

    /// Whether the camera was set explicitly rather than auto-framed.
    pub fn camera_is_set(&self) -> bool {
        self.camera_set
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn next_view_id(&self) -> u32 {
        self.next_view_id
    }

    /// Number of grid rows in use.
    pub fn rows(&self) -> usize {
        self.views.iter().map(|v| v.cell.0 + 1).max().unwrap_or(0)
    }

    /// Adds or replaces a dataset; views built on it are re-derived.
    pub fn insert_dataset(&mut self, name: &str, field: Field, provenance: Provenance) -> Result<Vec<Event>> {
        if !is_valid_name(name) {
            return Err(SessionError::InvalidName(name.to_string()));
        }
        let field = Arc::new(field);
        let refreshed = self.rederive(name, &field)?;
        let mut events = vec![Event::DatasetAdded { name: name.to_string(), dims: field.dims().to_vec() }];
        self.datasets.insert(name.to_string(), field);
        self.provenance.push(provenance);
        events.extend(self.apply_rederived(refreshed));
        Ok(events)
    }

    /// Range-filters a dataset in place (masking only).
    pub fn filter_dataset(&mut self, name: &str, lo: Option<f64>, hi: Option<f64>) -> Result<Vec<Event>> {
        let field = Arc::new(self.dataset(name)?.filter_range(lo, hi)?);
        let refreshed = self.rederive(name, &field)?;
        let mut events = vec![Event::DatasetFiltered {
            name: name.to_string(),
            lo,
            hi,
            valid_count: field.valid_count(),
        }];
        self.datasets.insert(name.to_string(), field);
        self.provenance.push(Provenance::Filter { name: name.to_string(), lo, hi });
        events.extend(self.apply_rederived(refreshed));
        Ok(events)
    }

    fn rederive(&self, name: &str, field: &Field) -> Result<Vec<(usize, Arc<Field>)>> {
        let mut out = Vec::new();
        for (i, v) in self.views.iter().enumerate().filter(|(_, v)| v.source_name == name) {
            let data = v.derivation.apply(field)?;
            require_3d(name, &data)?;
            if data.dims() != v.data.dims() || data.spacing() != v.data.spacing() || data.origin() != v.data.origin() {
                return Err(SessionError::Argument(format!(
                    "replacing {name} would change the lattice of view {}",
                    v.id
                )));
            }
            out.push((i, Arc::new(data)));
        }
        Ok(out)
    }

    fn apply_rederived(&mut self, refreshed: Vec<(usize, Arc<Field>)>) -> Vec<Event> {
        refreshed
            .into_iter()
            .map(|(i, data)| {
                self.views[i].data = data;
                Event::ViewDataChanged { view_id: self.views[i].id }
            })
            .collect()
    }

    fn first_free_cell(&self) -> (usize, usize) {
        (0..)
            .map(|k| self.layout.cell_of(k))
            .find(|c| self.views.iter().all(|v| v.cell != *c))
            .unwrap()
    }

    /// Adds a view of `source` in `cell`, or the first free cell in
    /// row-major order.
    pub fn add_view(
        &mut self,
        source: &str,
        derivation: Derivation,
        cell: Option<(usize, usize)>,
    ) -> Result<(u32, Vec<Event>)> {
        let data = derivation.apply(self.dataset(source)?)?;
        require_3d(source, &data)?;
        let cell = match cell {
            Some((row, col)) => {
                if col >= self.layout.cols {
                    return Err(SessionError::CellOutsideLayout { row, col, cols: self.layout.cols });
                }
                if self.views.iter().any(|v| v.cell == (row, col)) {
                    return Err(SessionError::CellOccupied(row, col));
                }
                (row, col)
            }
            None => self.first_free_cell(),
        };
        let bounds = field_bounds(&data)?;
        let tf = default_tf(&data)?;
        let base = self.layout.base_position(cell);
        let id = self.next_view_id;
        let view = View {
            id,
            cell,
            source_name: source.to_string(),
            derivation,
            data: Arc::new(data),
            show_volume: true,
            iso_levels: Vec::new(),
            cut_planes: Vec::new(),
            tf,
            show_colorbar: false,
            show_histogram: false,
            hist_bins: DEFAULT_HIST_BINS,
            base_position: base,
            object_origin: bounds.center() + base,
            object_rotation: Quat::identity(),
            object_translation: Vec3::zero(),
        };
        let mut events = vec![Event::ViewAdded { view_id: id, cell, source: source.to_string() }];
        if !self.camera_set && self.views.is_empty() {
            self.camera = framing_camera(&bounds);
            events.push(Event::CameraChanged { camera: self.camera });
        }
        self.views.push(view);
        self.next_view_id += 1;
        Ok((id, events))
    }

    /// Removes a view; other views keep their cells.
    pub fn remove_view(&mut self, id: u32) -> Result<Vec<Event>> {
        let i = self.view_index(id)?;
        self.views.remove(i);
        Ok(vec![Event::ViewRemoved { view_id: id }])
    }

    fn view_mut(&mut self, id: u32) -> Result<&mut View> {
        let i = self.view_index(id)?;
        Ok(&mut self.views[i])
    }

    fn targets(&self, target: ViewTarget) -> Result<Vec<usize>> {
        match target {
            ViewTarget::One(id) => Ok(vec![self.view_index(id)?]),
            ViewTarget::All => Ok((0..self.views.len()).collect()),
        }
    }

    pub fn add_iso(&mut self, id: u32, level: f64) -> Result<Vec<Event>> {
        if !level.is_finite() {
            return Err(SessionError::Argument(format!("isolevel {level} is not finite")));
        }
        let view = self.view_mut(id)?;
        if view.iso_levels.contains(&level) {
            return Err(SessionError::Argument(format!("view {id} already has isolevel {level}")));
        }
        view.iso_levels.push(level);
        Ok(vec![Event::IsoAdded { view_id: id, level }])
    }

    /// Removes one isolevel, or all of them when `level` is `None`.
    pub fn remove_iso(&mut self, id: u32, level: Option<f64>) -> Result<Vec<Event>> {
        let view = self.view_mut(id)?;
        let removed = match level {
            Some(l) => {
                let i = view
                    .iso_levels
                    .iter()
                    .position(|&x| x == l)
                    .ok_or_else(|| SessionError::Argument(format!("view {id} has no isolevel {l}")))?;
                vec![view.iso_levels.remove(i)]
            }
            None => std::mem::take(&mut view.iso_levels),
        };
        Ok(vec![Event::IsoRemoved { view_id: id, levels: removed }])
    }

    /// Adds a cut plane; a missing offset puts the plane through the data
    /// box center.
    pub fn add_cut(&mut self, id: u32, spec: CutSpec) -> Result<Vec<Event>> {
        let view = self.view(id)?;
        let bounds = view.local_bounds();
        let center = bounds.center();
        let plane = match spec {
            CutSpec::Axis { axis, offset } => CutPlane::axis(axis, offset.unwrap_or(center[axis.min(2)]))?,
            CutSpec::Normal { normal, offset } => {
                let n = normal
                    .try_normalize()
                    .ok_or_else(|| SessionError::Argument("cut normal must be nonzero".into()))?;
                CutPlane::oblique(n, offset.unwrap_or(n.dot(center)))?
            }
        };
        crate::geometry::extract_cut_plane(&view.data, &plane, 1.0)?;
        let view = self.view_mut(id)?;
        view.cut_planes.push(plane);
        Ok(vec![Event::CutAdded { view_id: id, plane_index: view.cut_planes.len() - 1, plane }])
    }

    /// Removes the plane at `index`, or every plane when `index` is `None`.
    pub fn remove_cut(&mut self, id: u32, index: Option<usize>) -> Result<Vec<Event>> {
        let view = self.view_mut(id)?;
        let planes = match index {
            Some(i) if i < view.cut_planes.len() => vec![view.cut_planes.remove(i)],
            Some(i) => return Err(SessionError::Argument(format!("view {id} has no cut plane {i}"))),
            None => std::mem::take(&mut view.cut_planes),
        };
        Ok(vec![Event::CutRemoved { view_id: id, planes }])
    }

    pub fn set_palette(&mut self, target: ViewTarget, palette: Palette) -> Result<Vec<Event>> {
        let idx = self.targets(target)?;
        let tfs = idx.iter().map(|&i| self.views[i].tf.with_palette(palette)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.replace_tfs(idx, tfs))
    }

    pub fn set_opacity(&mut self, target: ViewTarget, points: Vec<(f64, f64)>) -> Result<Vec<Event>> {
        let idx = self.targets(target)?;
        let tfs = idx
            .iter()
            .map(|&i| self.views[i].tf.with_opacity_points(points.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.replace_tfs(idx, tfs))
    }

    /// Restricts the visible scalar window of one view.
    pub fn set_range(&mut self, id: u32, lo: f64, hi: f64) -> Result<Vec<Event>> {
        let i = self.view_index(id)?;
        let tf = self.views[i].tf.windowed(lo, hi)?;
        Ok(self.replace_tfs(vec![i], vec![tf]))
    }

    fn replace_tfs(&mut self, idx: Vec<usize>, tfs: Vec<TransferFunction<f64>>) -> Vec<Event> {
        idx.into_iter()
            .zip(tfs)
            .map(|(i, tf)| {
                self.views[i].tf = tf;
                Event::TransferFunctionChanged { view_id: self.views[i].id }
            })
            .collect()
    }

    pub fn show_histogram(&mut self, id: u32, bins: usize) -> Result<Vec<Event>> {
        if bins == 0 {
            return Err(SessionError::Argument("histogram needs at least one bin".into()));
        }
        let hist = self.view(id)?.data.histogram(bins, None)?;
        let view = self.view_mut(id)?;
        view.show_histogram = true;
        view.hist_bins = bins;
        Ok(vec![Event::HistogramShown { view_id: id, edges: hist.edges, counts: hist.counts }])
    }

    pub fn show_colorbar(&mut self, id: u32) -> Result<Vec<Event>> {
        self.view_mut(id)?.show_colorbar = true;
        Ok(vec![Event::ColorbarShown { view_id: id }])
    }

    pub fn set_show_volume(&mut self, id: u32, show: bool) -> Result<()> {
        self.view_mut(id)?.show_volume = show;
        Ok(())
    }

    pub fn set_mode(&mut self, mode: Mode) -> Vec<Event> {
        self.mode = mode;
        vec![Event::ModeChanged { mode }]
    }

    /// Replaces the given camera parameters; the result must be a valid camera.
    pub fn set_camera(
        &mut self,
        position: Option<Vec3<f64>>,
        focal: Option<Vec3<f64>>,
        up: Option<Vec3<f64>>,
        fov: Option<f64>,
    ) -> Result<Vec<Event>> {
        let c = self.camera;
        let camera = Camera::new(
            position.unwrap_or(c.position),
            focal.unwrap_or(c.focal_point),
            up.map(Vec3::normalized).unwrap_or(c.view_up),
            fov.unwrap_or(c.vertical_fov_degrees),
        )?;
        self.camera = camera;
        self.camera_set = true;
        Ok(vec![Event::CameraChanged { camera }])
    }

    /// Changes the grid; every view keeps its cell, so the new column count
    /// must still hold all of them.
    pub fn set_layout(&mut self, layout: Layout) -> Result<Vec<Event>> {
        let layout = Layout::new(layout.cols, layout.cell_width, layout.cell_height)?;
        if let Some(v) = self.views.iter().find(|v| v.cell.1 >= layout.cols) {
            return Err(SessionError::CellOutsideLayout { row: v.cell.0, col: v.cell.1, cols: layout.cols });
        }
        self.layout = layout;
        for v in &mut self.views {
            let base = layout.base_position(v.cell);
            v.object_origin = v.object_origin - v.base_position + base;
            v.base_position = base;
        }
        Ok(vec![Event::LayoutChanged { layout }])
    }

    /// Every view's geometry placed in the world, ordered by view id.
    pub fn world_assembly(&self) -> Result<Vec<PlacedView>> {
        self.views
            .iter()
            .map(|v| {
                let t = v.placement();
                let bounds = v.local_bounds();
                let iso_meshes = v
                    .iso_meshes()?
                    .into_iter()
                    .map(|(l, m)| (l, m.map_vertices(|p| t.apply(p))))
                    .collect();
                let cut_frames = v
                    .cut_planes
                    .iter()
                    .map(|p| {
                        let f = crate::geometry::extract_cut_plane(&v.data, p, 1.0)?.frame;
                        Ok(PlaneFrame { origin: t.apply(f.origin), u: t.apply_vector(f.u), v: t.apply_vector(f.v) })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PlacedView {
                    view_id: v.id,
                    transform: t,
                    volume_corners: bounds.corners().map(|c| t.apply(c)),
                    iso_meshes,
                    cut_frames,
                })
            })
            .collect()
    }
}

/// Oblique camera looking at the box center with the whole box in view.
pub fn framing_camera(bounds: &Aabb<f64>) -> Camera<f64> {
    let center = bounds.center();
    let radius = (bounds.diagonal() / 2.0).max(1e-6);
    let dist = 1.1 * radius / (DEFAULT_FOV.to_radians() / 2.0).sin();
    let dir = Vec3::new(0.5, -1.0, 0.6).normalized();
    Camera {
        position: center + dir * dist,
        focal_point: center,
        view_up: Vec3::new(0.0, 0.0, 1.0),
        vertical_fov_degrees: DEFAULT_FOV,
    }
}
