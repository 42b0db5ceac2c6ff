//! JSON save/restore.
//!
//! A document stores the ordered dataset log, the layout, camera, mode and
//! every view's user-set state. Dataset contents are not embedded: loads are
//! recorded by path (relative paths resolve against the data directory) and
//! everything else is rebuilt by replaying the log.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    field_bounds, require_3d, Derivation, Event, Field, Generator, Layout, Mode, Provenance, Result, Session,
    SessionError, View,
};
use crate::geometry::CutPlane;
use crate::io;
use crate::math::{Quat, Vec3};
use crate::render::{Camera, TransferFunction};

pub const SESSION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewDocument {
    pub id: u32,
    pub cell: (usize, usize),
    pub source_name: String,
    pub derivation: Derivation,
    pub show_volume: bool,
    pub iso_levels: Vec<f64>,
    pub cut_planes: Vec<CutPlane<f64>>,
    pub tf: TransferFunction<f64>,
    pub show_colorbar: bool,
    pub show_histogram: bool,
    pub hist_bins: usize,
    pub object_rotation: Quat<f64>,
    pub object_translation: Vec3<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub version: u32,
    pub provenance: Vec<Provenance>,
    pub layout: Layout,
    pub camera: Camera<f64>,
    pub camera_set: bool,
    pub mode: Mode,
    pub next_view_id: u32,
    pub views: Vec<ViewDocument>,
}

fn io_error(e: io::IoError) -> SessionError {
    SessionError::Io(e.to_string())
}

impl Session {
    /// Executes one dataset step and records it in the log.
    pub fn apply_provenance(&mut self, step: Provenance, data_dir: &Path) -> Result<Vec<Event>> {
        let field: Field = match &step {
            Provenance::Load { path, .. } => {
                let p = Path::new(path);
                let full = if p.is_absolute() { p.to_path_buf() } else { data_dir.join(p) };
                io::load_field(&full).map_err(io_error)?
            }
            Provenance::Synth { generator, dims, lumps, seed, .. } => match generator {
                Generator::QcdLumps => io::synth_qcd_lumps(dims, lumps.unwrap_or(12), *seed).map_err(io_error)?,
                Generator::Meteorite => io::synth_meteorite_phantom(dims, *seed).map_err(io_error)?,
            },
            Provenance::Slice { source, axis, index, .. } => self.dataset(source)?.slice(*axis, *index)?,
            Provenance::Project { source, axis, reducer, .. } => self.dataset(source)?.project(*axis, *reducer)?,
            Provenance::Filter { name, lo, hi } => return self.filter_dataset(name, *lo, *hi),
        };
        let name = match &step {
            Provenance::Load { name, .. }
            | Provenance::Synth { name, .. }
            | Provenance::Slice { name, .. }
            | Provenance::Project { name, .. } => name.clone(),
            Provenance::Filter { .. } => unreachable!(),
        };
        self.insert_dataset(&name, field, step)
    }

    pub fn to_document(&self) -> SessionDocument {
        SessionDocument {
            version: SESSION_FORMAT_VERSION,
            provenance: self.provenance.clone(),
            layout: self.layout,
            camera: self.camera,
            camera_set: self.camera_set,
            mode: self.mode,
            next_view_id: self.next_view_id,
            views: self
                .views
                .iter()
                .map(|v| ViewDocument {
                    id: v.id,
                    cell: v.cell,
                    source_name: v.source_name.clone(),
                    derivation: v.derivation,
                    show_volume: v.show_volume,
                    iso_levels: v.iso_levels.clone(),
                    cut_planes: v.cut_planes.clone(),
                    tf: v.tf.clone(),
                    show_colorbar: v.show_colorbar,
                    show_histogram: v.show_histogram,
                    hist_bins: v.hist_bins,
                    object_rotation: v.object_rotation,
                    object_translation: v.object_translation,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("session documents serialize")
    }

    /// Rebuilds a session by replaying the dataset log, then restoring views.
    pub fn from_document(doc: &SessionDocument, data_dir: &Path) -> Result<Session> {
        if doc.version != SESSION_FORMAT_VERSION {
            return Err(SessionError::Argument(format!("unsupported session version {}", doc.version)));
        }
        let mut s = Session::new();
        for step in &doc.provenance {
            s.apply_provenance(step.clone(), data_dir)?;
        }
        s.layout = Layout::new(doc.layout.cols, doc.layout.cell_width, doc.layout.cell_height)?;
        doc.camera.validate()?;
        s.camera = doc.camera;
        s.camera_set = doc.camera_set;
        s.mode = doc.mode;
        let mut views: Vec<View> = Vec::with_capacity(doc.views.len());
        for d in &doc.views {
            if views.iter().any(|v| v.id == d.id) {
                return Err(SessionError::Argument(format!("duplicate view id {}", d.id)));
            }
            if views.iter().any(|v| v.cell == d.cell) {
                return Err(SessionError::CellOccupied(d.cell.0, d.cell.1));
            }
            if d.cell.1 >= s.layout.cols {
                return Err(SessionError::CellOutsideLayout { row: d.cell.0, col: d.cell.1, cols: s.layout.cols });
            }
            if d.id >= doc.next_view_id {
                return Err(SessionError::Argument(format!("view id {} not below next id", d.id)));
            }
            if (d.object_rotation.norm() - 1.0).abs() > 1e-9 {
                return Err(SessionError::Argument(format!("view {} rotation is not a unit quaternion", d.id)));
            }
            let data = d.derivation.apply(s.dataset(&d.source_name)?)?;
            require_3d(&d.source_name, &data)?;
            let tf = TransferFunction::new(d.tf.color_points.clone(), d.tf.opacity_points.clone(), &d.tf.palette_name)?;
            let base = s.layout.base_position(d.cell);
            views.push(View {
                id: d.id,
                cell: d.cell,
                source_name: d.source_name.clone(),
                derivation: d.derivation,
                object_origin: field_bounds(&data)?.center() + base,
                data: Arc::new(data),
                show_volume: d.show_volume,
                iso_levels: d.iso_levels.clone(),
                cut_planes: d.cut_planes.clone(),
                tf,
                show_colorbar: d.show_colorbar,
                show_histogram: d.show_histogram,
                hist_bins: d.hist_bins,
                base_position: base,
                object_rotation: d.object_rotation,
                object_translation: d.object_translation,
            });
        }
        views.sort_by_key(|v| v.id);
        s.views = views;
        s.next_view_id = doc.next_view_id;
        Ok(s)
    }

    pub fn from_json(text: &str, data_dir: &Path) -> Result<Session> {
        let doc: SessionDocument =
            serde_json::from_str(text).map_err(|e| SessionError::Argument(format!("session document: {e}")))?;
        Session::from_document(&doc, data_dir)
    }
}
