use std::fmt::{self, Display, Formatter};

use crate::field::Reducer;
use crate::render::Palette;
use crate::session::{AnimKind, Generator, Mode, ViewTarget};

/// Axis given by label (resolved against the dataset's axis names) or by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxisRef {
    Label(String),
    Index(usize),
}

/// One index, or an inclusive range `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSpec {
    Single(usize),
    Range(usize, usize),
}

/// Optional reduction applied to a view's source before display.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViewDerive {
    Slice { axis: AxisRef, index: usize },
    Project { axis: AxisRef, reducer: Reducer },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutOrientation {
    Axis(AxisRef),
    Normal([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Offset {
    Center,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Load { path: String, name: String },
    Synth { generator: Generator, dims: Vec<usize>, lumps: Option<usize>, seed: Option<u64>, name: String },
    Slice { source: String, axis: AxisRef, index: IndexSpec, name: String },
    Project { source: String, axis: AxisRef, reducer: Reducer, name: String },
    Filter { source: String, lo: Option<f64>, hi: Option<f64> },
    ViewAdd { source: String, derive: Option<ViewDerive>, cell: Option<(usize, usize)> },
    ViewRemove { view: u32 },
    IsoAdd { view: u32, level: f64 },
    IsoRemove { view: u32, level: Option<f64> },
    CutAdd { view: u32, orientation: CutOrientation, offset: Offset },
    CutRemove { view: u32, index: Option<usize> },
    PaletteSet { target: ViewTarget, palette: Palette },
    OpacitySet { target: ViewTarget, points: Vec<(f64, f64)> },
    RangeSet { view: u32, lo: f64, hi: f64 },
    HistShow { view: u32, bins: Option<usize> },
    ColorbarShow { view: u32 },
    Mode(Mode),
    CameraSet { position: Option<[f64; 3]>, focal: Option<[f64; 3]>, up: Option<[f64; 3]>, fov: Option<f64> },
    Anim { kind: AnimKind, axis: usize, degrees: f64, frames: usize },
    Snapshot { path: String, size: Option<(usize, usize)> },
    Source { path: String },
    Layout { cols: usize, cell_width: f64, cell_height: f64 },
}

impl Command {
    /// The verb phrase that starts this command's canonical text.
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Load { .. } => "load",
            Command::Synth { .. } => "synth",
            Command::Slice { .. } => "slice",
            Command::Project { .. } => "project",
            Command::Filter { .. } => "filter",
            Command::ViewAdd { .. } => "view add",
            Command::ViewRemove { .. } => "view remove",
            Command::IsoAdd { .. } => "iso add",
            Command::IsoRemove { .. } => "iso remove",
            Command::CutAdd { .. } => "cut add",
            Command::CutRemove { .. } => "cut remove",
            Command::PaletteSet { .. } => "palette set",
            Command::OpacitySet { .. } => "opacity set",
            Command::RangeSet { .. } => "range set",
            Command::HistShow { .. } => "hist show",
            Command::ColorbarShow { .. } => "colorbar show",
            Command::Mode(_) => "mode",
            Command::CameraSet { .. } => "camera set",
            Command::Anim { .. } => "anim",
            Command::Snapshot { .. } => "snapshot",
            Command::Source { .. } => "source",
            Command::Layout { .. } => "layout",
        }
    }
}

/// Every verb phrase of the language, in the order the grammar lists them.
pub const VERBS: [&str; 22] = [
    "load",
    "synth",
    "slice",
    "project",
    "filter",
    "view add",
    "view remove",
    "iso add",
    "iso remove",
    "cut add",
    "cut remove",
    "palette set",
    "opacity set",
    "range set",
    "hist show",
    "colorbar show",
    "mode",
    "camera set",
    "anim",
    "snapshot",
    "source",
    "layout",
];

pub(crate) const ANIM_AXES: [&str; 3] = ["x", "y", "z"];

struct Quoted<'a>(&'a str);

impl Display for Quoted<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.0.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\t' => f.write_str("\\t")?,
                '\r' => f.write_str("\\r")?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")
    }
}

struct Triple([f64; 3]);

impl Display for Triple {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

impl Display for AxisRef {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            AxisRef::Label(l) => f.write_str(l),
            AxisRef::Index(i) => write!(f, "{i}"),
        }
    }
}

impl Display for IndexSpec {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            IndexSpec::Single(i) => write!(f, "{i}"),
            IndexSpec::Range(a, b) => write!(f, "{a}..{b}"),
        }
    }
}

fn target(t: &ViewTarget) -> String {
    match t {
        ViewTarget::One(id) => id.to_string(),
        ViewTarget::All => "all".into(),
    }
}

/// Canonical text; numbers print in shortest round-trip form.
impl Display for Command {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(self.verb())?;
        match self {
            Command::Load { path, name } => write!(f, " {} as {name}", Quoted(path)),
            Command::Synth { generator, dims, lumps, seed, name } => {
                let dims: Vec<String> = dims.iter().map(usize::to_string).collect();
                write!(f, " {} dims={}", generator.name(), dims.join("x"))?;
                if let Some(l) = lumps {
                    write!(f, " lumps={l}")?;
                }
                if let Some(s) = seed {
                    write!(f, " seed={s}")?;
                }
                write!(f, " as {name}")
            }
            Command::Slice { source, axis, index, name } => write!(f, " {source} axis={axis} index={index} as {name}"),
            Command::Project { source, axis, reducer, name } => {
                write!(f, " {source} axis={axis} reducer={reducer} as {name}")
            }
            Command::Filter { source, lo, hi } => {
                write!(f, " {source}")?;
                if let Some(lo) = lo {
                    write!(f, " min={lo}")?;
                }
                if let Some(hi) = hi {
                    write!(f, " max={hi}")?;
                }
                Ok(())
            }
            Command::ViewAdd { source, derive, cell } => {
                write!(f, " {source}")?;
                match derive {
                    Some(ViewDerive::Slice { axis, index }) => write!(f, " axis={axis} index={index}")?,
                    Some(ViewDerive::Project { axis, reducer }) => write!(f, " axis={axis} reducer={reducer}")?,
                    None => {}
                }
                if let Some((r, c)) = cell {
                    write!(f, " cell=({r},{c})")?;
                }
                Ok(())
            }
            Command::ViewRemove { view } | Command::ColorbarShow { view } => write!(f, " view={view}"),
            Command::IsoAdd { view, level } => write!(f, " view={view} level={level}"),
            Command::IsoRemove { view, level } => {
                write!(f, " view={view}")?;
                if let Some(l) = level {
                    write!(f, " level={l}")?;
                }
                Ok(())
            }
            Command::CutAdd { view, orientation, offset } => {
                write!(f, " view={view}")?;
                match orientation {
                    CutOrientation::Axis(a) => write!(f, " axis={a}")?,
                    CutOrientation::Normal(n) => write!(f, " normal={}", Triple(*n))?,
                }
                match offset {
                    Offset::Center => f.write_str(" offset=center"),
                    Offset::Value(v) => write!(f, " offset={v}"),
                }
            }
            Command::CutRemove { view, index } => {
                write!(f, " view={view}")?;
                if let Some(i) = index {
                    write!(f, " index={i}")?;
                }
                Ok(())
            }
            Command::PaletteSet { target: t, palette } => write!(f, " view={} name={palette}", target(t)),
            Command::OpacitySet { target: t, points } => {
                write!(f, " view={}", target(t))?;
                for (s, a) in points {
                    write!(f, " point=({s},{a})")?;
                }
                Ok(())
            }
            Command::RangeSet { view, lo, hi } => write!(f, " view={view} min={lo} max={hi}"),
            Command::HistShow { view, bins } => {
                write!(f, " view={view}")?;
                if let Some(b) = bins {
                    write!(f, " bins={b}")?;
                }
                Ok(())
            }
            Command::Mode(m) => write!(f, " {}", m.name()),
            Command::CameraSet { position, focal, up, fov } => {
                for (key, v) in [("position", position), ("focal", focal), ("up", up)] {
                    if let Some(v) = v {
                        write!(f, " {key}={}", Triple(*v))?;
                    }
                }
                if let Some(fov) = fov {
                    write!(f, " fov={fov}")?;
                }
                Ok(())
            }
            Command::Anim { kind, axis, degrees, frames } => {
                let kind = match kind {
                    AnimKind::Rotate => "rotate",
                    AnimKind::Orbit => "orbit",
                };
                write!(f, " {kind} axis={} degrees={degrees} frames={frames}", ANIM_AXES[*axis])
            }
            Command::Snapshot { path, size } => {
                write!(f, " {}", Quoted(path))?;
                if let Some((w, h)) = size {
                    write!(f, " size={w}x{h}")?;
                }
                Ok(())
            }
            Command::Source { path } => write!(f, " {}", Quoted(path)),
            Command::Layout { cols, cell_width, cell_height } => {
                write!(f, " cols={cols} width={cell_width} height={cell_height}")
            }
        }
    }
}
