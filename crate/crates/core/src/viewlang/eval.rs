use std::path::{Path, PathBuf};

use thiserror::Error;

use super::ast::{AxisRef, Command, CutOrientation, IndexSpec, Offset, ViewDerive};
use super::parser::parse_script;
use crate::field::ScalarField;
use crate::math::Vec3;
use crate::session::{AnimSpec, CutSpec, Derivation, Event, Layout, Provenance, Session, SessionError};

/// Nested `source` commands deeper than this fail.
pub const MAX_SOURCE_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown dataset: {0}")]
    UnknownDataset(String),
    #[error("unknown view: {0}")]
    UnknownView(u32),
    #[error("dataset {dataset} has no axis labelled {label} (axes: {axes})")]
    UnknownAxisLabel { dataset: String, label: String, axes: String },
    #[error("dataset {dataset} has {ndim} axes; there is no axis {axis}")]
    MissingAxis { dataset: String, axis: usize, ndim: usize },
    #[error("index {index} is outside 0..{extent} on axis {axis} of {dataset}")]
    IndexOutOfRange { dataset: String, axis: usize, index: usize, extent: usize },
    #[error("empty index range {lo}..{hi}")]
    EmptyRange { lo: usize, hi: usize },
    #[error("source nesting exceeds {MAX_SOURCE_DEPTH} levels at {path}")]
    SourceDepth { path: String },
    #[error("cannot read {path}: {message}")]
    SourceRead { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    SourceLine { path: String, line: usize, message: String },
    #[error(transparent)]
    Session(SessionError),
}

impl From<SessionError> for EvalError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::UnknownDataset(n) => EvalError::UnknownDataset(n),
            SessionError::UnknownView(id) => EvalError::UnknownView(id),
            other => EvalError::Session(other),
        }
    }
}

pub type EvalResult<T> = std::result::Result<T, EvalError>;

/// Where relative paths resolve: `load` against `data_dir`, `source` against
/// the directory of the running script (or `data_dir` outside a script).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvalContext {
    pub data_dir: PathBuf,
    pub script_dir: Option<PathBuf>,
    pub depth: usize,
}

impl EvalContext {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        EvalContext { data_dir: data_dir.into(), script_dir: None, depth: 0 }
    }

    pub fn with_script_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.script_dir = Some(dir.into());
        self
    }

    fn source_path(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            return p.to_path_buf();
        }
        self.script_dir.as_deref().unwrap_or(&self.data_dir).join(p)
    }
}

fn resolve_axis(field: &ScalarField<f64>, dataset: &str, axis: &AxisRef) -> EvalResult<usize> {
    match axis {
        AxisRef::Label(label) => field.axis_index(label).ok_or_else(|| EvalError::UnknownAxisLabel {
            dataset: dataset.to_string(),
            label: label.clone(),
            axes: field.axis_names().join(","),
        }),
        AxisRef::Index(i) if *i < field.ndim() => Ok(*i),
        AxisRef::Index(i) => Err(EvalError::MissingAxis { dataset: dataset.to_string(), axis: *i, ndim: field.ndim() }),
    }
}

fn check_index(field: &ScalarField<f64>, dataset: &str, axis: usize, index: usize) -> EvalResult<()> {
    let extent = field.dims()[axis];
    if index >= extent {
        return Err(EvalError::IndexOutOfRange { dataset: dataset.to_string(), axis, index, extent });
    }
    Ok(())
}

fn derivation(session: &Session, source: &str, derive: &Option<ViewDerive>) -> EvalResult<Derivation> {
    let Some(d) = derive else { return Ok(Derivation::None) };
    let field = session.dataset(source)?;
    Ok(match d {
        ViewDerive::Slice { axis, index } => {
            let axis = resolve_axis(field, source, axis)?;
            check_index(field, source, axis, *index)?;
            Derivation::Slice { axis, index: *index }
        }
        ViewDerive::Project { axis, reducer } => {
            Derivation::Project { axis: resolve_axis(field, source, axis)?, reducer: *reducer }
        }
    })
}

/// Applies `cmd` in place. Not atomic on its own; [`evaluate`] wraps it.
fn apply(s: &mut Session, cmd: &Command, ctx: &EvalContext) -> EvalResult<Vec<Event>> {
    let data_dir = ctx.data_dir.as_path();
    let events = match cmd {
        Command::Load { path, name } => {
            s.apply_provenance(Provenance::Load { path: path.clone(), name: name.clone() }, data_dir)?
        }
        Command::Synth { generator, dims, lumps, seed, name } => s.apply_provenance(
            Provenance::Synth {
                generator: *generator,
                dims: dims.clone(),
                lumps: *lumps,
                seed: seed.unwrap_or(0),
                name: name.clone(),
            },
            data_dir,
        )?,
        Command::Slice { source, axis, index, name } => {
            let field = s.dataset(source)?.clone();
            let axis = resolve_axis(&field, source, axis)?;
            let picks: Vec<(usize, String)> = match *index {
                IndexSpec::Single(i) => vec![(i, name.clone())],
                IndexSpec::Range(lo, hi) if lo <= hi => (lo..=hi).map(|i| (i, format!("{name}{i}"))).collect(),
                IndexSpec::Range(lo, hi) => return Err(EvalError::EmptyRange { lo, hi }),
            };
            let mut events = Vec::new();
            for (i, out) in picks {
                check_index(&field, source, axis, i)?;
                let step = Provenance::Slice { source: source.clone(), axis, index: i, name: out };
                events.extend(s.apply_provenance(step, data_dir)?);
            }
            events
        }
        Command::Project { source, axis, reducer, name } => {
            let axis = resolve_axis(s.dataset(source)?, source, axis)?;
            let step = Provenance::Project { source: source.clone(), axis, reducer: *reducer, name: name.clone() };
            s.apply_provenance(step, data_dir)?
        }
        Command::Filter { source, lo, hi } => s.filter_dataset(source, *lo, *hi)?,
        Command::ViewAdd { source, derive, cell } => {
            let d = derivation(s, source, derive)?;
            s.add_view(source, d, *cell)?.1
        }
        Command::ViewRemove { view } => s.remove_view(*view)?,
        Command::IsoAdd { view, level } => s.add_iso(*view, *level)?,
        Command::IsoRemove { view, level } => s.remove_iso(*view, *level)?,
        Command::CutAdd { view, orientation, offset } => {
            let offset = match offset {
                Offset::Center => None,
                Offset::Value(v) => Some(*v),
            };
            let spec = match orientation {
                CutOrientation::Axis(a) => {
                    let v = s.view(*view)?;
                    let axis = resolve_axis(&v.data, &v.source_name, a)?;
                    CutSpec::Axis { axis, offset }
                }
                CutOrientation::Normal(n) => CutSpec::Normal { normal: Vec3::from(*n), offset },
            };
            s.add_cut(*view, spec)?
        }
        Command::CutRemove { view, index } => s.remove_cut(*view, *index)?,
        Command::PaletteSet { target, palette } => s.set_palette(*target, *palette)?,
        Command::OpacitySet { target, points } => s.set_opacity(*target, points.clone())?,
        Command::RangeSet { view, lo, hi } => s.set_range(*view, *lo, *hi)?,
        Command::HistShow { view, bins } => {
            let bins = match bins {
                Some(b) => *b,
                None => s.view(*view)?.hist_bins,
            };
            s.show_histogram(*view, bins)?
        }
        Command::ColorbarShow { view } => s.show_colorbar(*view)?,
        Command::Mode(m) => s.set_mode(*m),
        Command::CameraSet { position, focal, up, fov } => {
            s.set_camera(position.map(Vec3::from), focal.map(Vec3::from), up.map(Vec3::from), *fov)?
        }
        Command::Anim { kind, axis, degrees, frames } => {
            s.animate(&AnimSpec { kind: *kind, axis: *axis, degrees: *degrees, frames: *frames })?.1
        }
        Command::Snapshot { path, size } => vec![Event::SnapshotRequested { path: path.clone(), size: *size }],
        Command::Source { path } => {
            let full = ctx.source_path(path);
            let shown = full.display().to_string();
            if ctx.depth >= MAX_SOURCE_DEPTH {
                return Err(EvalError::SourceDepth { path: shown });
            }
            let text = std::fs::read_to_string(&full)
                .map_err(|e| EvalError::SourceRead { path: shown.clone(), message: e.to_string() })?;
            let inner = EvalContext {
                data_dir: ctx.data_dir.clone(),
                script_dir: full.parent().map(Path::to_path_buf),
                depth: ctx.depth + 1,
            };
            let out = run_script_with(s, &text, &inner, true);
            if let Some(e) = out.errors.first() {
                return Err(EvalError::SourceLine { path: shown, line: e.line, message: e.message.clone() });
            }
            *s = out.session;
            out.events
        }
        Command::Layout { cols, cell_width, cell_height } => {
            s.set_layout(Layout { cols: *cols, cell_width: *cell_width, cell_height: *cell_height })?
        }
    };
    Ok(events)
}

/// Pure transition: the updated session and the events describing the
/// change. On error the input session is untouched.
pub fn evaluate(session: &Session, cmd: &Command, ctx: &EvalContext) -> EvalResult<(Session, Vec<Event>)> {
    let mut next = session.clone();
    let events = apply(&mut next, cmd, ctx)?;
    Ok((next, events))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineErrorKind {
    Parse,
    Eval,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct LineError {
    pub line: usize,
    pub kind: LineErrorKind,
    pub message: String,
}

/// Result of running a script: the final session, all events in order, and
/// the lines that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptOutcome {
    pub session: Session,
    pub events: Vec<Event>,
    pub errors: Vec<LineError>,
}

fn run_script_with(session: &Session, text: &str, ctx: &EvalContext, strict: bool) -> ScriptOutcome {
    let mut out = ScriptOutcome { session: session.clone(), events: Vec::new(), errors: Vec::new() };
    for line in parse_script(text) {
        let err = match line.result {
            Ok(None) => continue,
            Ok(Some(cmd)) => match evaluate(&out.session, &cmd, ctx) {
                Ok((s, events)) => {
                    out.session = s;
                    out.events.extend(events);
                    continue;
                }
                Err(e) => LineError { line: line.line, kind: LineErrorKind::Eval, message: e.to_string() },
            },
            Err(e) => LineError { line: line.line, kind: LineErrorKind::Parse, message: e.to_string() },
        };
        out.errors.push(err);
        if strict {
            break;
        }
    }
    out
}

/// Runs every line in order; failing lines are reported and skipped.
pub fn run_script(session: &Session, text: &str, ctx: &EvalContext) -> ScriptOutcome {
    run_script_with(session, text, ctx, false)
}

/// Like [`run_script`] but stops at the first failing line.
pub fn run_script_strict(session: &Session, text: &str, ctx: &EvalContext) -> ScriptOutcome {
    run_script_with(session, text, ctx, true)
}
