use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use viz_core::io::{import_raw, save_field, write_image_png, write_image_ppm, AxisOrder, RawDtype, RawSpec};
use viz_core::scene::{render_snapshot, BACKGROUND};
use viz_core::session::{Event, Session};
use viz_core::viewlang::{evaluate, parse_script, EvalContext, LineError, LineErrorKind};

pub const EXIT_OK: u8 = 0;
pub const EXIT_SCRIPT_ERRORS: u8 = 1;
pub const EXIT_UNREADABLE: u8 = 2;
pub const EXIT_RENDER_FAILURE: u8 = 3;

/// Snapshot size when neither the command nor `--size` gives one.
pub const DEFAULT_SNAPSHOT_SIZE: (usize, usize) = (1920, 1200);

#[derive(Debug, Parser)]
#[command(name = "viz", version, about = "Multiview scalar-field visualization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run a command script and write its snapshots.
    Run(RunArgs),
    /// Serve one live session over WebSocket at /session.
    Serve(ServeArgs),
    /// Convert a headerless raw volume into an .ndvf file.
    Import(ImportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub script: PathBuf,
    /// Accepted for compatibility; rendering is always offscreen.
    #[arg(long)]
    pub headless: bool,
    /// Directory for relative snapshot paths.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Snapshot size for `snapshot` commands without `size=`.
    #[arg(long, value_parser = parse_size)]
    pub size: Option<(usize, usize)>,
    /// Stop at the first failing line and exit 1.
    #[arg(long)]
    pub strict: bool,
    /// Root for relative `load` paths; defaults to the script's directory.
    #[arg(long, env = "VIZ_DATA_DIR")]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, env = "VIZ_DATA_DIR", default_value = ".")]
    pub data: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ImportArgs {
    pub raw: PathBuf,
    /// Extents, fastest axis first unless `--order last-fastest`, e.g. 64x64x64.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Extents,
    /// f32, f64, u8, u16 or i16, little-endian.
    #[arg(long, value_parser = parse_dtype)]
    pub dtype: RawDtype,
    /// Per-axis spacing, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub spacing: Option<Vec<f64>>,
    /// first-fastest or last-fastest.
    #[arg(long, default_value = "first-fastest", value_parser = parse_order)]
    pub order: AxisOrder,
    /// Output file; defaults to the input with an .ndvf extension.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s}"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width in {s}"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height in {s}"))?;
    if w == 0 || h == 0 {
        return Err(format!("size {s} must be positive"));
    }
    Ok((w, h))
}

/// Grid extents given as `64x64x64` or `64,64,64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extents(pub Vec<usize>);

fn parse_dims(s: &str) -> Result<Extents, String> {
    s.split(['x', ','])
        .map(|p| p.parse::<usize>().map_err(|_| format!("bad extent {p:?} in {s}")))
        .collect::<Result<_, _>>()
        .map(Extents)
}

fn parse_dtype(s: &str) -> Result<RawDtype, String> {
    s.parse().map_err(|e: viz_core::io::IoError| e.to_string())
}

fn parse_order(s: &str) -> Result<AxisOrder, String> {
    s.parse().map_err(|e: viz_core::io::IoError| e.to_string())
}

/// What a script run did; `exit_code` is the process status.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub exit_code: u8,
    pub errors: Vec<LineError>,
    pub snapshots: Vec<PathBuf>,
    pub failure: Option<String>,
}

fn write_snapshot(session: &Session, path: &Path, size: (usize, usize)) -> Result<(), String> {
    let img = render_snapshot(session, size).map_err(|e| e.to_string())?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let written = if png { write_image_png(&img, path) } else { write_image_ppm(&img, path, BACKGROUND) };
    written.map_err(|e| e.to_string())
}

/// Runs a script on a fresh session, rendering each snapshot from the
/// session state right after its command.
pub fn run(args: &RunArgs) -> RunReport {
    let mut report = RunReport { exit_code: EXIT_OK, errors: Vec::new(), snapshots: Vec::new(), failure: None };
    let text = match fs::read_to_string(&args.script) {
        Ok(t) => t,
        Err(e) => {
            report.exit_code = EXIT_UNREADABLE;
            report.failure = Some(format!("{}: {e}", args.script.display()));
            return report;
        }
    };
    let script_dir = match args.script.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let ctx = EvalContext::new(args.data.clone().unwrap_or_else(|| script_dir.clone())).with_script_dir(script_dir);
    let mut session = Session::new();
    for line in parse_script(&text) {
        let outcome = match line.result {
            Ok(None) => continue,
            Ok(Some(cmd)) => evaluate(&session, &cmd, &ctx)
                .map_err(|e| LineError { line: line.line, kind: LineErrorKind::Eval, message: e.to_string() }),
            Err(e) => Err(LineError { line: line.line, kind: LineErrorKind::Parse, message: e.to_string() }),
        };
        match outcome {
            Ok((next, events)) => {
                session = next;
                for e in events {
                    let Event::SnapshotRequested { path, size } = e else { continue };
                    let size = size.or(args.size).unwrap_or(DEFAULT_SNAPSHOT_SIZE);
                    let p = Path::new(&path);
                    let target = if p.is_absolute() { p.to_path_buf() } else { args.out.join(p) };
                    if let Err(msg) = write_snapshot(&session, &target, size) {
                        report.exit_code = EXIT_RENDER_FAILURE;
                        report.failure = Some(format!("line {}: {msg}", line.line));
                        return report;
                    }
                    report.snapshots.push(target);
                }
            }
            Err(e) => {
                report.errors.push(e);
                if args.strict {
                    report.exit_code = EXIT_SCRIPT_ERRORS;
                    return report;
                }
            }
        }
    }
    report
}

/// Converts a raw volume and returns the written path.
pub fn import(args: &ImportArgs) -> Result<PathBuf, String> {
    let spec = RawSpec { dims: args.dims.0.clone(), dtype: args.dtype, spacing: args.spacing.clone(), order: args.order };
    let field = import_raw(&args.raw, &spec).map_err(|e| e.to_string())?;
    let out = args.output.clone().unwrap_or_else(|| args.raw.with_extension("ndvf"));
    save_field(&field, &out).map_err(|e| e.to_string())?;
    Ok(out)
}
