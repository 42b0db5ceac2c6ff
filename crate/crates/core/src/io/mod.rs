//! File formats, synthetic stand-in datasets and output writers.

mod export;
mod ndvf;
mod raw;
mod synth;

pub use export::{write_image_png, write_image_ppm, write_mesh_off};
pub use ndvf::{decode_field, encode_field, load_field, read_header, save_field, FieldFileHeader, MAX_VOXELS, NDVF_MAGIC, NDVF_VERSION};
pub use raw::{import_raw, AxisOrder, RawDtype, RawSpec};
pub use synth::{
    meteorite_layout, qcd_lumps, synth_meteorite_phantom, synth_qcd_lumps, uniform, MeteoriteLayout, QcdLump,
    QCD_PEAK,
};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::field::FieldError;
use crate::render::RenderError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("bad magic {found:?}, expected \"NDVF\"")]
    BadMagic { found: Vec<u8> },
    #[error("unsupported NDVF version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated file: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("unknown dtype code {0}")]
    UnknownDtype(u8),
    #[error("{voxels} voxels exceed the limit of {limit}")]
    TooLarge { voxels: u128, limit: usize },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T, E = IoError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}
