//! Transfer functions, CPU ray casting, mesh rasterization, overlays and
//! image composition.

mod camera;
mod canvas;
mod image;
mod overlay;
mod raster;
mod raycast;
mod tf;

pub use camera::{Camera, CameraBasis};
pub use canvas::Canvas;
pub use image::{composite_views, Image, MAX_COMPOSITE};
pub use overlay::{colorbar_image, draw_text, histogram_image, text_width};
pub use raster::{rasterize_mesh, rasterize_mesh_into, MeshShading, MeshStyle};
pub use raycast::{raycast, raycast_canvas, raycast_into, valid_bounds, VolumeStyle};
pub use tf::{Palette, TransferFunction};

use thiserror::Error;

use crate::field::FieldError;
use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("invalid camera: {0}")]
    Camera(String),
    #[error("image encoding failed: {0}")]
    Encode(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T, E = RenderError> = std::result::Result<T, E>;

pub(crate) fn check_size(width: usize, height: usize, min: usize) -> Result<()> {
    if width < min || height < min {
        return Err(RenderError::Size(format!("{width}x{height} is below the {min}x{min} minimum")));
    }
    Ok(())
}
