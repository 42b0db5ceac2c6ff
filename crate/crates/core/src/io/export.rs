use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use super::{io_err, Result};
use crate::geometry::TriangleMesh;
use crate::render::Image;
use crate::scalar::Real;

/// Binary PPM with alpha composited over `background`.
pub fn write_image_ppm(image: &Image, path: &Path, background: [u8; 3]) -> Result<()> {
    std::fs::write(path, image.to_ppm(background)).map_err(io_err(path))
}

pub fn write_image_png(image: &Image, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    image.write_png(BufWriter::new(file))?;
    Ok(())
}

pub fn write_mesh_off<T: Real>(mesh: &TriangleMesh<T>, path: &Path) -> Result<()> {
    std::fs::write(path, mesh.to_off()).map_err(io_err(path))
}
