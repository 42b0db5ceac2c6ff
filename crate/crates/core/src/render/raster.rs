use serde::{Deserialize, Serialize};

use super::camera::Camera;
use super::canvas::{to_unit, Canvas};
use super::image::Image;
use super::{check_size, RenderError, Result};
use crate::geometry::{GeometryError, TriangleMesh};
use crate::math::{Rigid, Vec3};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeshShading {
    /// Headlight diffuse: `0.2 + 0.8 |n . l|`, two-sided.
    Lambert,
    /// Colors as given.
    Unlit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshStyle {
    pub color: [f64; 3],
    pub shading: MeshShading,
}

impl MeshStyle {
    pub fn lambert(color: [u8; 3]) -> Self {
        Self { color: to_unit(color), shading: MeshShading::Lambert }
    }

    pub fn unlit() -> Self {
        Self { color: [1.0; 3], shading: MeshShading::Unlit }
    }
}

fn camera_f64<T: Real>(c: &Camera<T>) -> Camera<f64> {
    Camera {
        position: c.position.cast(),
        focal_point: c.focal_point.cast(),
        view_up: c.view_up.cast(),
        vertical_fov_degrees: c.vertical_fov_degrees.as_f64(),
    }
}

fn edge(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

/// Z-buffered rasterization into `canvas`. `vertex_colors`, when given,
/// replaces the style color per vertex and is interpolated perspective-correctly.
/// Triangles with a vertex at or behind the near plane are dropped.
pub fn rasterize_mesh_into<T: Real>(
    canvas: &mut Canvas,
    mesh: &TriangleMesh<T>,
    camera: &Camera<T>,
    placement: &Rigid<T>,
    style: &MeshStyle,
    vertex_colors: Option<&[[f64; 3]]>,
) -> Result<()> {
    camera.validate()?;
    mesh.validate()?;
    if let Some(vc) = vertex_colors {
        if vc.len() != mesh.vertex_count() {
            return Err(RenderError::Argument(format!(
                "{} vertex colors for {} vertices",
                vc.len(),
                mesh.vertex_count()
            )));
        }
    }
    let cam = camera_f64(camera);
    let basis = cam.basis();
    let near = 1e-4 * cam.distance();
    let (w, h) = (canvas.width, canvas.height);
    let world: Vec<Vec3<f64>> = (0..mesh.vertex_count()).map(|i| placement.apply(mesh.vertex(i)).cast()).collect();
    let view: Vec<Vec3<f64>> = world.iter().map(|&p| cam.to_view(&basis, p)).collect();
    for t in 0..mesh.triangle_count() {
        let idx = mesh.triangle(t).map(|i| i as usize);
        let v = idx.map(|i| view[i]);
        if v.iter().any(|p| !(p.z > near)) {
            continue;
        }
        let s = v.map(|p| cam.view_to_screen(p, w, h));
        let area = edge(s[0], s[1], s[2]);
        if area.abs() < 1e-12 {
            continue;
        }
        let colors: [[f64; 3]; 3] = match vertex_colors {
            Some(vc) => idx.map(|i| vc[i]),
            None => [style.color; 3],
        };
        let shade = match style.shading {
            MeshShading::Unlit => 1.0,
            MeshShading::Lambert => {
                let p = idx.map(|i| world[i]);
                let n = (p[1] - p[0]).cross(p[2] - p[0]).normalized();
                let centroid = (p[0] + p[1] + p[2]) * (1.0 / 3.0);
                let l = (cam.position - centroid).normalized();
                0.2 + 0.8 * n.dot(l).abs()
            }
        };
        let xmin = s.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).floor().max(0.0);
        let xmax = s.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).ceil().min(w as f64);
        let ymin = s.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor().max(0.0);
        let ymax = s.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil().min(h as f64);
        if xmin >= xmax || ymin >= ymax {
            continue;
        }
        let inv_z = v.map(|p| 1.0 / p.z);
        for y in ymin as usize..ymax as usize {
            for x in xmin as usize..xmax as usize {
                let p = (x as f64 + 0.5, y as f64 + 0.5);
                let b = [edge(s[1], s[2], p) / area, edge(s[2], s[0], p) / area, edge(s[0], s[1], p) / area];
                if b.iter().any(|&bi| bi < 0.0) {
                    continue;
                }
                let iz = b[0] * inv_z[0] + b[1] * inv_z[1] + b[2] * inv_z[2];
                let z = 1.0 / iz;
                let i = y * w + x;
                if !(z < canvas.depth[i]) {
                    continue;
                }
                let rgb: [f64; 3] = std::array::from_fn(|c| {
                    let num = b[0] * colors[0][c] * inv_z[0] + b[1] * colors[1][c] * inv_z[1] + b[2] * colors[2][c] * inv_z[2];
                    (num * z * shade).clamp(0.0, 1.0)
                });
                canvas.rgb[i] = rgb;
                canvas.alpha[i] = 1.0;
                canvas.depth[i] = z;
            }
        }
    }
    Ok(())
}

/// Renders a single mesh in place over `background`.
pub fn rasterize_mesh<T: Real>(
    mesh: &TriangleMesh<T>,
    camera: &Camera<T>,
    width: usize,
    height: usize,
    color: [u8; 3],
    background: [u8; 3],
) -> Result<Image> {
    check_size(width, height, 1)?;
    if mesh.is_empty() {
        return Err(GeometryError::EmptyGeometry.into());
    }
    let mut canvas = Canvas::new(width, height);
    rasterize_mesh_into(&mut canvas, mesh, camera, &Rigid::identity(), &MeshStyle::lambert(color), None)?;
    Ok(canvas.to_image(to_unit(background)))
}
