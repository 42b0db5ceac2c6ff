use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::camera::Camera;
use super::canvas::{to_unit, Canvas};
use super::image::Image;
use super::tf::TransferFunction;
use super::{check_size, RenderError, Result};
use crate::field::ScalarField;
use crate::geometry::{require_3d, Aabb, Sampler};
use crate::math::{Rigid, Vec3};
use crate::scalar::Real;

/// Transmittance below which a ray stops accumulating.
const CUTOFF: f64 = 1.0 / 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeStyle<T> {
    /// World units between samples.
    pub step_length: T,
    pub background: [u8; 3],
}

impl<T: Real> VolumeStyle<T> {
    pub fn new(step_length: T, background: [u8; 3]) -> Result<Self> {
        if !(step_length > T::zero()) || !step_length.is_finite() {
            return Err(RenderError::Argument(format!("step length must be positive, got {step_length}")));
        }
        Ok(Self { step_length, background })
    }
}

/// World box spanned by the lattice points of valid voxels, `None` when
/// every voxel is masked.
pub fn valid_bounds<T: Real>(field: &ScalarField<T>) -> Result<Option<Aabb<T>>> {
    require_3d(field)?;
    let d = field.dims();
    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    let mut any = false;
    for (k, &ok) in field.mask().iter().enumerate() {
        if !ok {
            continue;
        }
        any = true;
        let idx = [k % d[0], (k / d[0]) % d[1], k / (d[0] * d[1])];
        for a in 0..3 {
            lo[a] = lo[a].min(idx[a]);
            hi[a] = hi[a].max(idx[a]);
        }
    }
    if !any {
        return Ok(None);
    }
    let world = |idx: [usize; 3]| {
        Vec3::from_array(std::array::from_fn(|a| {
            field.origin()[a] + field.spacing()[a] * T::from_usize(idx[a]).unwrap()
        }))
    };
    Ok(Some(Aabb::new(world(lo), world(hi))))
}

/// Slab test; returns the parametric interval inside `bounds`.
fn intersect<T: Real>(bounds: &Aabb<T>, origin: Vec3<T>, dir: Vec3<T>) -> Option<(T, T)> {
    let mut t0 = T::neg_infinity();
    let mut t1 = T::infinity();
    for a in 0..3 {
        if dir[a] == T::zero() {
            if origin[a] < bounds.min[a] || origin[a] > bounds.max[a] {
                return None;
            }
            continue;
        }
        let inv = T::one() / dir[a];
        let (mut n, mut f) = ((bounds.min[a] - origin[a]) * inv, (bounds.max[a] - origin[a]) * inv);
        if n > f {
            std::mem::swap(&mut n, &mut f);
        }
        t0 = t0.max(n);
        t1 = t1.min(f);
    }
    (t0 <= t1).then_some((t0, t1))
}

struct RayResult {
    color: [f64; 3],
    transmittance: f64,
}

/// Marches `[t0, t1]` in full steps plus one partial last segment, sampling
/// each segment at its midpoint.
fn march<T: Real>(
    sampler: &Sampler<'_, T>,
    tf: &TransferFunction<T>,
    origin: Vec3<T>,
    dir: Vec3<T>,
    t0: T,
    t1: T,
    step: T,
) -> RayResult {
    let mut color = [T::zero(); 3];
    let mut trans = T::one();
    let cutoff = T::lit(CUTOFF);
    let half = T::lit(0.5);
    let length = t1 - t0;
    let full = (length / step).floor().to_usize().unwrap_or(0);
    let rest = length - step * T::from_usize(full).unwrap();
    let partial = rest > step * T::lit(1e-9);
    let segments = full + usize::from(partial);
    for k in 0..segments {
        let start = t0 + step * T::from_usize(k).unwrap();
        let len = if k < full { step } else { rest };
        let s = sampler.sample(origin + dir * (start + len * half));
        if !s.valid {
            continue;
        }
        let [r, g, b, a] = tf.eval(s.value);
        if a <= T::zero() {
            continue;
        }
        let a_s = T::one() - (T::one() - a).powf(len);
        let w = trans * a_s;
        color[0] += w * r;
        color[1] += w * g;
        color[2] += w * b;
        trans *= T::one() - a_s;
        if trans < cutoff {
            break;
        }
    }
    RayResult { color: color.map(|c| c.as_f64()), transmittance: trans.as_f64() }
}

/// Composites the volume into `canvas`, behind anything already drawn.
/// `placement` maps the field's world frame into the scene.
pub fn raycast_into<T: Real>(
    canvas: &mut Canvas,
    field: &ScalarField<T>,
    tf: &TransferFunction<T>,
    camera: &Camera<T>,
    style: &VolumeStyle<T>,
    placement: &Rigid<T>,
) -> Result<()> {
    camera.validate()?;
    if !(style.step_length > T::zero()) {
        return Err(RenderError::Argument("step length must be positive".into()));
    }
    let sampler = Sampler::new(field)?;
    let Some(bounds) = valid_bounds(field)? else {
        return Ok(());
    };
    if tf.max_opacity() <= T::zero() {
        return Ok(());
    }
    let (w, h) = (canvas.width, canvas.height);
    let basis = camera.basis();
    let inverse = placement.inverse();
    let local_origin = inverse.apply(camera.position);
    let rows: Vec<Vec<Option<RayResult>>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| {
                    let dir = camera.ray_direction(&basis, x, y, w, h);
                    let local_dir = inverse.apply_vector(dir);
                    let (n, f) = intersect(&bounds, local_origin, local_dir)?;
                    let depth = canvas.depth[y * w + x];
                    let f = if depth.is_finite() {
                        f.min(T::lit(depth) / dir.dot(basis.forward))
                    } else {
                        f
                    };
                    let n = n.max(T::zero());
                    (n < f).then(|| march(&sampler, tf, local_origin, local_dir, n, f, style.step_length))
                })
                .collect()
        })
        .collect();
    for (y, row) in rows.into_iter().enumerate() {
        for (x, r) in row.into_iter().enumerate() {
            let Some(r) = r else { continue };
            let i = y * w + x;
            let t = r.transmittance;
            for c in 0..3 {
                canvas.rgb[i][c] = r.color[c] + t * canvas.rgb[i][c];
            }
            canvas.alpha[i] = 1.0 - t * (1.0 - canvas.alpha[i]);
        }
    }
    Ok(())
}

/// Renders the volume alone into a fresh canvas.
pub fn raycast_canvas<T: Real>(
    field: &ScalarField<T>,
    tf: &TransferFunction<T>,
    camera: &Camera<T>,
    style: &VolumeStyle<T>,
    width: usize,
    height: usize,
) -> Result<Canvas> {
    check_size(width, height, 1)?;
    let mut canvas = Canvas::new(width, height);
    raycast_into(&mut canvas, field, tf, camera, style, &Rigid::identity())?;
    Ok(canvas)
}

pub fn raycast<T: Real>(
    field: &ScalarField<T>,
    tf: &TransferFunction<T>,
    camera: &Camera<T>,
    style: &VolumeStyle<T>,
    width: usize,
    height: usize,
) -> Result<Image> {
    let canvas = raycast_canvas(field, tf, camera, style, width, height)?;
    Ok(canvas.to_image(to_unit(style.background)))
}
