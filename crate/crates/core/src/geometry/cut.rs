use serde::{Deserialize, Serialize};

use super::{field_bounds, Aabb, GeometryError, Result, Sampler};
use crate::field::ScalarField;
use crate::math::Vec3;
use crate::scalar::Real;

/// A cutting plane, either perpendicular to a lattice axis or with an
/// arbitrary unit normal. `offset` is the world coordinate along the axis, or
/// the signed distance `n . p` for the oblique form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CutPlane<T> {
    Axis { axis: usize, offset: T },
    Oblique { normal: Vec3<T>, offset: T },
}

impl<T: Real> CutPlane<T> {
    pub fn axis(axis: usize, offset: T) -> Result<Self> {
        if axis > 2 {
            return Err(GeometryError::Argument(format!("plane axis {axis} not in 0..3")));
        }
        Ok(CutPlane::Axis { axis, offset })
    }

    /// Normalizes `normal`; fails on a zero vector.
    pub fn oblique(normal: Vec3<T>, offset: T) -> Result<Self> {
        let normal = normal
            .try_normalize()
            .ok_or_else(|| GeometryError::Argument("plane normal must be nonzero".into()))?;
        Ok(CutPlane::Oblique { normal, offset })
    }

    /// Axis plane through the center of `bounds`.
    pub fn through_center(axis: usize, bounds: &Aabb<T>) -> Result<Self> {
        Self::axis(axis, bounds.center()[axis])
    }

    pub fn normal(&self) -> Vec3<T> {
        match *self {
            CutPlane::Axis { axis, .. } => Vec3::axis(axis),
            CutPlane::Oblique { normal, .. } => normal,
        }
    }

    pub fn offset(&self) -> T {
        match *self {
            CutPlane::Axis { offset, .. } | CutPlane::Oblique { offset, .. } => offset,
        }
    }
}

/// Placement of a sample grid: sample `(i, j)` sits at `origin + u*i + v*j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFrame<T> {
    pub origin: Vec3<T>,
    pub u: Vec3<T>,
    pub v: Vec3<T>,
}

impl<T: Real> PlaneFrame<T> {
    pub fn point(&self, i: T, j: T) -> Vec3<T> {
        self.origin + self.u * i + self.v * j
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceImage<T> {
    pub width: usize,
    pub height: usize,
    /// Row-major, `j * width + i`.
    pub samples: Vec<T>,
    pub sample_mask: Vec<bool>,
    pub frame: PlaneFrame<T>,
}

impl<T: Real> SliceImage<T> {
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let k = j * self.width + i;
        self.sample_mask[k].then(|| self.samples[k])
    }

    /// World position of sample `(i, j)`.
    pub fn world(&self, i: usize, j: usize) -> Vec3<T> {
        self.frame.point(T::from_usize(i).unwrap(), T::from_usize(j).unwrap())
    }
}

fn grid_count<T: Real>(extent: T, resolution: T) -> usize {
    (extent * resolution + T::lit(1e-9)).floor().to_usize().unwrap_or(0) + 1
}

/// Samples the field on a regular grid covering the plane's intersection
/// with the field bounds, `resolution` samples per world unit.
pub fn extract_cut_plane<T: Real>(
    field: &ScalarField<T>,
    plane: &CutPlane<T>,
    resolution: T,
) -> Result<SliceImage<T>> {
    let bounds = field_bounds(field)?;
    if !(resolution > T::zero()) || !resolution.is_finite() {
        return Err(GeometryError::Argument(format!("resolution must be positive, got {resolution}")));
    }
    let step = T::one() / resolution;
    let tol = T::lit(1e-9) * (T::one() + bounds.diagonal());
    let (frame, width, height) = match *plane {
        CutPlane::Axis { axis, offset } => {
            if axis > 2 {
                return Err(GeometryError::Argument(format!("plane axis {axis} not in 0..3")));
            }
            if offset < bounds.min[axis] - tol || offset > bounds.max[axis] + tol {
                return Err(GeometryError::EmptyIntersection);
            }
            let (a1, a2) = match axis {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let mut origin = bounds.min.to_array();
            origin[axis] = offset;
            let ext = bounds.extent();
            (
                PlaneFrame { origin: Vec3::from_array(origin), u: Vec3::axis(a1) * step, v: Vec3::axis(a2) * step },
                grid_count(ext[a1], resolution),
                grid_count(ext[a2], resolution),
            )
        }
        CutPlane::Oblique { normal, offset } => {
            let n = normal;
            if ((n.norm() - T::one()).abs()) > T::lit(1e-9) {
                return Err(GeometryError::Argument("oblique plane normal must have unit length".into()));
            }
            let corners = bounds.corners();
            let d: Vec<T> = corners.iter().map(|c| n.dot(*c)).collect();
            let dmin = d.iter().copied().fold(T::infinity(), T::min);
            let dmax = d.iter().copied().fold(T::neg_infinity(), T::max);
            if offset < dmin - tol || offset > dmax + tol {
                return Err(GeometryError::EmptyIntersection);
            }
            let k = (0..3).min_by(|&a, &b| n[a].abs().partial_cmp(&n[b].abs()).unwrap()).unwrap();
            let u = n.cross(Vec3::axis(k)).normalized();
            let v = n.cross(u);
            let p0 = n * offset;
            let (mut umin, mut umax) = (T::infinity(), T::neg_infinity());
            let (mut vmin, mut vmax) = (T::infinity(), T::neg_infinity());
            for c in corners {
                let r = c - p0;
                umin = umin.min(u.dot(r));
                umax = umax.max(u.dot(r));
                vmin = vmin.min(v.dot(r));
                vmax = vmax.max(v.dot(r));
            }
            (
                PlaneFrame { origin: p0 + u * umin + v * vmin, u: u * step, v: v * step },
                grid_count(umax - umin, resolution),
                grid_count(vmax - vmin, resolution),
            )
        }
    };
    let sampler = Sampler::new(field)?;
    let mut samples = Vec::with_capacity(width * height);
    let mut sample_mask = Vec::with_capacity(width * height);
    for j in 0..height {
        for i in 0..width {
            let s = sampler.sample(frame.point(T::from_usize(i).unwrap(), T::from_usize(j).unwrap()));
            samples.push(s.value);
            sample_mask.push(s.valid);
        }
    }
    Ok(SliceImage { width, height, samples, sample_mask, frame })
}
