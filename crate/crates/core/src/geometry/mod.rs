//! Geometry extracted from 3D fields: sampling, isosurfaces, cut planes, bounds.

mod cut;
mod marching_cubes;
mod mesh;
mod sample;
pub mod tables;

pub use cut::{extract_cut_plane, CutPlane, PlaneFrame, SliceImage};
pub use marching_cubes::marching_cubes;
pub use mesh::{Aabb, TriangleMesh};
pub use sample::{trilinear_sample, Sample, Sampler};

use thiserror::Error;

use crate::field::ScalarField;
use crate::math::Vec3;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("expected a 3D field, got {0}D")]
    Dimension(usize),
    #[error("field needs at least 2 samples along every axis, got {0:?}")]
    TooSmall(Vec<usize>),
    #[error("plane does not intersect the field bounds")]
    EmptyIntersection,
    #[error("empty geometry has no bounds")]
    EmptyGeometry,
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

pub(crate) fn require_3d<T: Real>(field: &ScalarField<T>) -> Result<()> {
    if field.ndim() != 3 {
        return Err(GeometryError::Dimension(field.ndim()));
    }
    Ok(())
}

/// World position of a lattice point of a 3D field.
pub(crate) fn lattice_point<T: Real>(field: &ScalarField<T>, i: usize, j: usize, k: usize) -> Vec3<T> {
    let o = field.origin();
    let s = field.spacing();
    Vec3::new(
        o[0] + s[0] * T::from_usize(i).unwrap(),
        o[1] + s[1] * T::from_usize(j).unwrap(),
        o[2] + s[2] * T::from_usize(k).unwrap(),
    )
}

/// Bounds of the lattice points (voxel centers) of a 3D field.
pub fn field_bounds<T: Real>(field: &ScalarField<T>) -> Result<Aabb<T>> {
    require_3d(field)?;
    let d = field.dims();
    Ok(Aabb::new(lattice_point(field, 0, 0, 0), lattice_point(field, d[0] - 1, d[1] - 1, d[2] - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_of_unit_lattice() {
        let f = ScalarField::constant(vec![16, 16, 16], 0.0f64).unwrap();
        let b = field_bounds(&f).unwrap();
        assert_eq!(b.min, Vec3::zero());
        assert_eq!(b.max, Vec3::splat(15.0));
        assert_eq!(b.center(), Vec3::splat(7.5));
    }

    #[test]
    fn bounds_follow_origin() {
        let f = ScalarField::constant(vec![16, 16, 16], 0.0f64)
            .unwrap()
            .with_origin(vec![10.0, 0.0, 0.0])
            .unwrap();
        let b = field_bounds(&f).unwrap();
        assert_eq!(b.min, Vec3::new(10.0, 0.0, 0.0));
        assert_eq!(b.max, Vec3::new(25.0, 15.0, 15.0));
    }

    #[test]
    fn bounds_need_3d() {
        let f = ScalarField::constant(vec![4, 4], 0.0f64).unwrap();
        assert_eq!(field_bounds(&f), Err(GeometryError::Dimension(2)));
    }
}
