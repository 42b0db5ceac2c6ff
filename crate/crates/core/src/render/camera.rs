use serde::{Deserialize, Serialize};

use super::{RenderError, Result};
use crate::math::Vec3;
use crate::scalar::Real;

/// Perspective pinhole camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Camera<T> {
    pub position: Vec3<T>,
    pub focal_point: Vec3<T>,
    pub view_up: Vec3<T>,
    pub vertical_fov_degrees: T,
}

/// Orthonormal camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraBasis<T> {
    pub forward: Vec3<T>,
    pub right: Vec3<T>,
    pub up: Vec3<T>,
}

impl<T: Real> Camera<T> {
    pub fn new(position: Vec3<T>, focal_point: Vec3<T>, view_up: Vec3<T>, vertical_fov_degrees: T) -> Result<Self> {
        let cam = Self { position, focal_point, view_up, vertical_fov_degrees };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.position.is_finite() && self.focal_point.is_finite() && self.view_up.is_finite()) {
            return Err(RenderError::Camera("non-finite camera vector".into()));
        }
        let fov = self.vertical_fov_degrees;
        if !(fov > T::zero() && fov < T::lit(180.0)) {
            return Err(RenderError::Camera(format!("field of view {fov} not in (0, 180)")));
        }
        let dir = self.focal_point - self.position;
        if dir.norm() == T::zero() {
            return Err(RenderError::Camera("position coincides with focal point".into()));
        }
        let cross = dir.normalized().cross(self.view_up.normalized());
        if !(cross.norm() > T::lit(1e-9)) {
            return Err(RenderError::Camera("view-up is parallel to the view direction".into()));
        }
        Ok(())
    }

    pub fn distance(&self) -> T {
        (self.focal_point - self.position).norm()
    }

    pub fn basis(&self) -> CameraBasis<T> {
        let forward = (self.focal_point - self.position).normalized();
        let right = forward.cross(self.view_up).normalized();
        let up = right.cross(forward);
        CameraBasis { forward, right, up }
    }

    pub fn tan_half_fov(&self) -> T {
        (self.vertical_fov_degrees.to_radians() * T::lit(0.5)).tan()
    }

    /// Unit direction of the ray through the center of pixel `(px, py)`,
    /// top-left origin.
    pub fn ray_direction(&self, basis: &CameraBasis<T>, px: usize, py: usize, width: usize, height: usize) -> Vec3<T> {
        let w = T::from_usize(width).unwrap();
        let h = T::from_usize(height).unwrap();
        let th = self.tan_half_fov();
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let sx = (two * (T::from_usize(px).unwrap() + half) / w - T::one()) * th * (w / h);
        let sy = (T::one() - two * (T::from_usize(py).unwrap() + half) / h) * th;
        (basis.forward + basis.right * sx + basis.up * sy).normalized()
    }

    /// Camera-space coordinates `(x right, y up, z forward)`.
    pub fn to_view(&self, basis: &CameraBasis<T>, p: Vec3<T>) -> Vec3<T> {
        let r = p - self.position;
        Vec3::new(basis.right.dot(r), basis.up.dot(r), basis.forward.dot(r))
    }

    /// Continuous pixel coordinates of a camera-space point in front of the camera.
    pub fn view_to_screen(&self, v: Vec3<T>, width: usize, height: usize) -> (T, T) {
        let w = T::from_usize(width).unwrap();
        let h = T::from_usize(height).unwrap();
        let th = self.tan_half_fov();
        let half = T::lit(0.5);
        let sx = (v.x / (v.z * th * (w / h)) + T::one()) * half * w;
        let sy = (T::one() - v.y / (v.z * th)) * half * h;
        (sx, sy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cam() -> Camera<f64> {
        Camera::new(Vec3::new(0.0, 0.0, 10.0), Vec3::zero(), Vec3::new(0.0, 1.0, 0.0), 40.0).unwrap()
    }

    #[test]
    fn rejects_degenerate_cameras() {
        let up = Vec3::new(0.0, 1.0, 0.0);
        assert!(Camera::new(Vec3::zero(), Vec3::zero(), up, 30.0).is_err());
        assert!(Camera::new(Vec3::new(0.0, 5.0, 0.0), Vec3::zero(), up, 30.0).is_err());
        assert!(Camera::new(Vec3::new(0.0, 0.0, 5.0), Vec3::zero(), up, 180.0).is_err());
    }

    #[test]
    fn center_ray_hits_focal_point() {
        let c = cam();
        let b = c.basis();
        let d = c.ray_direction(&b, 50, 50, 101, 101);
        assert!((d - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn projection_inverts_ray() {
        let c = cam();
        let b = c.basis();
        let d = c.ray_direction(&b, 17, 80, 200, 100);
        let p = c.position + d * 7.0;
        let (sx, sy) = c.view_to_screen(c.to_view(&b, p), 200, 100);
        assert!((sx - 17.5).abs() < 1e-9 && (sy - 80.5).abs() < 1e-9);
    }
}
