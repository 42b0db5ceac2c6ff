use super::{require_3d, Result};
use crate::field::ScalarField;
use crate::math::Vec3;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub value: T,
    pub valid: bool,
}

/// Trilinear interpolation at world point `p`.
///
/// The sample is invalid outside the hull of the lattice points or when any
/// voxel with nonzero weight is masked.
pub fn trilinear_sample<T: Real>(field: &ScalarField<T>, p: Vec3<T>) -> Result<Sample<T>> {
    Ok(Sampler::new(field)?.sample(p))
}

/// Reusable trilinear sampler over a validated 3D field.
#[derive(Debug, Clone)]
pub struct Sampler<'a, T> {
    field: &'a ScalarField<T>,
    dims: [usize; 3],
    origin: [T; 3],
    inv_spacing: [T; 3],
    eps: T,
}

impl<'a, T: Real> Sampler<'a, T> {
    pub fn new(field: &'a ScalarField<T>) -> Result<Self> {
        require_3d(field)?;
        let d = field.dims();
        let s = field.spacing();
        let o = field.origin();
        Ok(Self {
            field,
            dims: [d[0], d[1], d[2]],
            origin: [o[0], o[1], o[2]],
            inv_spacing: [T::one() / s[0], T::one() / s[1], T::one() / s[2]],
            eps: T::lit(1e-9).max(T::epsilon() * T::lit(64.0)),
        })
    }

    pub fn field(&self) -> &'a ScalarField<T> {
        self.field
    }

    pub fn sample(&self, p: Vec3<T>) -> Sample<T> {
        let invalid = Sample { value: T::zero(), valid: false };
        let mut base = [0usize; 3];
        let mut frac = [T::zero(); 3];
        for a in 0..3 {
            let g = (p[a] - self.origin[a]) * self.inv_spacing[a];
            let hi = T::from_usize(self.dims[a] - 1).unwrap();
            if !(g >= -self.eps && g <= hi + self.eps) {
                return invalid;
            }
            let g = g.max(T::zero()).min(hi);
            if self.dims[a] == 1 {
                continue;
            }
            let i0 = g.floor().to_usize().unwrap().min(self.dims[a] - 2);
            base[a] = i0;
            frac[a] = g - T::from_usize(i0).unwrap();
        }
        let d = self.dims;
        let values = self.field.values();
        let mask = self.field.mask();
        let mut acc = T::zero();
        for corner in 0..8 {
            let mut w = T::one();
            let mut off = 0;
            let mut stride = 1;
            for a in 0..3 {
                let bit = (corner >> a) & 1;
                w = w * if bit == 1 { frac[a] } else { T::one() - frac[a] };
                off += (base[a] + bit) * stride;
                stride *= d[a];
            }
            if w == T::zero() {
                continue;
            }
            if !mask[off] {
                return invalid;
            }
            acc = acc + w * values[off];
        }
        Sample { value: acc, valid: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometryError;

    fn linear() -> ScalarField<f64> {
        ScalarField::from_fn(vec![5, 4, 6], |i| i[0] as f64 + 2.0 * i[1] as f64 + 3.0 * i[2] as f64)
            .unwrap()
            .with_spacing(vec![0.5, 1.0, 2.0])
            .unwrap()
            .with_origin(vec![1.0, 2.0, 3.0])
            .unwrap()
    }

    #[test]
    fn exact_at_voxel_centers() {
        let f = linear();
        let s = Sampler::new(&f).unwrap();
        for (i, j, k) in [(0, 0, 0), (4, 3, 5), (2, 1, 3)] {
            let p = Vec3::new(1.0 + 0.5 * i as f64, 2.0 + j as f64, 3.0 + 2.0 * k as f64);
            let r = s.sample(p);
            assert!(r.valid);
            assert_eq!(r.value, f.get(&[i, j, k]));
        }
    }

    #[test]
    fn midpoint_between_two_and_four() {
        let f = ScalarField::from_fn(vec![2, 2, 2], |i| if i[0] == 0 { 2.0 } else { 4.0 }).unwrap();
        let r = trilinear_sample(&f, Vec3::new(0.5, 0.3, 0.9)).unwrap();
        assert_eq!(r.value, 3.0);
    }

    #[test]
    fn reproduces_linear_fields() {
        let f = linear();
        let s = Sampler::new(&f).unwrap();
        let mut state = 1u64;
        for _ in 0..500 {
            let mut r = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let (gx, gy, gz) = (4.0 * r(), 3.0 * r(), 5.0 * r());
            let p = Vec3::new(1.0 + 0.5 * gx, 2.0 + gy, 3.0 + 2.0 * gz);
            let exact = gx + 2.0 * gy + 3.0 * gz;
            let got = s.sample(p);
            assert!(got.valid);
            assert!((got.value - exact).abs() < 1e-9, "{} vs {}", got.value, exact);
        }
    }

    #[test]
    fn outside_hull_is_invalid() {
        let f = linear();
        assert!(!trilinear_sample(&f, Vec3::new(0.9, 2.0, 3.0)).unwrap().valid);
        assert!(!trilinear_sample(&f, Vec3::new(1.0, 2.0, 13.1)).unwrap().valid);
    }

    #[test]
    fn masked_neighbour_invalidates() {
        let mut mask = vec![true; 8];
        mask[7] = false;
        let f = ScalarField::constant(vec![2, 2, 2], 1.0f64).unwrap().with_mask(mask).unwrap();
        assert!(!trilinear_sample(&f, Vec3::splat(0.5)).unwrap().valid);
        // zero weight on the masked corner
        assert!(trilinear_sample(&f, Vec3::zero()).unwrap().valid);
    }

    #[test]
    fn needs_3d() {
        let f = ScalarField::constant(vec![2, 2], 1.0f64).unwrap();
        assert_eq!(trilinear_sample(&f, Vec3::zero()).unwrap_err(), GeometryError::Dimension(2));
    }
}
