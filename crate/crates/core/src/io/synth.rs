//! Seeded synthetic datasets.
//!
//! Randomness comes from SplitMix64 seeded with the raw 64-bit seed;
//! `uniform` maps the top 53 bits of each output to `[0, 1)`. Exponentials
//! go through `libm` so outputs do not depend on the platform's libm.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use super::{IoError, Result};
use crate::field::ScalarField;

/// Peak positive value of a lump field. The isolevel 0.005 then cuts every
/// positive lump near half its height; the scale itself is a free choice.
pub const QCD_PEAK: f64 = 0.01;

/// Uniform draw in `[0, 1)` from the top 53 bits.
pub fn uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One periodic Gaussian bump, in lattice units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcdLump {
    pub center: [f64; 4],
    pub width: f64,
    pub sign: f64,
}

impl QcdLump {
    /// Unscaled contribution at lattice site `idx` of a periodic lattice `dims`.
    pub fn eval(&self, dims: &[usize], idx: &[usize]) -> f64 {
        let mut r2 = 0.0;
        for a in 0..4 {
            let n = dims[a] as f64;
            let d = (idx[a] as f64 - self.center[a]).abs() % n;
            let d = d.min(n - d);
            r2 += d * d;
        }
        self.sign * libm::exp(-r2 / (2.0 * self.width * self.width))
    }
}

fn check_dims(dims: &[usize], n: usize) -> Result<()> {
    if dims.len() != n {
        return Err(IoError::Argument(format!("expected {n} dims, got {}", dims.len())));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(IoError::Argument(format!("zero extent in {dims:?}")));
    }
    Ok(())
}

/// Lump parameters: centers uniform over the lattice, widths in `[1.5, 3)`,
/// first lump positive and the rest of random sign.
pub fn qcd_lumps(dims: &[usize], n_lumps: usize, seed: u64) -> Result<Vec<QcdLump>> {
    check_dims(dims, 4)?;
    if n_lumps == 0 {
        return Err(IoError::Argument("need at least one lump".into()));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    Ok((0..n_lumps)
        .map(|k| {
            let center = std::array::from_fn(|a| uniform(&mut rng) * dims[a] as f64);
            let width = 1.5 + 1.5 * uniform(&mut rng);
            let s = uniform(&mut rng);
            let sign = if k == 0 || s < 0.5 { 1.0 } else { -1.0 };
            QcdLump { center, width, sign }
        })
        .collect())
}

/// Sum of periodic 4D Gaussian lumps, scaled so the largest positive value
/// equals [`QCD_PEAK`].
pub fn synth_qcd_lumps(dims: &[usize], n_lumps: usize, seed: u64) -> Result<ScalarField<f64>> {
    let lumps = qcd_lumps(dims, n_lumps, seed)?;
    let raw = ScalarField::from_fn(dims.to_vec(), |idx| lumps.iter().map(|l| l.eval(dims, idx)).sum::<f64>())?;
    let peak = raw.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let peak = if peak > 0.0 { peak } else { raw.values().iter().fold(0.0f64, |m, v| m.max(v.abs())) };
    let scale = if peak > 0.0 { QCD_PEAK / peak } else { 1.0 };
    Ok(ScalarField::new(dims.to_vec(), raw.values().iter().map(|v| v * scale).collect())?)
}

/// Geometry of the meteorite stand-in, in lattice units.
#[derive(Debug, Clone, PartialEq)]
pub struct MeteoriteLayout {
    pub center: [f64; 3],
    pub semi_axes: [f64; 3],
    pub core_center: [f64; 3],
    pub core_radius: f64,
    pub pores: Vec<([f64; 3], f64)>,
}

impl MeteoriteLayout {
    /// Squared ellipsoid radius; at most 1 inside the rock.
    pub fn ellipsoid_metric(&self, p: [f64; 3]) -> f64 {
        (0..3).map(|a| ((p[a] - self.center[a]) / self.semi_axes[a]).powi(2)).sum()
    }

    pub fn core_distance(&self, p: [f64; 3]) -> f64 {
        dist(p, self.core_center)
    }

    pub fn in_pore(&self, p: [f64; 3]) -> bool {
        self.pores.iter().any(|&(c, r)| dist(p, c) <= r)
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

const PORES: usize = 8;

/// Ellipsoid with semi-axes `0.40 / 0.33 / 0.28` of the extents, an
/// off-center spherical core that fits inside it, and up to eight pores in
/// the rock away from the core.
pub fn meteorite_layout(dims: &[usize], seed: u64) -> Result<(MeteoriteLayout, SplitMix64)> {
    check_dims(dims, 3)?;
    let d: [f64; 3] = std::array::from_fn(|a| dims[a] as f64);
    let center = std::array::from_fn(|a| (d[a] - 1.0) / 2.0);
    let semi_axes = [0.40 * d[0], 0.33 * d[1], 0.28 * d[2]];
    let offset = [0.12 * d[0], -0.08 * d[1], 0.05 * d[2]];
    let core_center = std::array::from_fn(|a| center[a] + offset[a]);
    let off_len = dist(offset, [0.0; 3]);
    let min_axis = semi_axes.iter().copied().fold(f64::INFINITY, f64::min);
    // the core ball stays inside the largest ball the ellipsoid contains
    let core_radius = (0.12 * d.iter().copied().fold(f64::INFINITY, f64::min)).min(0.9 * (min_axis - off_len)).max(0.0);
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut layout = MeteoriteLayout { center, semi_axes, core_center, core_radius, pores: Vec::new() };
    let min_dim = d.iter().copied().fold(f64::INFINITY, f64::min);
    let mut attempts = 0;
    while layout.pores.len() < PORES && attempts < 100 * PORES {
        attempts += 1;
        let p: [f64; 3] = std::array::from_fn(|a| center[a] + (2.0 * uniform(&mut rng) - 1.0) * semi_axes[a]);
        let r = (0.03 + 0.03 * uniform(&mut rng)) * min_dim;
        if layout.ellipsoid_metric(p) <= 0.5 && dist(p, core_center) > core_radius + r + 1.0 {
            layout.pores.push((p, r.max(1.0)));
        }
    }
    Ok((layout, rng))
}

fn air(u: f64) -> f64 {
    0.001 + 0.0003 * (2.0 * u - 1.0)
}

/// Attenuation stand-in: air near 0.001, rock in `[0.003, 0.012]`, core in
/// `[0.0125, 0.02]`, pores at air level. One draw per voxel in storage order.
pub fn synth_meteorite_phantom(dims: &[usize], seed: u64) -> Result<ScalarField<f64>> {
    let (layout, mut rng) = meteorite_layout(dims, seed)?;
    Ok(ScalarField::from_fn(dims.to_vec(), |idx| {
        let p = [idx[0] as f64, idx[1] as f64, idx[2] as f64];
        let u = uniform(&mut rng);
        let e = layout.ellipsoid_metric(p);
        if e > 1.0 || layout.in_pore(p) {
            return air(u);
        }
        let dc = layout.core_distance(p);
        if dc <= layout.core_radius {
            let v = 0.0135 + 0.005 * (1.0 - dc / layout.core_radius) + 0.0008 * (2.0 * u - 1.0);
            return v.clamp(0.0125, 0.02);
        }
        (0.0065 + 0.0025 * (1.0 - e) + 0.0015 * (2.0 * u - 1.0)).clamp(0.003, 0.012)
    })?)
}
