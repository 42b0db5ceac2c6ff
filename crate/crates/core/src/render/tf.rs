use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{RenderError, Result};
use crate::scalar::Real;

/// Built-in color palettes. Stops are at normalized positions in `[0, 1]`
/// and get stretched over the scalar range of a transfer function.
///
/// | name    | stops                                                                 |
/// |---------|-----------------------------------------------------------------------|
/// | gray    | 0 black, 1 white                                                      |
/// | rainbow | 0 (0,0,1), 0.25 (0,1,1), 0.5 (0,1,0), 0.75 (1,1,0), 1 (1,0,0)         |
/// | heat    | 0 black, 0.4 (0.9,0,0), 0.8 (1,0.9,0), 1 white                        |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    Gray,
    Rainbow,
    Heat,
}

impl Palette {
    pub const ALL: [Palette; 3] = [Palette::Gray, Palette::Rainbow, Palette::Heat];

    pub fn name(self) -> &'static str {
        match self {
            Palette::Gray => "gray",
            Palette::Rainbow => "rainbow",
            Palette::Heat => "heat",
        }
    }

    pub fn stops(self) -> &'static [(f64, [f64; 3])] {
        match self {
            Palette::Gray => &[(0.0, [0.0, 0.0, 0.0]), (1.0, [1.0, 1.0, 1.0])],
            Palette::Rainbow => &[
                (0.0, [0.0, 0.0, 1.0]),
                (0.25, [0.0, 1.0, 1.0]),
                (0.5, [0.0, 1.0, 0.0]),
                (0.75, [1.0, 1.0, 0.0]),
                (1.0, [1.0, 0.0, 0.0]),
            ],
            Palette::Heat => &[
                (0.0, [0.0, 0.0, 0.0]),
                (0.4, [0.9, 0.0, 0.0]),
                (0.8, [1.0, 0.9, 0.0]),
                (1.0, [1.0, 1.0, 1.0]),
            ],
        }
    }
}

impl fmt::Display for Palette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Palette {
    type Err = RenderError;
    fn from_str(s: &str) -> Result<Self> {
        Palette::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| RenderError::Argument(format!("unknown palette: {s}; expected gray|rainbow|heat")))
    }
}

/// Piecewise-linear scalar-to-color and scalar-to-opacity maps.
///
/// Opacity is per unit world length; the ray caster corrects it for its step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction<T> {
    pub color_points: Vec<(T, [T; 3])>,
    pub opacity_points: Vec<(T, T)>,
    pub palette_name: String,
}

fn strictly_ascending<T: Real, V>(points: &[(T, V)]) -> bool {
    points.windows(2).all(|w| w[0].0 < w[1].0) && points.iter().all(|p| p.0.is_finite())
}

fn in_unit<T: Real>(v: T) -> bool {
    v >= T::zero() && v <= T::one()
}

fn lerp_points<T: Real, const N: usize>(points: &[(T, [T; N])], s: T) -> [T; N] {
    let first = points[0];
    let last = points[points.len() - 1];
    if !(s > first.0) {
        return first.1;
    }
    if s >= last.0 {
        return last.1;
    }
    let k = points.partition_point(|p| p.0 <= s);
    let (s0, c0) = points[k - 1];
    let (s1, c1) = points[k];
    if s == s0 {
        return c0;
    }
    let t = (s - s0) / (s1 - s0);
    std::array::from_fn(|i| c0[i] + (c1[i] - c0[i]) * t)
}

impl<T: Real> TransferFunction<T> {
    pub fn new(color_points: Vec<(T, [T; 3])>, opacity_points: Vec<(T, T)>, palette_name: &str) -> Result<Self> {
        if color_points.len() < 2 || opacity_points.len() < 2 {
            return Err(RenderError::Argument("transfer functions need at least 2 color and 2 opacity points".into()));
        }
        if !strictly_ascending(&color_points) || !strictly_ascending(&opacity_points) {
            return Err(RenderError::Argument("control point scalars must be strictly ascending".into()));
        }
        if !color_points.iter().all(|(_, c)| c.iter().all(|&v| in_unit(v))) {
            return Err(RenderError::Argument("rgb components must lie in [0, 1]".into()));
        }
        if !opacity_points.iter().all(|&(_, a)| in_unit(a)) {
            return Err(RenderError::Argument("opacities must lie in [0, 1]".into()));
        }
        Ok(Self { color_points, opacity_points, palette_name: palette_name.to_string() })
    }

    /// Palette stretched over `[lo, hi]` with an opacity ramp from 0 at `lo`
    /// to `max_alpha` at `hi`.
    pub fn from_palette(palette: Palette, lo: T, hi: T, max_alpha: T) -> Result<Self> {
        let (lo, hi) = widen(lo, hi)?;
        let color_points = palette
            .stops()
            .iter()
            .map(|&(t, c)| (lo + (hi - lo) * T::lit(t), c.map(T::lit)))
            .collect();
        Self::new(color_points, vec![(lo, T::zero()), (hi, max_alpha)], palette.name())
    }

    /// Scalar range spanned by the color points.
    pub fn range(&self) -> (T, T) {
        (self.color_points[0].0, self.color_points[self.color_points.len() - 1].0)
    }

    pub fn color(&self, s: T) -> [T; 3] {
        lerp_points(&self.color_points, s)
    }

    pub fn opacity(&self, s: T) -> T {
        let first = self.opacity_points[0];
        let last = self.opacity_points[self.opacity_points.len() - 1];
        if !(s > first.0) {
            return first.1;
        }
        if s >= last.0 {
            return last.1;
        }
        let k = self.opacity_points.partition_point(|p| p.0 <= s);
        let (s0, a0) = self.opacity_points[k - 1];
        let (s1, a1) = self.opacity_points[k];
        if s == s0 {
            return a0;
        }
        a0 + (a1 - a0) * ((s - s0) / (s1 - s0))
    }

    pub fn eval(&self, s: T) -> [T; 4] {
        let [r, g, b] = self.color(s);
        [r, g, b, self.opacity(s)]
    }

    pub fn max_opacity(&self) -> T {
        self.opacity_points.iter().map(|p| p.1).fold(T::zero(), T::max)
    }

    /// Same palette restretched over `[lo, hi]`, keeping the opacity points.
    pub fn with_palette(&self, palette: Palette) -> Result<Self> {
        let (lo, hi) = self.range();
        let mut out = Self::from_palette(palette, lo, hi, T::one())?;
        out.opacity_points = self.opacity_points.clone();
        Ok(out)
    }

    pub fn with_opacity_points(&self, points: Vec<(T, T)>) -> Result<Self> {
        Self::new(self.color_points.clone(), points, &self.palette_name)
    }

    /// Restricts visibility to `[lo, hi]`: colors are restretched over the
    /// window and opacity is the current maximum inside it, zero outside.
    pub fn windowed(&self, lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) {
            return Err(RenderError::Argument(format!("window {lo}..{hi} is not increasing")));
        }
        let palette: Palette = self.palette_name.parse().unwrap_or(Palette::Gray);
        let alpha = self.max_opacity();
        let delta = (hi - lo) * T::lit(1e-6);
        let mut out = Self::from_palette(palette, lo, hi, T::one())?;
        out.opacity_points = vec![(lo - delta, T::zero()), (lo, alpha), (hi, alpha), (hi + delta, T::zero())];
        Ok(out)
    }
}

fn widen<T: Real>(lo: T, hi: T) -> Result<(T, T)> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(RenderError::Argument(format!("invalid scalar range {lo}..{hi}")));
    }
    if lo < hi {
        return Ok((lo, hi));
    }
    let half = T::one().max(lo.abs()) * T::lit(0.5);
    Ok((lo - half, hi + half))
}
