//! N-dimensional scalar lattices and their reductions.
//!
//! Storage is flat with axis 0 varying fastest, so for a 4D `xyzt` field a
//! single `t` slice is one contiguous block. Every voxel carries a validity
//! flag; range filters clear flags instead of overwriting values, and all
//! reductions skip invalid voxels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

pub const MAX_AXES: usize = 4;
const DEFAULT_AXIS_NAMES: [&str; MAX_AXES] = ["x", "y", "z", "t"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{arg} {value} out of range (must be < {bound})")]
    Range { arg: &'static str, value: usize, bound: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("expected a {expected}D field, got {actual}D")]
    Dimension { expected: usize, actual: usize },
}

pub type Result<T, E = FieldError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    dims: Vec<usize>,
    spacing: Vec<T>,
    origin: Vec<T>,
    values: Vec<T>,
    mask: Vec<bool>,
    axis_names: Vec<String>,
}

fn default_axis_names(n: usize) -> Vec<String> {
    DEFAULT_AXIS_NAMES[..n].iter().map(|s| s.to_string()).collect()
}

impl<T: Real> ScalarField<T> {
    /// Fully valid field with unit spacing, zero origin and default axis names.
    pub fn new(dims: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_AXES {
            return Err(FieldError::Shape(format!("{} axes (supported: 1 to {MAX_AXES})", dims.len())));
        }
        if let Some(a) = dims.iter().position(|&d| d == 0) {
            return Err(FieldError::Shape(format!("axis {a} has zero extent")));
        }
        let len: usize = dims.iter().product();
        if values.len() != len {
            return Err(FieldError::Shape(format!("{} values for dims {:?} ({} voxels)", values.len(), dims, len)));
        }
        let n = dims.len();
        Ok(Self {
            spacing: vec![T::one(); n],
            origin: vec![T::zero(); n],
            mask: vec![true; len],
            axis_names: default_axis_names(n),
            dims,
            values,
        })
    }

    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let len: usize = dims.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            values.push(f(&idx));
            for (a, i) in idx.iter_mut().enumerate() {
                *i += 1;
                if *i < dims[a] {
                    break;
                }
                *i = 0;
            }
        }
        Self::new(dims, values)
    }

    pub fn constant(dims: Vec<usize>, value: T) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, vec![value; len])
    }

    pub fn with_spacing(mut self, spacing: Vec<T>) -> Result<Self> {
        if spacing.len() != self.ndim() {
            return Err(FieldError::Shape(format!("{} spacings for {} axes", spacing.len(), self.ndim())));
        }
        if let Some(s) = spacing.iter().find(|s| !(**s > T::zero()) || !s.is_finite()) {
            return Err(FieldError::Argument(format!("spacing must be positive and finite, got {s}")));
        }
        self.spacing = spacing;
        Ok(self)
    }

    pub fn with_origin(mut self, origin: Vec<T>) -> Result<Self> {
        if origin.len() != self.ndim() {
            return Err(FieldError::Shape(format!("{} origin components for {} axes", origin.len(), self.ndim())));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(FieldError::Argument("origin must be finite".into()));
        }
        self.origin = origin;
        Ok(self)
    }

    pub fn with_axis_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.ndim() {
            return Err(FieldError::Shape(format!("{} axis names for {} axes", names.len(), self.ndim())));
        }
        self.axis_names = names;
        Ok(self)
    }

    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.values.len() {
            return Err(FieldError::Shape(format!("mask of {} for {} voxels", mask.len(), self.values.len())));
        }
        self.mask = mask;
        Ok(self)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing
    }

    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn axis_names(&self) -> &[String] {
        &self.axis_names
    }

    pub fn axis_index(&self, label: &str) -> Option<usize> {
        self.axis_names.iter().position(|n| n == label)
    }

    pub fn is_fully_valid(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Linear offset of a multi-index (axis 0 fastest).
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.ndim());
        let mut off = 0;
        let mut stride = 1;
        for (a, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.dims[a]);
            off += i * stride;
            stride *= self.dims[a];
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.values[self.offset(idx)]
    }

    pub fn is_valid(&self, idx: &[usize]) -> bool {
        self.mask[self.offset(idx)]
    }

    /// Converts the element type, keeping geometry and mask.
    pub fn cast<U: Real>(&self) -> ScalarField<U> {
        let conv = |v: &T| U::lit(v.as_f64());
        ScalarField {
            dims: self.dims.clone(),
            spacing: self.spacing.iter().map(conv).collect(),
            origin: self.origin.iter().map(conv).collect(),
            values: self.values.iter().map(conv).collect(),
            mask: self.mask.clone(),
            axis_names: self.axis_names.clone(),
        }
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if self.ndim() < 2 {
            return Err(FieldError::Argument("cannot reduce a 1D field".into()));
        }
        if axis >= self.ndim() {
            return Err(FieldError::Range { arg: "axis", value: axis, bound: self.ndim() });
        }
        Ok(())
    }

    /// Sizes of (below `axis`, along `axis`, above `axis`).
    fn split_at_axis(&self, axis: usize) -> (usize, usize, usize) {
        let inner = self.dims[..axis].iter().product();
        let outer = self.dims[axis + 1..].iter().product();
        (inner, self.dims[axis], outer)
    }

    fn without_axis<V: Clone>(v: &[V], axis: usize) -> Vec<V> {
        v.iter()
            .enumerate()
            .filter(|(a, _)| *a != axis)
            .map(|(_, x)| x.clone())
            .collect()
    }

    fn reduced_shell(&self, axis: usize, values: Vec<T>, mask: Vec<bool>) -> Self {
        Self {
            dims: Self::without_axis(&self.dims, axis),
            spacing: Self::without_axis(&self.spacing, axis),
            origin: Self::without_axis(&self.origin, axis),
            axis_names: Self::without_axis(&self.axis_names, axis),
            values,
            mask,
        }
    }

    /// Pins `axis` to `index`, returning an (N-1)-dimensional field.
    pub fn slice(&self, axis: usize, index: usize) -> Result<Self> {
        self.check_axis(axis)?;
        if index >= self.dims[axis] {
            return Err(FieldError::Range { arg: "index", value: index, bound: self.dims[axis] });
        }
        let (inner, n, outer) = self.split_at_axis(axis);
        let mut values = Vec::with_capacity(inner * outer);
        let mut mask = Vec::with_capacity(inner * outer);
        for o in 0..outer {
            let base = (o * n + index) * inner;
            values.extend_from_slice(&self.values[base..base + inner]);
            mask.extend_from_slice(&self.mask[base..base + inner]);
        }
        Ok(self.reduced_shell(axis, values, mask))
    }

    /// Collapses `axis` with `reducer` over the valid voxels of each line.
    ///
    /// A line with no valid voxel yields an invalid output voxel (value 0).
    pub fn project(&self, axis: usize, reducer: Reducer) -> Result<Self> {
        self.check_axis(axis)?;
        let (inner, n, outer) = self.split_at_axis(axis);
        let mut values = Vec::with_capacity(inner * outer);
        let mut mask = Vec::with_capacity(inner * outer);
        for o in 0..outer {
            for i in 0..inner {
                let mut acc: Option<T> = None;
                let mut count = 0usize;
                for k in 0..n {
                    let off = (o * n + k) * inner + i;
                    if !self.mask[off] {
                        continue;
                    }
                    let v = self.values[off];
                    count += 1;
                    acc = Some(match (acc, reducer) {
                        (None, _) => v,
                        (Some(a), Reducer::Sum | Reducer::Mean) => a + v,
                        (Some(a), Reducer::Max) => a.max(v),
                        (Some(a), Reducer::Min) => a.min(v),
                    });
                }
                match acc {
                    Some(a) => {
                        let v = if reducer == Reducer::Mean { a / T::from_usize(count).unwrap() } else { a };
                        values.push(v);
                        mask.push(true);
                    }
                    None => {
                        values.push(T::zero());
                        mask.push(false);
                    }
                }
            }
        }
        Ok(self.reduced_shell(axis, values, mask))
    }

    /// Invalidates voxels with `value < lo` or `value > hi`. Values are untouched.
    pub fn filter_range(&self, lo: Option<T>, hi: Option<T>) -> Result<Self> {
        match (lo, hi) {
            (None, None) => return Err(FieldError::Argument("range filter needs at least one bound".into())),
            (Some(l), Some(h)) if l > h => {
                return Err(FieldError::Argument(format!("lower bound {l} exceeds upper bound {h}")));
            }
            _ => {}
        }
        let mut out = self.clone();
        for (m, &v) in out.mask.iter_mut().zip(&self.values) {
            let below = lo.is_some_and(|l| v < l);
            let above = hi.is_some_and(|h| v > h);
            if below || above {
                *m = false;
            }
        }
        Ok(out)
    }

    /// Minimum and maximum over valid voxels.
    pub fn valid_range(&self) -> Option<(T, T)> {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .fold(None, |acc, (&v, _)| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    /// Histogram of the valid voxels within `range` (default: their min/max).
    ///
    /// Bins are half-open `[edge_k, edge_k+1)` except the last, which also
    /// includes its upper edge. A degenerate data range `v..v` is widened to
    /// `v ± max(1, |v|)/2`.
    pub fn histogram(&self, bins: usize, range: Option<(T, T)>) -> Result<Histogram<T>> {
        if bins == 0 {
            return Err(FieldError::Argument("histogram needs at least one bin".into()));
        }
        let (lo, hi) = match range {
            Some((lo, hi)) => {
                if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                    return Err(FieldError::Argument(format!("histogram range {lo}..{hi} is not increasing")));
                }
                (lo, hi)
            }
            None => {
                let (lo, hi) = self
                    .valid_range()
                    .ok_or_else(|| FieldError::EmptyDomain("no valid voxels and no explicit range".into()))?;
                if lo < hi {
                    (lo, hi)
                } else {
                    let half = T::one().max(lo.abs()) * T::lit(0.5);
                    (lo - half, hi + half)
                }
            }
        };
        let nb = T::from_usize(bins).unwrap();
        let mut edges: Vec<T> = (0..bins).map(|k| lo + (hi - lo) * (T::from_usize(k).unwrap() / nb)).collect();
        edges.push(hi);
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(FieldError::Argument(format!("range {lo}..{hi} too narrow for {bins} bins")));
        }
        let mut counts = vec![0u64; bins];
        let mut total = 0u64;
        for (&v, _) in self.values.iter().zip(&self.mask).filter(|(_, &m)| m) {
            if !(v >= lo && v <= hi) {
                continue;
            }
            let guess = ((v - lo) / (hi - lo) * nb).floor().to_usize().unwrap_or(0);
            let mut k = guess.min(bins - 1);
            while k > 0 && v < edges[k] {
                k -= 1;
            }
            while k + 1 < bins && v >= edges[k + 1] {
                k += 1;
            }
            counts[k] += 1;
            total += 1;
        }
        Ok(Histogram { edges, counts, total })
    }

    pub fn stats(&self) -> FieldStats<T> {
        let mut count = 0usize;
        let mut sum = 0.0f64;
        let mut range: Option<(T, T)> = None;
        for (&v, _) in self.values.iter().zip(&self.mask).filter(|(_, &m)| m) {
            count += 1;
            sum += v.as_f64();
            range = Some(match range {
                None => (v, v),
                Some((lo, hi)) => (lo.min(v), hi.max(v)),
            });
        }
        FieldStats {
            min: range.map(|r| r.0),
            max: range.map(|r| r.1),
            mean: (count > 0).then(|| T::lit(sum / count as f64)),
            valid_count: count,
        }
    }

    /// Inverse of slicing: stacks equally shaped fields along a new axis at
    /// position `axis`.
    pub fn stack(parts: &[Self], axis: usize, axis_name: &str, spacing: T, origin: T) -> Result<Self> {
        let first = parts.first().ok_or_else(|| FieldError::Argument("nothing to stack".into()))?;
        if first.ndim() >= MAX_AXES {
            return Err(FieldError::Shape(format!("stacking would exceed {MAX_AXES} axes")));
        }
        if axis > first.ndim() {
            return Err(FieldError::Range { arg: "axis", value: axis, bound: first.ndim() + 1 });
        }
        if parts.iter().any(|p| p.dims != first.dims) {
            return Err(FieldError::Shape("stacked fields differ in shape".into()));
        }
        let inner: usize = first.dims[..axis].iter().product();
        let outer: usize = first.dims[axis..].iter().product();
        let mut values = Vec::with_capacity(first.len() * parts.len());
        let mut mask = Vec::with_capacity(first.len() * parts.len());
        for o in 0..outer {
            for p in parts {
                values.extend_from_slice(&p.values[o * inner..(o + 1) * inner]);
                mask.extend_from_slice(&p.mask[o * inner..(o + 1) * inner]);
            }
        }
        let mut dims = first.dims.clone();
        dims.insert(axis, parts.len());
        let mut sp = first.spacing.clone();
        sp.insert(axis, spacing);
        let mut org = first.origin.clone();
        org.insert(axis, origin);
        let mut names = first.axis_names.clone();
        names.insert(axis, axis_name.to_string());
        Self::new(dims, values)?
            .with_spacing(sp)?
            .with_origin(org)?
            .with_axis_names(names)?
            .with_mask(mask)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reducer {
    Sum,
    Mean,
    Max,
    Min,
}

impl Reducer {
    pub const ALL: [Reducer; 4] = [Reducer::Sum, Reducer::Mean, Reducer::Max, Reducer::Min];

    pub fn name(self) -> &'static str {
        match self {
            Reducer::Sum => "sum",
            Reducer::Mean => "mean",
            Reducer::Max => "max",
            Reducer::Min => "min",
        }
    }
}

impl fmt::Display for Reducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reducer {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self> {
        Reducer::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| FieldError::Argument(format!("unknown reducer: {s}; expected sum|mean|max|min")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    pub edges: Vec<T>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl<T: Real> Histogram<T> {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Index of the bin with the largest count (first on ties).
    pub fn modal_bin(&self) -> Option<usize> {
        let max = *self.counts.iter().max()?;
        self.counts.iter().position(|&c| c == max)
    }
}

/// Summary over valid voxels; `None` when there are none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldStats<T> {
    pub min: Option<T>,
    pub max: Option<T>,
    pub mean: Option<T>,
    pub valid_count: usize,
}
