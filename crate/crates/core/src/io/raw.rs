use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{io_err, IoError, Result, MAX_VOXELS};
use crate::field::{ScalarField, MAX_AXES};

/// Element types accepted for headerless raw volumes, little-endian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawDtype {
    F32,
    F64,
    U8,
    U16,
    I16,
}

impl RawDtype {
    pub fn size(self) -> usize {
        match self {
            RawDtype::U8 => 1,
            RawDtype::U16 | RawDtype::I16 => 2,
            RawDtype::F32 => 4,
            RawDtype::F64 => 8,
        }
    }

    fn decode(self, b: &[u8]) -> f64 {
        match self {
            RawDtype::U8 => b[0] as f64,
            RawDtype::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            RawDtype::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            RawDtype::F32 => f32::from_le_bytes(b.try_into().unwrap()) as f64,
            RawDtype::F64 => f64::from_le_bytes(b.try_into().unwrap()),
        }
    }
}

impl FromStr for RawDtype {
    type Err = IoError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "f32" => RawDtype::F32,
            "f64" => RawDtype::F64,
            "u8" => RawDtype::U8,
            "u16" => RawDtype::U16,
            "i16" => RawDtype::I16,
            _ => return Err(IoError::Argument(format!("unknown dtype {s}; expected f32|f64|u8|u16|i16"))),
        })
    }
}

/// Which axis varies fastest in the raw file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxisOrder {
    #[default]
    FirstFastest,
    LastFastest,
}

impl FromStr for AxisOrder {
    type Err = IoError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-fastest" | "xyz" | "f" => Ok(AxisOrder::FirstFastest),
            "last-fastest" | "zyx" | "c" => Ok(AxisOrder::LastFastest),
            _ => Err(IoError::Argument(format!("unknown axis order {s}; expected first-fastest|last-fastest"))),
        }
    }
}

impl fmt::Display for AxisOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxisOrder::FirstFastest => "first-fastest",
            AxisOrder::LastFastest => "last-fastest",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawSpec {
    pub dims: Vec<usize>,
    pub dtype: RawDtype,
    pub spacing: Option<Vec<f64>>,
    pub order: AxisOrder,
}

/// Reads a headerless volume; the byte count must match `dims` exactly.
pub fn import_raw(path: &Path, spec: &RawSpec) -> Result<ScalarField<f64>> {
    if spec.dims.is_empty() || spec.dims.len() > MAX_AXES {
        return Err(IoError::Argument(format!("{} axes (supported: 1 to {MAX_AXES})", spec.dims.len())));
    }
    let voxels = spec.dims.iter().map(|&d| d as u128).product::<u128>();
    if voxels > MAX_VOXELS as u128 {
        return Err(IoError::TooLarge { voxels, limit: MAX_VOXELS });
    }
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let n = voxels as usize;
    let expected = n * spec.dtype.size();
    if bytes.len() != expected {
        return Err(IoError::Truncated { expected, actual: bytes.len() });
    }
    let raw: Vec<f64> = bytes.chunks_exact(spec.dtype.size()).map(|c| spec.dtype.decode(c)).collect();
    let field = match spec.order {
        AxisOrder::FirstFastest => ScalarField::new(spec.dims.clone(), raw)?,
        AxisOrder::LastFastest => {
            let d = &spec.dims;
            ScalarField::from_fn(d.clone(), |idx| {
                let mut k = 0;
                for a in 0..d.len() {
                    k = k * d[a] + idx[a];
                }
                raw[k]
            })?
        }
    };
    Ok(match &spec.spacing {
        Some(s) => field.with_spacing(s.clone())?,
        None => field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u16_first_and_last_fastest() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.raw");
        let vals: Vec<u16> = (0..6).collect();
        std::fs::write(&p, vals.iter().flat_map(|v| v.to_le_bytes()).collect::<Vec<u8>>()).unwrap();
        let spec = RawSpec { dims: vec![2, 3], dtype: RawDtype::U16, spacing: None, order: AxisOrder::FirstFastest };
        let f = import_raw(&p, &spec).unwrap();
        assert_eq!(f.get(&[1, 2]), 5.0);
        let c = import_raw(&p, &RawSpec { order: AxisOrder::LastFastest, ..spec.clone() }).unwrap();
        // row-major [2][3]: element (i, j) sits at 3 * i + j
        assert_eq!(c.get(&[1, 0]), 3.0);
        assert_eq!(c.get(&[0, 2]), 2.0);
        let short = RawSpec { dims: vec![7], ..spec };
        assert!(matches!(import_raw(&p, &short), Err(IoError::Truncated { expected: 14, actual: 12 })));
    }

    #[test]
    fn parses_flags() {
        assert_eq!("i16".parse::<RawDtype>().unwrap(), RawDtype::I16);
        assert!("f16".parse::<RawDtype>().is_err());
        assert_eq!("last-fastest".parse::<AxisOrder>().unwrap(), AxisOrder::LastFastest);
    }
}
