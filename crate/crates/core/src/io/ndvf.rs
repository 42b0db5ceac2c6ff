//! NDVF container, little-endian throughout:
//!
//! ```text
//! "NDVF" | u32 version | u8 nAxes
//! per axis: u32 extent | f64 spacing | f64 origin | u8 nameLen | name
//! u8 dtype (0 = f32, 1 = f64) | u8 hasMask
//! values in storage order (axis 0 fastest)
//! if hasMask: one byte per voxel, 1 = valid
//! ```

use std::path::Path;

use super::{io_err, IoError, Result};
use crate::field::{ScalarField, MAX_AXES};
use crate::scalar::{Dtype, Real};

pub const NDVF_MAGIC: &[u8; 4] = b"NDVF";
pub const NDVF_VERSION: u32 = 1;
/// Largest voxel count accepted on read and write.
pub const MAX_VOXELS: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFileHeader {
    pub version: u32,
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub axis_names: Vec<String>,
    pub dtype: Dtype,
    pub has_mask: bool,
    /// Byte length of the header itself.
    pub header_len: usize,
}

impl FieldFileHeader {
    pub fn voxels(&self) -> usize {
        self.dims.iter().product()
    }

    /// Total file size the header implies.
    pub fn file_len(&self) -> usize {
        let n = self.voxels();
        self.header_len + n * self.dtype.size() + if self.has_mask { n } else { 0 }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let out = self.bytes.get(self.pos..end).ok_or(IoError::Truncated { expected: end, actual: self.bytes.len() })?;
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn parse_header(bytes: &[u8]) -> Result<FieldFileHeader> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(4).map_err(|_| IoError::BadMagic { found: bytes[..bytes.len().min(4)].to_vec() })?;
    if magic != NDVF_MAGIC {
        return Err(IoError::BadMagic { found: magic.to_vec() });
    }
    let version = r.u32()?;
    if version != NDVF_VERSION {
        return Err(IoError::UnsupportedVersion(version));
    }
    let n_axes = r.u8()? as usize;
    if n_axes == 0 || n_axes > MAX_AXES {
        return Err(IoError::Header(format!("{n_axes} axes (supported: 1 to {MAX_AXES})")));
    }
    let (mut dims, mut spacing, mut origin, mut axis_names) = (vec![], vec![], vec![], vec![]);
    for _ in 0..n_axes {
        dims.push(r.u32()? as usize);
        spacing.push(r.f64()?);
        origin.push(r.f64()?);
        let len = r.u8()? as usize;
        let name = std::str::from_utf8(r.take(len)?).map_err(|_| IoError::Header("axis name is not UTF-8".into()))?;
        axis_names.push(name.to_string());
    }
    let code = r.u8()?;
    let dtype = Dtype::from_code(code).ok_or(IoError::UnknownDtype(code))?;
    let has_mask = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(IoError::Header(format!("hasMask flag {other}"))),
    };
    let voxels = dims.iter().map(|&d| d as u128).product::<u128>();
    if voxels > MAX_VOXELS as u128 {
        return Err(IoError::TooLarge { voxels, limit: MAX_VOXELS });
    }
    Ok(FieldFileHeader { version, dims, spacing, origin, axis_names, dtype, has_mask, header_len: r.pos })
}

pub fn encode_field<T: Real>(field: &ScalarField<T>) -> Result<Vec<u8>> {
    if field.len() > MAX_VOXELS {
        return Err(IoError::TooLarge { voxels: field.len() as u128, limit: MAX_VOXELS });
    }
    let has_mask = !field.is_fully_valid();
    let mut out = Vec::with_capacity(64 + field.len() * (T::DTYPE.size() + 1));
    out.extend_from_slice(NDVF_MAGIC);
    out.extend_from_slice(&NDVF_VERSION.to_le_bytes());
    out.push(field.ndim() as u8);
    for a in 0..field.ndim() {
        let extent = u32::try_from(field.dims()[a])
            .map_err(|_| IoError::Argument(format!("extent {} does not fit u32", field.dims()[a])))?;
        out.extend_from_slice(&extent.to_le_bytes());
        out.extend_from_slice(&field.spacing()[a].as_f64().to_le_bytes());
        out.extend_from_slice(&field.origin()[a].as_f64().to_le_bytes());
        let name = field.axis_names()[a].as_bytes();
        let len = u8::try_from(name.len()).map_err(|_| IoError::Argument("axis name longer than 255 bytes".into()))?;
        out.push(len);
        out.extend_from_slice(name);
    }
    out.push(T::DTYPE.code());
    out.push(u8::from(has_mask));
    for &v in field.values() {
        v.write_le(&mut out);
    }
    if has_mask {
        out.extend(field.mask().iter().map(|&m| u8::from(m)));
    }
    Ok(out)
}

/// Decodes into scalar type `T`, converting from the stored dtype.
pub fn decode_field<T: Real>(bytes: &[u8]) -> Result<ScalarField<T>> {
    let h = parse_header(bytes)?;
    let expected = h.file_len();
    if bytes.len() < expected {
        return Err(IoError::Truncated { expected, actual: bytes.len() });
    }
    let n = h.voxels();
    let payload = &bytes[h.header_len..h.header_len + n * h.dtype.size()];
    let values: Vec<T> = match h.dtype {
        Dtype::F32 => payload
            .chunks_exact(4)
            .map(|c| T::lit(f32::from_le_bytes(c.try_into().unwrap()) as f64))
            .collect(),
        Dtype::F64 => payload.chunks_exact(8).map(|c| T::lit(f64::from_le_bytes(c.try_into().unwrap()))).collect(),
    };
    let mut field = ScalarField::new(h.dims.clone(), values)?
        .with_spacing(h.spacing.iter().map(|&s| T::lit(s)).collect())?
        .with_origin(h.origin.iter().map(|&o| T::lit(o)).collect())?
        .with_axis_names(h.axis_names.clone())?;
    if h.has_mask {
        let start = h.header_len + n * h.dtype.size();
        let mask = bytes[start..start + n].iter().map(|&b| b != 0).collect();
        field = field.with_mask(mask)?;
    }
    Ok(field)
}

pub fn read_header(path: &Path) -> Result<FieldFileHeader> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    parse_header(&bytes)
}

pub fn load_field<T: Real>(path: &Path) -> Result<ScalarField<T>> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    decode_field(&bytes)
}

pub fn save_field<T: Real>(field: &ScalarField<T>, path: &Path) -> Result<()> {
    let bytes = encode_field(field)?;
    std::fs::write(path, bytes).map_err(io_err(path))
}
