use std::io::Write;

use super::{RenderError, Result};

/// Largest composite the renderer will produce.
pub const MAX_COMPOSITE: (usize, usize) = (3840, 2400);

/// 8-bit RGBA raster, row-major with a top-left origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(4 * width * height);
        for _ in 0..width * height {
            pixels.extend_from_slice(&[rgb[0], rgb[1], rgb[2], 255]);
        }
        Self { width, height, pixels }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 4] {
        let i = 4 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2], self.pixels[i + 3]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgba: [u8; 4]) {
        let i = 4 * (y * self.width + x);
        self.pixels[i..i + 4].copy_from_slice(&rgba);
    }

    /// Copies `src` with its top-left corner at `(x0, y0)`, clipping at the edges.
    pub fn blit(&mut self, src: &Image, x0: usize, y0: usize) {
        for y in 0..src.height.min(self.height.saturating_sub(y0)) {
            let w = src.width.min(self.width.saturating_sub(x0));
            let s = 4 * y * src.width;
            let d = 4 * ((y0 + y) * self.width + x0);
            self.pixels[d..d + 4 * w].copy_from_slice(&src.pixels[s..s + 4 * w]);
        }
    }

    /// RGB bytes with alpha composited over `background`.
    pub fn rgb_over(&self, background: [u8; 3]) -> Vec<u8> {
        let mut out = Vec::with_capacity(3 * self.width * self.height);
        for px in self.pixels.chunks_exact(4) {
            let a = px[3] as u32;
            for c in 0..3 {
                let v = (px[c] as u32 * a + background[c] as u32 * (255 - a) + 127) / 255;
                out.push(v as u8);
            }
        }
        out
    }

    /// Binary PPM: `P6\n<w> <h>\n255\n` followed by RGB bytes.
    pub fn to_ppm(&self, background: [u8; 3]) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb_over(background));
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self> {
        let bad = || RenderError::Argument("malformed PPM".into());
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad());
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?.to_string());
        }
        pos += 1;
        if fields[0] != "P6" || fields[3] != "255" {
            return Err(bad());
        }
        let w: usize = fields[1].parse().map_err(|_| bad())?;
        let h: usize = fields[2].parse().map_err(|_| bad())?;
        let rgb = bytes.get(pos..pos + 3 * w * h).ok_or_else(bad)?;
        let mut pixels = Vec::with_capacity(4 * w * h);
        for c in rgb.chunks_exact(3) {
            pixels.extend_from_slice(&[c[0], c[1], c[2], 255]);
        }
        Ok(Self { width: w, height: h, pixels })
    }

    pub fn write_png<W: Write>(&self, out: W) -> Result<()> {
        let mut enc = png::Encoder::new(out, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| RenderError::Encode(e.to_string()))?;
        writer.write_image_data(&self.pixels).map_err(|e| RenderError::Encode(e.to_string()))?;
        writer.finish().map_err(|e| RenderError::Encode(e.to_string()))
    }

    pub fn count_where(&self, mut pred: impl FnMut([u8; 4]) -> bool) -> usize {
        self.pixels.chunks_exact(4).filter(|p| pred([p[0], p[1], p[2], p[3]])).count()
    }
}

/// Places each tile at `(col * cell_w, row * cell_h)`; unfilled cells keep
/// the background.
pub fn composite_views(
    tiles: &[(Image, (usize, usize))],
    rows: usize,
    cols: usize,
    cell_size: (usize, usize),
    background: [u8; 3],
) -> Result<Image> {
    let (cw, ch) = cell_size;
    let (w, h) = (cols * cw, rows * ch);
    if w == 0 || h == 0 {
        return Err(RenderError::Size(format!("empty composite {w}x{h}")));
    }
    if w > MAX_COMPOSITE.0 || h > MAX_COMPOSITE.1 {
        return Err(RenderError::Size(format!(
            "composite {w}x{h} exceeds the {}x{} maximum",
            MAX_COMPOSITE.0, MAX_COMPOSITE.1
        )));
    }
    let mut out = Image::filled(w, h, background);
    for (img, (row, col)) in tiles {
        if *row >= rows || *col >= cols {
            return Err(RenderError::Size(format!("cell ({row}, {col}) outside a {rows}x{cols} layout")));
        }
        if img.width > cw || img.height > ch {
            return Err(RenderError::Size(format!(
                "tile {}x{} does not fit a {cw}x{ch} cell",
                img.width, img.height
            )));
        }
        out.blit(img, col * cw, row * ch);
    }
    Ok(out)
}
