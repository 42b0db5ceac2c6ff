use super::image::Image;

/// Floating-point render target: premultiplied color, coverage and
/// camera-space depth (distance along the view direction).
#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<[f64; 3]>,
    pub alpha: Vec<f64>,
    pub depth: Vec<f64>,
}

impl Canvas {
    pub fn new(width: usize, height: usize) -> Self {
        let n = width * height;
        Self { width, height, rgb: vec![[0.0; 3]; n], alpha: vec![0.0; n], depth: vec![f64::INFINITY; n] }
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Color over `background`, premultiplied, in `[0, 1]`.
    pub fn composited(&self, i: usize, background: [f64; 3]) -> [f64; 3] {
        let a = self.alpha[i];
        std::array::from_fn(|c| (self.rgb[i][c] + (1.0 - a) * background[c]).clamp(0.0, 1.0))
    }

    /// Opaque 8-bit image with the canvas composited over `background`.
    pub fn to_image(&self, background: [f64; 3]) -> Image {
        let mut pixels = Vec::with_capacity(4 * self.width * self.height);
        for i in 0..self.width * self.height {
            let c = self.composited(i, background);
            pixels.extend_from_slice(&[to_byte(c[0]), to_byte(c[1]), to_byte(c[2]), 255]);
        }
        Image { width: self.width, height: self.height, pixels }
    }

    /// Number of pixels with coverage above `threshold`.
    pub fn covered(&self, threshold: f64) -> usize {
        self.alpha.iter().filter(|&&a| a > threshold).count()
    }
}

pub(crate) fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub(crate) fn to_unit(rgb: [u8; 3]) -> [f64; 3] {
    rgb.map(|v| v as f64 / 255.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_canvas_is_background() {
        let c = Canvas::new(3, 2);
        let img = c.to_image([0.0, 0.5, 1.0]);
        assert_eq!(img.pixel(2, 1), [0, 128, 255, 255]);
        assert_eq!(c.covered(0.0), 0);
    }
}
