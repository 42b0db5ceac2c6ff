use super::canvas::to_byte;
use super::image::Image;
use super::tf::TransferFunction;
use super::{check_size, Result};
use crate::field::Histogram;
use crate::scalar::Real;

const LABEL_STRIP: usize = 8;
const STRIP_COLOR: [u8; 3] = [24, 24, 24];
const TEXT_COLOR: [u8; 3] = [235, 235, 235];
const BAR_COLOR: [u8; 3] = [200, 200, 200];
const PANEL_COLOR: [u8; 3] = [16, 16, 16];

/// 3x5 glyphs, one row per entry, bit 2 is the leftmost column.
fn glyph(c: char) -> Option<[u8; 5]> {
    Some(match c {
        '0' => [7, 5, 5, 5, 7],
        '1' => [2, 6, 2, 2, 7],
        '2' => [7, 1, 7, 4, 7],
        '3' => [7, 1, 7, 1, 7],
        '4' => [5, 5, 7, 1, 1],
        '5' => [7, 4, 7, 1, 7],
        '6' => [7, 4, 7, 5, 7],
        '7' => [7, 1, 1, 1, 1],
        '8' => [7, 5, 7, 5, 7],
        '9' => [7, 5, 7, 1, 7],
        '.' => [0, 0, 0, 0, 2],
        '-' => [0, 0, 7, 0, 0],
        '+' => [0, 2, 7, 2, 0],
        'e' => [0, 7, 7, 4, 7],
        ' ' => [0; 5],
        _ => return None,
    })
}

/// Pixel width of `text` at one pixel per font cell, 1 px letter spacing.
pub fn text_width(text: &str) -> usize {
    (4 * text.chars().count()).saturating_sub(1)
}

/// Draws `text` with its top-left corner at `(x0, y0)`; characters without a
/// glyph are skipped, pixels outside the image are clipped.
pub fn draw_text(img: &mut Image, text: &str, x0: usize, y0: usize, rgb: [u8; 3]) {
    for (k, c) in text.chars().enumerate() {
        let Some(rows) = glyph(c) else { continue };
        for (dy, bits) in rows.iter().enumerate() {
            for dx in 0..3 {
                if bits & (4 >> dx) == 0 {
                    continue;
                }
                let (x, y) = (x0 + 4 * k + dx, y0 + dy);
                if x < img.width && y < img.height {
                    img.set_pixel(x, y, [rgb[0], rgb[1], rgb[2], 255]);
                }
            }
        }
    }
}

fn label<T: Real>(v: T) -> String {
    format!("{:.2e}", v.as_f64())
}

/// Horizontal gradient over the color range of `tf`. Images at least 16 px
/// tall get an 8 px label strip with the minimum and maximum at the bottom.
pub fn colorbar_image<T: Real>(tf: &TransferFunction<T>, width: usize, height: usize) -> Result<Image> {
    check_size(width, height, 8)?;
    let (lo, hi) = tf.range();
    let with_labels = height >= 16;
    let bar_h = if with_labels { height - LABEL_STRIP } else { height };
    let mut img = Image::filled(width, height, STRIP_COLOR);
    for x in 0..width {
        let t = T::from_usize(x).unwrap() / T::from_usize(width - 1).unwrap();
        let c = tf.color(lo + (hi - lo) * t);
        let px = [to_byte(c[0].as_f64()), to_byte(c[1].as_f64()), to_byte(c[2].as_f64()), 255];
        for y in 0..bar_h {
            img.set_pixel(x, y, px);
        }
    }
    if with_labels {
        let y = bar_h + 2;
        let (a, b) = (label(lo), label(hi));
        draw_text(&mut img, &a, 1, y, TEXT_COLOR);
        if text_width(&a) + text_width(&b) + 4 <= width {
            draw_text(&mut img, &b, width - 1 - text_width(&b), y, TEXT_COLOR);
        }
    }
    Ok(img)
}

/// One bar per bin, scaled so the tallest bin spans the image height.
pub fn histogram_image<T: Real>(hist: &Histogram<T>, width: usize, height: usize) -> Result<Image> {
    check_size(width, height, 8)?;
    let mut img = Image::filled(width, height, PANEL_COLOR);
    let bins = hist.counts.len();
    let peak = hist.counts.iter().copied().max().unwrap_or(0);
    if peak == 0 {
        return Ok(img);
    }
    for (k, &count) in hist.counts.iter().enumerate() {
        let x0 = k * width / bins;
        let x1 = ((k + 1) * width / bins).max(x0 + 1).min(width);
        let bar = ((count as f64 / peak as f64) * height as f64).round() as usize;
        for y in height - bar..height {
            for x in x0..x1 {
                img.set_pixel(x, y, [BAR_COLOR[0], BAR_COLOR[1], BAR_COLOR[2], 255]);
            }
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::render::Palette;

    fn bar_height(img: &Image, x: usize) -> usize {
        (0..img.height).filter(|&y| img.pixel(x, y)[0] == BAR_COLOR[0]).count()
    }

    #[test]
    fn gray_colorbar_endpoints() {
        let tf = TransferFunction::from_palette(Palette::Gray, 0.0f64, 1.0, 1.0).unwrap();
        let img = colorbar_image(&tf, 64, 24).unwrap();
        assert_eq!(img.pixel(0, 0), [0, 0, 0, 255]);
        assert_eq!(img.pixel(63, 0), [255, 255, 255, 255]);
        assert_eq!(img.pixel(0, 15), [0, 0, 0, 255]);
        let labelled = (16..24).flat_map(|y| (0..64).map(move |x| (x, y))).any(|(x, y)| img.pixel(x, y)[0] == TEXT_COLOR[0]);
        assert!(labelled);
    }

    #[test]
    fn equal_counts_give_equal_bars() {
        let f = ScalarField::new(vec![4], vec![0.0f64, 0.0, 1.0, 1.0]).unwrap();
        let h = f.histogram(2, Some((0.0, 2.0))).unwrap();
        let img = histogram_image(&h, 16, 10).unwrap();
        assert_eq!(bar_height(&img, 2), 10);
        assert_eq!(bar_height(&img, 12), 10);
    }

    #[test]
    fn zero_bin_has_no_bar() {
        let f = ScalarField::new(vec![3], vec![0.0f64, 0.1, 2.9]).unwrap();
        let h = f.histogram(3, Some((0.0, 3.0))).unwrap();
        assert_eq!(h.counts, vec![2, 0, 1]);
        let img = histogram_image(&h, 30, 10).unwrap();
        assert_eq!(bar_height(&img, 15), 0);
        assert_eq!(bar_height(&img, 25), 5);
    }

    #[test]
    fn too_small_is_rejected() {
        let tf = TransferFunction::from_palette(Palette::Heat, 0.0f64, 1.0, 1.0).unwrap();
        assert!(colorbar_image(&tf, 7, 20).is_err());
    }

    #[test]
    fn every_label_character_has_a_glyph() {
        for v in [0.0f64, -1.5e-3, 0.02, 12345.0] {
            assert!(label(v).chars().all(|c| glyph(c).is_some()), "{}", label(v));
        }
    }
}
