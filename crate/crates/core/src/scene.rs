//! Per-view rendering and the multiview composite.
//!
//! A view renders through the shared camera translated by its layout base, so
//! every tile shows its own object from the same viewpoint. Geometry goes into
//! the canvas first and the volume is ray cast behind it, clipped by depth.

use crate::geometry::{extract_cut_plane, SliceImage, TriangleMesh};
use crate::render::{
    colorbar_image, composite_views, histogram_image, raycast_into, rasterize_mesh_into, Canvas, Image, MeshShading,
    MeshStyle, RenderError, TransferFunction, VolumeStyle, MAX_COMPOSITE,
};
use crate::session::{Result, Session, SessionError, View};

/// Tile and composite background.
pub const BACKGROUND: [u8; 3] = [0, 0, 0];

/// Ray-march step as a fraction of the finest voxel spacing.
pub const STEP_FRACTION: f64 = 0.5;

const INSET_MIN: usize = 64;

fn min_spacing(v: &View) -> f64 {
    v.data.spacing().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Quads between neighboring valid samples, colored through `tf`.
fn cut_quads(slice: &SliceImage<f64>, tf: &TransferFunction<f64>) -> (TriangleMesh<f64>, Vec<[f64; 3]>) {
    let mut mesh = TriangleMesh::new();
    let mut colors = Vec::new();
    let mut ids = vec![None; slice.width * slice.height];
    for j in 0..slice.height {
        for i in 0..slice.width {
            if let Some(s) = slice.get(i, j) {
                ids[j * slice.width + i] = Some(mesh.push_vertex(slice.world(i, j), s));
                colors.push(tf.color(s));
            }
        }
    }
    for j in 0..slice.height.saturating_sub(1) {
        for i in 0..slice.width.saturating_sub(1) {
            let at = |di: usize, dj: usize| ids[(j + dj) * slice.width + i + di];
            if let (Some(a), Some(b), Some(c), Some(d)) = (at(0, 0), at(1, 0), at(1, 1), at(0, 1)) {
                mesh.push_triangle([a, b, c]);
                mesh.push_triangle([a, c, d]);
            }
        }
    }
    (mesh, colors)
}

fn byte(c: f64) -> u8 {
    (c.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Renders one view: cut planes, isosurfaces, the volume, then insets.
pub fn render_view(session: &Session, view_id: u32, width: usize, height: usize) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(RenderError::Size(format!("{width}x{height} tile")).into());
    }
    let v = session.view(view_id)?;
    let camera = v.camera_for(session.camera());
    let placement = v.placement();
    let spacing = min_spacing(v);
    let mut canvas = Canvas::new(width, height);
    for plane in &v.cut_planes {
        let slice = extract_cut_plane(&v.data, plane, 1.0 / spacing)?;
        let (mesh, colors) = cut_quads(&slice, &v.tf);
        if mesh.triangle_count() > 0 {
            rasterize_mesh_into(&mut canvas, &mesh, &camera, &placement, &MeshStyle::unlit(), Some(&colors))?;
        }
    }
    for (level, mesh) in v.iso_meshes()? {
        if mesh.triangle_count() > 0 {
            let style = MeshStyle { color: v.tf.color(level), shading: MeshShading::Lambert };
            rasterize_mesh_into(&mut canvas, &mesh, &camera, &placement, &style, None)?;
        }
    }
    if v.show_volume {
        let style = VolumeStyle::new(STEP_FRACTION * spacing, BACKGROUND)?;
        raycast_into(&mut canvas, &v.data, &v.tf, &camera, &style, &placement)?;
    }
    let mut img = canvas.to_image(BACKGROUND.map(|c| c as f64 / 255.0));
    if width >= INSET_MIN && height >= INSET_MIN {
        if v.show_colorbar {
            let bar = colorbar_image(&v.tf, width / 2, (height / 12).max(16))?;
            img.blit(&bar, width / 4, height - bar.height - 2);
        }
        if v.show_histogram {
            let hist = v.data.histogram(v.hist_bins, None)?;
            let panel = histogram_image(&hist, width / 3, height / 4)?;
            img.blit(&panel, 2, 2);
        }
    }
    Ok(img)
}

/// Cell size of each tile when the grid fills `size`.
pub fn cell_size(session: &Session, size: (usize, usize)) -> (usize, usize) {
    let rows = session.rows().max(1);
    (size.0 / session.layout().cols, size.1 / rows)
}

/// Every view rendered into its grid cell of a `size` canvas. Cells are
/// `size / (cols, rows)`; leftover pixels stay background.
pub fn render_snapshot(session: &Session, size: (usize, usize)) -> Result<Image> {
    let (w, h) = size;
    if w == 0 || h == 0 || w > MAX_COMPOSITE.0 || h > MAX_COMPOSITE.1 {
        return Err(SessionError::Render(RenderError::Size(format!(
            "snapshot {w}x{h} outside 1x1..{}x{}",
            MAX_COMPOSITE.0, MAX_COMPOSITE.1
        ))));
    }
    let cols = session.layout().cols;
    let rows = session.rows().max(1);
    let (cw, ch) = cell_size(session, size);
    let mut out = Image::filled(w, h, BACKGROUND);
    if cw == 0 || ch == 0 {
        return Err(RenderError::Size(format!("{w}x{h} is too small for a {cols}x{rows} grid")).into());
    }
    let tiles = session
        .views()
        .iter()
        .map(|v| Ok((render_view(session, v.id, cw, ch)?, v.cell)))
        .collect::<Result<Vec<_>>>()?;
    let grid = composite_views(&tiles, rows, cols, (cw, ch), BACKGROUND)?;
    out.blit(&grid, 0, 0);
    Ok(out)
}

/// Opaque RGB bytes of one view, the payload of a volume frame.
pub fn view_frame_rgb(session: &Session, view_id: u32, width: usize, height: usize) -> Result<Vec<u8>> {
    Ok(render_view(session, view_id, width, height)?.rgb_over(BACKGROUND))
}

/// Color of an isosurface at `level` for display clients.
pub fn iso_color(view: &View, level: f64) -> [u8; 3] {
    view.tf.color(level).map(byte)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{Derivation, Provenance};
    use crate::viewlang::{parse, run_script, EvalContext};

    fn scenario(lines: &str) -> Session {
        let out = run_script(&Session::new(), lines, &EvalContext::new(std::env::temp_dir()));
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        out.session
    }

    fn lit(img: &Image) -> usize {
        img.count_where(|p| p[0] > 8 || p[1] > 8 || p[2] > 8)
    }

    #[test]
    fn view_renders_something_centered() {
        let s = scenario("synth meteorite dims=24x24x24 seed=3 as m\nview add m\n");
        let img = render_view(&s, 0, 64, 48).unwrap();
        assert_eq!((img.width, img.height), (64, 48));
        assert!(lit(&img) > 100);
        assert!(img.pixel(32, 24)[..3].iter().any(|&c| c > 8));
        assert_eq!(img.pixel(0, 0), [0, 0, 0, 255]);
    }

    #[test]
    fn geometry_layers_add_pixels() {
        let base = scenario("synth meteorite dims=24x24x24 seed=3 as m\nview add m\n");
        let mut hidden = base.clone();
        hidden.set_show_volume(0, false).unwrap();
        assert_eq!(lit(&render_view(&hidden, 0, 48, 48).unwrap()), 0);
        let (with_cut, _) = crate::viewlang::evaluate(&hidden, &parse("cut add view=0 axis=z").unwrap(), &EvalContext::default()).unwrap();
        assert!(lit(&render_view(&with_cut, 0, 48, 48).unwrap()) > 50);
        let (with_iso, _) =
            crate::viewlang::evaluate(&hidden, &parse("iso add view=0 level=0.01").unwrap(), &EvalContext::default()).unwrap();
        assert!(lit(&render_view(&with_iso, 0, 48, 48).unwrap()) > 20);
    }

    #[test]
    fn snapshot_places_tiles_by_cell() {
        let mut s = Session::new();
        let f = crate::io::synth_meteorite_phantom(&[16, 16, 16], 1).unwrap();
        s.insert_dataset("m", f, Provenance::Load { path: "m".into(), name: "m".into() }).unwrap();
        s.add_view("m", Derivation::None, Some((0, 2))).unwrap();
        let img = render_snapshot(&s, (160, 40)).unwrap();
        let tile = render_view(&s, 0, 40, 40).unwrap();
        for y in 0..40 {
            for x in 0..40 {
                assert_eq!(img.pixel(80 + x, y), tile.pixel(x, y));
                assert_eq!(img.pixel(x, y), [0, 0, 0, 255]);
            }
        }
        assert!(render_snapshot(&s, (5000, 40)).is_err());
        assert!(render_view(&s, 9, 10, 10).is_err());
    }

    #[test]
    fn insets_draw_when_enabled() {
        let s = scenario("synth meteorite dims=16x16x16 seed=2 as m\nview add m\ncolorbar show view=0\nhist show view=0\n");
        let plain = scenario("synth meteorite dims=16x16x16 seed=2 as m\nview add m\n");
        assert_ne!(render_view(&s, 0, 96, 96).unwrap(), render_view(&plain, 0, 96, 96).unwrap());
        assert_eq!(iso_color(&s.views()[0], f64::MAX), [255, 0, 0]);
    }
}
