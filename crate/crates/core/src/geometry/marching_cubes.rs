use super::tables::{CORNER_OFFSETS, EDGE_CORNERS, TRIANGLES};
use super::{lattice_point, require_3d, GeometryError, Result, TriangleMesh};
use crate::field::ScalarField;
use crate::scalar::Real;

/// Extracts the `isovalue` surface of a 3D field.
///
/// Cells are visited in storage order (x fastest). A cell with any masked
/// corner is skipped. Each cell emits its own vertices; see
/// [`TriangleMesh::weld`] to share them. Triangles wind counter-clockwise
/// when seen from the side of larger values, so face normals follow the
/// field gradient.
pub fn marching_cubes<T: Real>(field: &ScalarField<T>, isovalue: T) -> Result<TriangleMesh<T>> {
    require_3d(field)?;
    let d = field.dims();
    if d.iter().any(|&n| n < 2) {
        return Err(GeometryError::TooSmall(d.to_vec()));
    }
    let (nx, ny, nz) = (d[0], d[1], d[2]);
    let values = field.values();
    let mask = field.mask();
    let offset = |i: usize, j: usize, k: usize| i + nx * (j + ny * k);

    let mut mesh = TriangleMesh::new();
    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let corner_off: [usize; 8] =
                    CORNER_OFFSETS.map(|[a, b, c]| offset(i + a, j + b, k + c));
                if corner_off.iter().any(|&o| !mask[o]) {
                    continue;
                }
                let v = corner_off.map(|o| values[o]);
                let mut case = 0usize;
                for (c, &val) in v.iter().enumerate() {
                    if val < isovalue {
                        case |= 1 << c;
                    }
                }
                if case == 0 || case == 255 {
                    continue;
                }
                let mut edge_vertex = [u32::MAX; 12];
                for (e, slot) in edge_vertex.iter_mut().enumerate() {
                    let [c0, c1] = EDGE_CORNERS[e];
                    if ((case >> c0) & 1) == ((case >> c1) & 1) {
                        continue;
                    }
                    // interpolate from the lattice-lower endpoint so both
                    // cells sharing the edge compute identical vertices
                    let (a, b) = if corner_off[c0] < corner_off[c1] { (c0, c1) } else { (c1, c0) };
                    let pa = {
                        let o = CORNER_OFFSETS[a];
                        lattice_point(field, i + o[0], j + o[1], k + o[2])
                    };
                    let pb = {
                        let o = CORNER_OFFSETS[b];
                        lattice_point(field, i + o[0], j + o[1], k + o[2])
                    };
                    let t = (isovalue - v[a]) / (v[b] - v[a]);
                    let p = pa + (pb - pa) * t;
                    let s = v[a] + (v[b] - v[a]) * t;
                    *slot = mesh.push_vertex(p, s);
                }
                for tri in TRIANGLES[case].chunks(3).take_while(|t| t[0] >= 0) {
                    // the table winds towards the low side; reverse it
                    mesh.push_triangle([
                        edge_vertex[tri[0] as usize],
                        edge_vertex[tri[2] as usize],
                        edge_vertex[tri[1] as usize],
                    ]);
                }
            }
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::trilinear_sample;
    use crate::math::Vec3;

    fn hot_corner() -> ScalarField<f64> {
        ScalarField::from_fn(vec![2, 2, 2], |i| if i == [0, 0, 0] { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn no_crossing_gives_empty_mesh() {
        let f = hot_corner();
        assert!(marching_cubes(&f, 2.0).unwrap().is_empty());
        assert!(marching_cubes(&f, -1.0).unwrap().is_empty());
    }

    #[test]
    fn single_hot_corner_gives_one_triangle_at_edge_midpoints() {
        let m = marching_cubes(&hot_corner(), 0.5).unwrap();
        assert_eq!(m.triangle_count(), 1);
        let mut pts: Vec<[f64; 3]> = m.triangle_points(0).iter().map(|p| p.to_array()).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts, vec![[0.0, 0.0, 0.5], [0.0, 0.5, 0.0], [0.5, 0.0, 0.0]]);
        assert!(m.vertex_scalars.iter().all(|&s| s == 0.5));
    }

    #[test]
    fn normal_points_up_the_gradient() {
        // the single triangle faces the hot corner
        let m = marching_cubes(&hot_corner(), 0.5).unwrap();
        let n = m.face_normal(0);
        assert!(n.dot(Vec3::new(-1.0, -1.0, -1.0)) > 0.0);
    }

    #[test]
    fn masked_cells_are_skipped() {
        let mut mask = vec![true; 8];
        mask[5] = false;
        let f = hot_corner().with_mask(mask).unwrap();
        assert!(marching_cubes(&f, 0.5).unwrap().is_empty());
    }

    #[test]
    fn rejects_thin_fields() {
        let f = ScalarField::constant(vec![1, 3, 3], 0.0f64).unwrap();
        assert!(matches!(marching_cubes(&f, 0.5), Err(GeometryError::TooSmall(_))));
    }

    #[test]
    fn vertices_resample_to_isovalue() {
        let f = ScalarField::from_fn(vec![6, 5, 7], |i| {
            let (x, y, z) = (i[0] as f64, i[1] as f64, i[2] as f64);
            (x - 2.5).powi(2) + 0.5 * (y - 2.0).powi(2) + (z - 3.1).powi(2)
        })
        .unwrap();
        let m = marching_cubes(&f, 4.0).unwrap();
        assert!(!m.is_empty());
        for v in 0..m.vertex_count() {
            let s = trilinear_sample(&f, m.vertex(v)).unwrap();
            assert!(s.valid);
            assert!((s.value - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn bounds_of_the_single_triangle() {
        let m = marching_cubes(&hot_corner(), 0.5).unwrap();
        let b = m.bounding_box().unwrap();
        assert_eq!(b.min, Vec3::zero());
        assert_eq!(b.max, Vec3::splat(0.5));
    }
}
