use proptest::prelude::*;
use viz_core::geometry::{extract_cut_plane, field_bounds, marching_cubes, trilinear_sample, CutPlane, Sampler};
use viz_core::math::Vec3;
use viz_core::ScalarField;

fn volume() -> impl Strategy<Value = ScalarField<f64>> {
    prop::array::uniform3(2usize..7).prop_flat_map(|d| {
        let n = d[0] * d[1] * d[2];
        (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::array::uniform3(0.3f64..2.0),
            prop::array::uniform3(-4.0f64..4.0),
        )
            .prop_map(move |(values, s, o)| {
                ScalarField::new(d.to_vec(), values)
                    .unwrap()
                    .with_spacing(s.to_vec())
                    .unwrap()
                    .with_origin(o.to_vec())
                    .unwrap()
            })
    })
}

fn range(f: &ScalarField<f64>) -> (f64, f64) {
    f.valid_range().unwrap()
}

/// Whether `p` lies on a face of the lattice box, within `tol`.
fn on_boundary(f: &ScalarField<f64>, p: Vec3<f64>, tol: f64) -> bool {
    let b = field_bounds(f).unwrap();
    (0..3).any(|a| (p[a] - b.min[a]).abs() <= tol || (p[a] - b.max[a]).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mesh_vertices_resample_to_the_isovalue(f in volume(), t in 0.05f64..0.95) {
        let (lo, hi) = range(&f);
        let iso = lo + (hi - lo) * t;
        let mesh = marching_cubes(&f, iso).unwrap();
        let sampler = Sampler::new(&f).unwrap();
        for i in 0..mesh.vertex_count() {
            let s = sampler.sample(mesh.vertex(i));
            prop_assert!(s.valid);
            prop_assert!((s.value - iso).abs() <= 1e-6 * (hi - lo), "{} vs {}", s.value, iso);
        }
    }

    #[test]
    fn interior_edges_have_two_triangles(f in volume(), t in 0.05f64..0.95) {
        let (lo, hi) = range(&f);
        let mesh = marching_cubes(&f, lo + (hi - lo) * t).unwrap().weld(0.0);
        let tol = 1e-9 * (1.0 + field_bounds(&f).unwrap().diagonal());
        for ((a, b), n) in mesh.edge_use_counts() {
            if n == 2 {
                continue;
            }
            let (pa, pb) = (mesh.vertex(a as usize), mesh.vertex(b as usize));
            prop_assert!(n == 1, "edge used {} times", n);
            // An open edge lies in one face of the lattice box.
            let b = field_bounds(&f).unwrap();
            let shared_face = (0..3).any(|ax| {
                ((pa[ax] - b.min[ax]).abs() <= tol && (pb[ax] - b.min[ax]).abs() <= tol)
                    || ((pa[ax] - b.max[ax]).abs() <= tol && (pb[ax] - b.max[ax]).abs() <= tol)
            });
            prop_assert!(shared_face && on_boundary(&f, pa, tol), "open interior edge {:?} {:?}", pa, pb);
        }
    }

    #[test]
    fn translating_the_origin_translates_the_mesh(f in volume(), t in 0.1f64..0.9, d in prop::array::uniform3(-10.0f64..10.0)) {
        let (lo, hi) = range(&f);
        let iso = lo + (hi - lo) * t;
        let shift = Vec3::from(d);
        let moved = f.clone().with_origin(f.origin().iter().zip(d).map(|(o, d)| o + d).collect()).unwrap();
        let a = marching_cubes(&f, iso).unwrap();
        let b = marching_cubes(&moved, iso).unwrap();
        prop_assert_eq!(a.triangles.clone(), b.triangles.clone());
        for i in 0..a.vertex_count() {
            let e = (a.vertex(i) + shift) - b.vertex(i);
            prop_assert!(e.norm() <= 1e-12 * (1.0 + d.iter().map(|x| x.abs()).sum::<f64>()));
        }
        if !a.is_empty() {
            let (ba, bb) = (a.bounding_box().unwrap().translated(shift), b.bounding_box().unwrap());
            prop_assert!((ba.min - bb.min).norm() < 1e-9 && (ba.max - bb.max).norm() < 1e-9);
        }
        let (fa, fb) = (field_bounds(&f).unwrap().translated(shift), field_bounds(&moved).unwrap());
        prop_assert!((fa.min - fb.min).norm() < 1e-9 && (fa.max - fb.max).norm() < 1e-9);
    }

    #[test]
    fn cut_planes_never_interpolate_masked_voxels(
        f in volume(),
        cut in 0.0f64..1.0,
        axis in 0usize..3,
        keep in 0.2f64..0.8,
        res in 1.0f64..6.0,
    ) {
        let (lo, hi) = range(&f);
        let filtered = f.filter_range(Some(lo + (hi - lo) * (1.0 - keep)), None).unwrap();
        let b = field_bounds(&f).unwrap();
        let plane = CutPlane::axis(axis, b.min[axis] + (b.max[axis] - b.min[axis]) * cut).unwrap();
        let full = extract_cut_plane(&f, &plane, res).unwrap();
        let cutout = extract_cut_plane(&filtered, &plane, res).unwrap();
        prop_assert_eq!(full.frame, cutout.frame);
        let (d, s, o) = (f.dims(), f.spacing(), f.origin());
        for j in 0..full.height {
            for i in 0..full.width {
                let p = full.world(i, j);
                // Lattice voxels with nonzero trilinear weight at p.
                let spans: Vec<Vec<usize>> = (0..3)
                    .map(|a| {
                        let c = ((p[a] - o[a]) / s[a]).clamp(0.0, (d[a] - 1) as f64);
                        let (fl, ce) = (c.floor() as usize, c.ceil() as usize);
                        if fl == ce { vec![fl] } else { vec![fl, ce] }
                    })
                    .collect();
                let touches_masked = spans[0].iter().any(|&x| {
                    spans[1].iter().any(|&y| spans[2].iter().any(|&z| !filtered.is_valid(&[x, y, z])))
                });
                match cutout.get(i, j) {
                    Some(v) => {
                        prop_assert_eq!(Some(v), full.get(i, j));
                        prop_assert!(!touches_masked);
                    }
                    None => prop_assert!(touches_masked || full.get(i, j).is_none()),
                }
            }
        }
    }
}

#[test]
fn sphere_mesh_area_is_close_to_analytic() {
    let n = 32;
    let c = (n - 1) as f64 / 2.0;
    let r = 10.0;
    let f = ScalarField::from_fn(vec![n, n, n], |i| {
        let p = [i[0] as f64 - c, i[1] as f64 - c, i[2] as f64 - c];
        (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
    })
    .unwrap();
    let mesh = marching_cubes(&f, r).unwrap();
    let expect = 4.0 * std::f64::consts::PI * r * r;
    assert!((mesh.area() - expect).abs() / expect < 0.05, "{} vs {expect}", mesh.area());
    let s = trilinear_sample(&f, mesh.vertex(0)).unwrap();
    assert!(s.valid);
}
