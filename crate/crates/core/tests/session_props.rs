use proptest::prelude::*;
use viz_core::math::Vec3;
use viz_core::session::{Mode, PointerEvent, PointerKind, Session};
use viz_core::viewlang::{run_script, EvalContext};

fn session() -> Session {
    let out = run_script(
        &Session::new(),
        "synth qcd_lumps dims=6x5x4x3 lumps=2 seed=4 as q\n\
         slice q axis=t index=0..2 as s\n\
         synth meteorite dims=7x7x9 seed=2 as m\n\
         view add s0\nview add s1\nview add m\nview add s2\nview add m\n",
        &EvalContext::new(std::env::temp_dir()),
    );
    assert!(out.errors.is_empty(), "{:?}", out.errors);
    out.session
}

/// World position of each view's pivot.
fn pivots(s: &Session) -> Vec<Vec3<f64>> {
    s.views().iter().map(|v| v.placement().apply(v.object_origin - v.base_position)).collect()
}

#[derive(Debug, Clone)]
enum Step {
    Mode(Mode),
    Drag(PointerKind, f64, f64, Option<u32>),
}

fn kind() -> impl Strategy<Value = PointerKind> {
    prop::sample::select(vec![PointerKind::RotateDrag, PointerKind::PanDrag, PointerKind::ZoomDrag])
}

fn step(modes: Vec<Mode>, kinds: impl Strategy<Value = PointerKind>) -> impl Strategy<Value = Step> {
    prop_oneof![
        1 => prop::sample::select(modes).prop_map(Step::Mode),
        8 => (kinds, -0.5f64..0.5, -0.5f64..0.5, prop::option::of(0u32..5))
            .prop_map(|(k, dx, dy, t)| Step::Drag(k, dx, dy, t)),
    ]
}

fn apply(s: &mut Session, st: &Step) {
    match *st {
        Step::Mode(m) => {
            s.set_mode(m);
        }
        Step::Drag(kind, dx, dy, target_view) => {
            let before = s.clone();
            match s.handle_pointer(&PointerEvent { kind, dx, dy, target_view }) {
                Ok(_) => {}
                Err(_) => assert_eq!(*s, before),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn modes_touch_only_their_own_state(steps in prop::collection::vec(step(Mode::ALL.to_vec(), kind()), 1..200)) {
        let mut s = session();
        let origins: Vec<_> = s.views().iter().map(|v| v.object_origin).collect();
        for st in &steps {
            let before = s.clone();
            apply(&mut s, st);
            if let Step::Drag(..) = st {
                match s.mode() {
                    Mode::Camera => prop_assert_eq!(s.views(), before.views()),
                    Mode::Object | Mode::Sync => prop_assert_eq!(s.camera(), before.camera()),
                }
            }
            for (v, o) in s.views().iter().zip(&origins) {
                prop_assert_eq!(v.base_position[2], 0.0);
                prop_assert_eq!(v.object_origin, *o);
            }
        }
        prop_assert_eq!(s.world_assembly().unwrap(), s.clone().world_assembly().unwrap());
    }

    #[test]
    fn sync_rotation_keeps_pivots_and_equal_rotations(
        steps in prop::collection::vec(step(vec![Mode::Camera, Mode::Sync], Just(PointerKind::RotateDrag)), 1000)
    ) {
        let mut s = session();
        let start = pivots(&s);
        for st in &steps {
            apply(&mut s, st);
            let rot = s.views()[0].object_rotation;
            for v in s.views() {
                prop_assert_eq!(v.object_rotation, rot);
            }
        }
        for (a, b) in start.iter().zip(pivots(&s)) {
            prop_assert!((*a - b).norm() < 1e-9, "pivot drifted by {}", (*a - b).norm());
        }
    }
}
