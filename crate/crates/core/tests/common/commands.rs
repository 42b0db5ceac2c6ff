//! Strategies shared by the viewlang property tests and the acceptance suite.
#![allow(dead_code)]

use proptest::prelude::*;
use viz_core::field::Reducer;
use viz_core::render::Palette;
use viz_core::session::{AnimKind, Generator, Mode, Session, ViewTarget};
use viz_core::viewlang::{run_script, AxisRef, Command, CutOrientation, EvalContext, IndexSpec, Offset, ViewDerive};

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,7}"
}

fn path() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 ._/\"\\\\\n\té-]{0,14}"
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6f64..1e6,
        (-30i32..30).prop_map(|e| 10f64.powi(e)),
        Just(0.0),
        Just(0.005),
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
    ]
}

fn triple() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(finite())
}

fn axis_ref() -> impl Strategy<Value = AxisRef> {
    prop_oneof![name().prop_map(AxisRef::Label), (0usize..6).prop_map(AxisRef::Index)]
}

fn reducer() -> impl Strategy<Value = Reducer> {
    prop::sample::select(Reducer::ALL.to_vec())
}

fn target() -> impl Strategy<Value = ViewTarget> {
    prop_oneof![Just(ViewTarget::All), any::<u32>().prop_map(ViewTarget::One)]
}

pub fn command() -> impl Strategy<Value = Command> {
    let dims = prop::collection::vec(0usize..64, 1..=4);
    prop_oneof![
        (path(), name()).prop_map(|(path, name)| Command::Load { path, name }),
        (dims.clone(), prop::option::of(0usize..40), prop::option::of(any::<u64>()), name()).prop_map(
            |(dims, lumps, seed, name)| Command::Synth { generator: Generator::QcdLumps, dims, lumps, seed, name }
        ),
        (dims, prop::option::of(any::<u64>()), name()).prop_map(|(dims, seed, name)| Command::Synth {
            generator: Generator::Meteorite,
            dims,
            lumps: None,
            seed,
            name
        }),
        (
            name(),
            axis_ref(),
            prop_oneof![
                (0usize..100).prop_map(IndexSpec::Single),
                (0usize..100, 0usize..100).prop_map(|(a, b)| IndexSpec::Range(a, b))
            ],
            name()
        )
            .prop_map(|(source, axis, index, name)| Command::Slice { source, axis, index, name }),
        (name(), axis_ref(), reducer(), name())
            .prop_map(|(source, axis, reducer, name)| Command::Project { source, axis, reducer, name }),
        (name(), prop::option::of(finite()), prop::option::of(finite()))
            .prop_filter("filter needs a bound", |(_, lo, hi)| lo.is_some() || hi.is_some())
            .prop_map(|(source, lo, hi)| Command::Filter { source, lo, hi }),
        (
            name(),
            prop::option::of(prop_oneof![
                (axis_ref(), 0usize..50).prop_map(|(axis, index)| ViewDerive::Slice { axis, index }),
                (axis_ref(), reducer()).prop_map(|(axis, reducer)| ViewDerive::Project { axis, reducer }),
            ]),
            prop::option::of((0usize..9, 0usize..9))
        )
            .prop_map(|(source, derive, cell)| Command::ViewAdd { source, derive, cell }),
        any::<u32>().prop_map(|view| Command::ViewRemove { view }),
        (any::<u32>(), finite()).prop_map(|(view, level)| Command::IsoAdd { view, level }),
        (any::<u32>(), prop::option::of(finite())).prop_map(|(view, level)| Command::IsoRemove { view, level }),
        (
            any::<u32>(),
            prop_oneof![axis_ref().prop_map(CutOrientation::Axis), triple().prop_map(CutOrientation::Normal)],
            prop_oneof![Just(Offset::Center), finite().prop_map(Offset::Value)]
        )
            .prop_map(|(view, orientation, offset)| Command::CutAdd { view, orientation, offset }),
        (any::<u32>(), prop::option::of(0usize..10)).prop_map(|(view, index)| Command::CutRemove { view, index }),
        (target(), prop::sample::select(Palette::ALL.to_vec()))
            .prop_map(|(target, palette)| Command::PaletteSet { target, palette }),
        (target(), prop::collection::vec((finite(), finite()), 1..5))
            .prop_map(|(target, points)| Command::OpacitySet { target, points }),
        (any::<u32>(), finite(), finite()).prop_map(|(view, lo, hi)| Command::RangeSet { view, lo, hi }),
        (any::<u32>(), prop::option::of(1usize..1000)).prop_map(|(view, bins)| Command::HistShow { view, bins }),
        any::<u32>().prop_map(|view| Command::ColorbarShow { view }),
        prop::sample::select(Mode::ALL.to_vec()).prop_map(Command::Mode),
        (
            prop::option::of(triple()),
            prop::option::of(triple()),
            prop::option::of(triple()),
            prop::option::of(finite())
        )
            .prop_filter("camera set needs an argument", |(p, f, u, v)| {
                p.is_some() || f.is_some() || u.is_some() || v.is_some()
            })
            .prop_map(|(position, focal, up, fov)| Command::CameraSet { position, focal, up, fov }),
        (prop::bool::ANY, 0usize..3, finite(), 1usize..500).prop_map(|(rotate, axis, degrees, frames)| {
            let kind = if rotate { AnimKind::Rotate } else { AnimKind::Orbit };
            Command::Anim { kind, axis, degrees, frames }
        }),
        (path(), prop::option::of((1usize..5000, 1usize..5000)))
            .prop_map(|(path, size)| Command::Snapshot { path, size }),
        path().prop_map(|path| Command::Source { path }),
        (0usize..10, finite(), finite())
            .prop_map(|(cols, cell_width, cell_height)| Command::Layout { cols, cell_width, cell_height }),
    ]
}

pub fn base_session() -> Session {
    let out = run_script(
        &Session::new(),
        "synth qcd_lumps dims=4x4x4x3 lumps=1 seed=2 as q\n\
         synth meteorite dims=6x6x6 seed=1 as m\n\
         slice q axis=t index=0 as q0\n\
         view add m\n\
         view add q0\n\
         iso add view=1 level=0.004\n",
        &EvalContext::new(std::env::temp_dir()),
    );
    assert!(out.errors.is_empty(), "{:?}", out.errors);
    out.session
}

/// Lines drawn from commands that often fail, some only part way through.
pub fn risky_line() -> impl Strategy<Value = String> {
    prop_oneof![
        (0usize..6, 0usize..6).prop_map(|(a, b)| format!("slice q axis=t index={a}..{b} as r")),
        (0usize..5, 0usize..5).prop_map(|(a, i)| format!("slice q axis={a} index={i} as s{i}")),
        prop::sample::select(vec!["x", "y", "z", "t", "w"]).prop_map(|l| format!("project q axis={l} reducer=max as p")),
        (0u32..4, -0.01f64..0.03).prop_map(|(v, l)| format!("iso add view={v} level={l}")),
        (0u32..4).prop_map(|v| format!("iso remove view={v}")),
        (0u32..4, 0usize..4).prop_map(|(v, a)| format!("cut add view={v} axis={a} offset=center")),
        (0u32..4, 0usize..3).prop_map(|(v, i)| format!("cut remove view={v} index={i}")),
        (0u32..4).prop_map(|v| format!("view remove view={v}")),
        prop::sample::select(vec!["m", "q", "q0", "nope"]).prop_map(|d| format!("view add {d}")),
        (0usize..3, 0usize..6).prop_map(|(r, c)| format!("view add m cell=({r},{c})")),
        prop::sample::select(vec!["m", "q0", "zz"]).prop_map(|d| format!("filter {d} min=0.0025")),
        (0u32..4, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(v, a, b)| format!("range set view={v} min={a} max={b}")),
        (0u32..4, 0usize..40).prop_map(|(v, b)| format!("hist show view={v} bins={b}")),
        (0usize..5).prop_map(|c| format!("layout cols={c} width=2 height=2")),
        (-1.0f64..1.0).prop_map(|x| format!("camera set position=({x},{x},{x})")),
        Just("mode object".to_string()),
        (0u32..4).prop_map(|v| format!("opacity set view={v} point=(0,0) point=(0.02,0.5)")),
        Just("anim rotate axis=y degrees=90 frames=3".to_string()),
    ]
}
