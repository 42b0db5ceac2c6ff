use std::collections::BTreeSet;

use proptest::prelude::*;
use viz::hub::{capped_size, Hub, Outgoing, Payload, Recipient};
use viz::protocol::{decode_mesh, encode_mesh, ClientMessage, ServerMessage};
use viz_core::geometry::{CutPlane, TriangleMesh};
use viz_core::math::{Quat, Vec3};
use viz_core::session::{Layout, Mode, PointerKind};
use viz_core::{Camera, Event};

fn one_of_each() -> Vec<Event> {
    let camera = Camera::new(Vec3::new(0.0, 0.0, 5.0), Vec3::zero(), Vec3::new(0.0, 1.0, 0.0), 30.0).unwrap();
    let plane = CutPlane::axis(1, 2.5).unwrap();
    vec![
        Event::DatasetAdded { name: "qcd".into(), dims: vec![16, 16, 16, 16] },
        Event::DatasetFiltered { name: "m".into(), lo: Some(0.0025), hi: None, valid_count: 12 },
        Event::ViewAdded { view_id: 3, cell: (0, 3), source: "s4".into() },
        Event::ViewRemoved { view_id: 3 },
        Event::ViewDataChanged { view_id: 1 },
        Event::IsoAdded { view_id: 0, level: 0.005 },
        Event::IsoRemoved { view_id: 0, levels: vec![0.005, 0.01] },
        Event::CutAdded { view_id: 0, plane_index: 2, plane },
        Event::CutRemoved { view_id: 0, planes: vec![plane] },
        Event::TransferFunctionChanged { view_id: 2 },
        Event::HistogramShown { view_id: 0, edges: vec![0.0, 0.5, 1.0], counts: vec![4, 9] },
        Event::ColorbarShown { view_id: 0 },
        Event::ModeChanged { mode: Mode::Sync },
        Event::CameraChanged { camera },
        Event::ViewTransformChanged {
            view_id: 1,
            rotation: Quat::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), 0.25),
            translation: Vec3::new(1.0, -2.0, 0.5),
        },
        Event::LayoutChanged { layout: Layout::default() },
        Event::AnimationRendered { frames: 36 },
        Event::SnapshotRequested { path: "fig1.ppm".into(), size: Some((1920, 1200)) },
    ]
}

/// The dedicated message a client gets besides the delta itself, if any.
/// The match has no wildcard, so a new event kind fails to compile here.
fn dedicated_message(e: &Event) -> Option<&'static str> {
    match e {
        Event::IsoAdded { .. } => Some("Mesh"),
        Event::CutAdded { .. } | Event::TransferFunctionChanged { .. } => Some("SliceData"),
        Event::HistogramShown { .. } => Some("Histogram"),
        Event::ViewDataChanged { .. } => Some("Mesh"),
        Event::DatasetAdded { .. }
        | Event::DatasetFiltered { .. }
        | Event::ViewAdded { .. }
        | Event::ViewRemoved { .. }
        | Event::IsoRemoved { .. }
        | Event::CutRemoved { .. }
        | Event::ColorbarShown { .. }
        | Event::ModeChanged { .. }
        | Event::CameraChanged { .. }
        | Event::ViewTransformChanged { .. }
        | Event::LayoutChanged { .. }
        | Event::AnimationRendered { .. }
        | Event::SnapshotRequested { .. } => None,
    }
}

#[test]
fn every_event_kind_travels_in_a_scene_delta() {
    let events = one_of_each();
    let kinds: BTreeSet<_> = events.iter().map(Event::kind).collect();
    assert_eq!(kinds, Event::KINDS.into_iter().collect());

    let msg = ServerMessage::SceneDelta { events: events.clone(), session_version: 7 };
    let json = msg.to_json();
    let back: ServerMessage = serde_json::from_str(&json).unwrap();
    assert_eq!(back, msg);
    let raw: serde_json::Value = serde_json::from_str(&json).unwrap();
    for (e, v) in events.iter().zip(raw["events"].as_array().unwrap()) {
        assert_eq!(v["kind"], e.kind());
    }
    assert!(events.iter().filter_map(dedicated_message).count() > 0);
}

fn texts(out: &[Outgoing]) -> Vec<serde_json::Value> {
    out.iter()
        .filter_map(|o| match &o.payload {
            Payload::Message(m) => Some(serde_json::from_str(&m.to_json()).unwrap()),
            Payload::Binary(_) => None,
        })
        .collect()
}

#[test]
fn hub_emits_the_dedicated_messages() {
    let mut hub = Hub::new(".");
    for line in [
        "synth meteorite dims=10x10x10 seed=1 as m",
        "view add m",
        "hist show view=0 bins=16",
    ] {
        hub.handle(1, ClientMessage::Command { text: line.into() });
    }
    let cases = [
        ("iso add view=0 level=0.01", "iso_added"),
        ("cut add view=0 axis=z offset=center", "cut_added"),
        ("palette set view=0 name=gray", "transfer_function_changed"),
        ("filter m min=0.0025", "view_data_changed"),
        ("hist show view=0 bins=8", "histogram_shown"),
    ];
    for (line, kind) in cases {
        let out = hub.handle(1, ClientMessage::Command { text: line.into() });
        let msgs = texts(&out);
        assert_eq!(msgs[0]["type"], "SceneDelta", "{line}: {msgs:?}");
        let ev: Event = serde_json::from_value(
            msgs[0]["events"].as_array().unwrap().iter().find(|e| e["kind"] == kind).unwrap().clone(),
        )
        .unwrap();
        let want = dedicated_message(&ev).unwrap();
        assert!(msgs.iter().any(|m| m["type"] == want), "{line}: no {want} in {msgs:?}");
        assert!(out.iter().all(|o| o.to == Recipient::All || o.to == Recipient::Client(1)));
    }
}

fn arb_mesh() -> impl Strategy<Value = TriangleMesh<f64>> {
    (1usize..20, 0usize..20).prop_flat_map(|(nv, nt)| {
        (
            prop::collection::vec(prop::array::uniform3(-1e3f64..1e3), nv),
            prop::collection::vec(prop::array::uniform3(0..nv as u32), nt),
        )
            .prop_map(|(verts, tris)| {
                let mut m = TriangleMesh::new();
                for v in verts {
                    m.push_vertex(Vec3::new(v[0], v[1], v[2]), 0.0);
                }
                for t in tris {
                    m.push_triangle(t);
                }
                m
            })
    })
}

proptest! {
    #[test]
    fn mesh_frames_decode_to_the_f32_mesh(mesh in arb_mesh()) {
        let bytes = encode_mesh(&mesh);
        let (verts, tris) = decode_mesh(&bytes).unwrap();
        let expect: Vec<f32> = mesh.vertices.iter().map(|&c| c as f32).collect();
        prop_assert_eq!(verts, expect);
        prop_assert_eq!(tris, mesh.triangles.clone());
    }

    #[test]
    fn capped_frames_fit_and_keep_aspect(w in 1usize..5000, h in 1usize..5000, cap in 1usize..1024) {
        let (cw, ch) = capped_size(w, h, cap);
        prop_assert!(cw >= 1 && ch >= 1);
        prop_assert!(cw <= cap.max(1) && ch <= cap.max(1));
        if w <= cap && h <= cap {
            prop_assert_eq!((cw, ch), (w, h));
        } else if cw.min(ch) >= 2 {
            prop_assert_eq!(cw.max(ch), cap);
            let (a, b) = (w as f64 / h as f64, cw as f64 / ch as f64);
            // One pixel of rounding on the short side.
            prop_assert!((a - b).abs() <= a.max(b) / cw.min(ch) as f64 + 1e-12);
        }
    }

    #[test]
    fn pointer_messages_round_trip(dx in -1.0f64..1.0, dy in -1.0f64..1.0, t in proptest::option::of(0u32..8), k in 0usize..3) {
        let kind = [PointerKind::RotateDrag, PointerKind::PanDrag, PointerKind::ZoomDrag][k];
        let m = ClientMessage::Pointer { kind, dx, dy, target_view: t };
        let back: ClientMessage = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}
