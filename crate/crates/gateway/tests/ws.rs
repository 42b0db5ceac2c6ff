//! End-to-end checks of the `/session` channel over real sockets.

use std::net::SocketAddr;
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use serde_json::{json, Value};
use tokio::net::{TcpListener, TcpStream};
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};
use viz::hub::Hub;
use viz::protocol::decode_mesh;
use viz::server::{router, AppState};

type Socket = WebSocketStream<MaybeTlsStream<TcpStream>>;

const WAIT: Duration = Duration::from_secs(20);

async fn start() -> (SocketAddr, AppState) {
    let state = AppState::new(Hub::new("."));
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(state.clone());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (addr, state)
}

/// Connects and waits until the server has registered the client, which the
/// reply to `RequestScene` proves.
async fn connect(addr: SocketAddr) -> Socket {
    let (mut ws, _) = connect_async(format!("ws://{addr}/session")).await.unwrap();
    send(&mut ws, json!({"type": "RequestScene"})).await;
    let first = next_json(&mut ws).await;
    assert_eq!(first["type"], "SceneDelta");
    drain_quiet(&mut ws).await;
    ws
}

async fn send(ws: &mut Socket, v: Value) {
    ws.send(Message::text(v.to_string())).await.unwrap();
}

async fn next_message(ws: &mut Socket) -> Message {
    loop {
        let m = tokio::time::timeout(WAIT, ws.next()).await.expect("message in time").unwrap().unwrap();
        if !matches!(m, Message::Ping(_) | Message::Pong(_)) {
            return m;
        }
    }
}

async fn next_json(ws: &mut Socket) -> Value {
    match next_message(ws).await {
        Message::Text(t) => serde_json::from_str(t.as_str()).unwrap(),
        other => panic!("expected text, got {other:?}"),
    }
}

/// Reads JSON messages until one of type `ty`, returning everything read.
/// Waiting for an `Ack` also stops at an `Error`.
async fn until(ws: &mut Socket, ty: &str) -> Vec<Value> {
    let mut seen = Vec::new();
    loop {
        let m = next_message(ws).await;
        if let Message::Text(t) = m {
            let v: Value = serde_json::from_str(t.as_str()).unwrap();
            let done = v["type"] == ty || (ty == "Ack" && v["type"] == "Error");
            seen.push(v);
            if done {
                return seen;
            }
        }
    }
}

/// Discards whatever arrives within a short quiet period.
async fn drain_quiet(ws: &mut Socket) {
    while let Ok(Some(_)) = tokio::time::timeout(Duration::from_millis(150), ws.next()).await {}
}

async fn command(ws: &mut Socket, text: &str) -> Vec<Value> {
    send(ws, json!({"type": "Command", "text": text})).await;
    let seen = until(ws, "Ack").await;
    assert!(seen.iter().all(|m| m["type"] != "Error"), "{text}: {seen:?}");
    seen
}

#[tokio::test]
async fn both_clients_receive_the_same_delta() {
    let (addr, state) = start().await;
    let mut a = connect(addr).await;
    let mut b = connect(addr).await;
    command(&mut a, "synth qcd_lumps dims=8x8x8x2 lumps=2 seed=1 as f").await;
    command(&mut a, "view add f axis=t index=0").await;
    drain_quiet(&mut b).await;

    send(&mut a, json!({"type": "Command", "text": "iso add view=0 level=0.005"})).await;
    let da = until(&mut a, "SceneDelta").await.pop().unwrap();
    let db = until(&mut b, "SceneDelta").await.pop().unwrap();
    assert_eq!(da, db);
    assert_eq!(da["events"][0]["kind"], "iso_added");
    assert_eq!(da["sessionVersion"], json!(state.version().await));

    // The mesh header is followed by its binary frame on every client.
    for ws in [&mut a, &mut b] {
        let header = until(ws, "Mesh").await.pop().unwrap();
        assert_eq!(header["viewId"], 0);
        let Message::Binary(bytes) = next_message(ws).await else { panic!("binary frame expected") };
        let (verts, tris) = decode_mesh(&bytes).expect("well-formed mesh frame");
        assert!(!tris.is_empty());
        assert!(tris.iter().all(|&i| (i as usize) < verts.len() / 3));
    }
}

#[tokio::test]
async fn malformed_json_answers_only_the_sender() {
    let (addr, state) = start().await;
    let mut a = connect(addr).await;
    let mut b = connect(addr).await;
    let before = state.version().await;

    a.send(Message::text("{not json")).await.unwrap();
    let reply = next_json(&mut a).await;
    assert_eq!(reply["type"], "Error");
    assert_eq!(reply["origin"], "protocol");

    a.send(Message::binary(vec![1u8, 2, 3])).await.unwrap();
    assert_eq!(next_json(&mut a).await["type"], "Error");

    send(&mut a, json!({"type": "Command", "text": "bogus verb"})).await;
    let reply = next_json(&mut a).await;
    assert_eq!(reply["origin"], "parse");
    assert!(reply["message"].as_str().unwrap().contains("nearest valid verbs"));

    assert_eq!(state.version().await, before);
    // `b` sees nothing before the reply to its own request.
    send(&mut b, json!({"type": "RequestScene"})).await;
    let first = next_json(&mut b).await;
    assert_eq!(first["type"], "SceneDelta");
    assert_eq!(first["sessionVersion"], json!(before));
}

#[tokio::test]
async fn camera_mode_pointer_moves_only_the_camera() {
    let (addr, _state) = start().await;
    let mut a = connect(addr).await;
    command(&mut a, "synth meteorite dims=8x8x8 seed=2 as m").await;
    command(&mut a, "view add m").await;
    command(&mut a, "view add m").await;
    send(&mut a, json!({"type": "Key", "char": "c"})).await;
    until(&mut a, "Ack").await;

    send(&mut a, json!({"type": "Pointer", "kind": "rotateDrag", "dx": 0.1, "dy": 0.05})).await;
    let seen = until(&mut a, "Ack").await;
    let delta = seen.iter().find(|m| m["type"] == "SceneDelta").expect("a delta");
    let kinds: Vec<_> = delta["events"].as_array().unwrap().iter().map(|e| e["kind"].clone()).collect();
    assert_eq!(kinds, vec![json!("camera_changed")]);
}

#[tokio::test]
async fn keys_follow_the_binding_table() {
    let (addr, state) = start().await;
    let mut a = connect(addr).await;
    let v0 = state.version().await;
    send(&mut a, json!({"type": "Key", "char": "u"})).await;
    assert_eq!(next_json(&mut a).await, json!({"type": "Ack", "sessionVersion": v0}));
    send(&mut a, json!({"type": "Key", "char": "s"})).await;
    let seen = until(&mut a, "Ack").await;
    assert_eq!(seen[0]["events"][0], json!({"kind": "mode_changed", "mode": "sync"}));
    send(&mut a, json!({"type": "Key", "char": "q"})).await;
    assert_eq!(next_json(&mut a).await["origin"], "key");
}

#[tokio::test]
async fn render_request_streams_a_capped_frame() {
    let (addr, _state) = start().await;
    let mut a = connect(addr).await;
    command(&mut a, "synth meteorite dims=12x12x12 seed=4 as m").await;
    command(&mut a, "view add m").await;
    send(&mut a, json!({"type": "RequestRender", "viewId": 0, "width": 2048, "height": 1024})).await;
    let frame = until(&mut a, "VolumeFrame").await.pop().unwrap();
    assert_eq!(frame["image"]["width"], 512);
    assert_eq!(frame["image"]["height"], 256);
    send(&mut a, json!({"type": "RequestRender", "viewId": 9, "width": 8, "height": 8})).await;
    assert_eq!(until(&mut a, "Error").await.pop().unwrap()["origin"], "render");
}

#[tokio::test]
async fn interleaved_clients_converge_to_a_sequential_order() {
    let (addr, state) = start().await;
    let mut setup = connect(addr).await;
    command(&mut setup, "synth qcd_lumps dims=8x8x8x2 lumps=2 seed=5 as f").await;
    command(&mut setup, "view add f axis=t index=0").await;
    let base = state.version().await;

    const CLIENTS: usize = 4;
    const PER_CLIENT: usize = 6;
    let mut clients = Vec::new();
    for _ in 0..CLIENTS {
        clients.push(connect(addr).await);
    }
    drain_quiet(&mut setup).await;
    let tasks: Vec<_> = clients
        .into_iter()
        .enumerate()
        .map(|(c, mut ws)| {
            tokio::spawn(async move {
                for k in 0..PER_CLIENT {
                    let level = 0.001 * (1 + c * PER_CLIENT + k) as f64;
                    send(&mut ws, json!({"type": "Command", "text": format!("iso add view=0 level={level}")})).await;
                    send(&mut ws, json!({"type": "Pointer", "kind": "rotateDrag", "dx": 0.01, "dy": 0.0})).await;
                }
                // Every client observes every delta, in version order.
                let mut versions = Vec::new();
                let mut levels = Vec::new();
                while versions.len() < 2 * CLIENTS * PER_CLIENT {
                    let Message::Text(t) = next_message(&mut ws).await else { continue };
                    let m: Value = serde_json::from_str(t.as_str()).unwrap();
                    if m["type"] == "SceneDelta" {
                        versions.push(m["sessionVersion"].as_u64().unwrap());
                        for e in m["events"].as_array().unwrap() {
                            if e["kind"] == "iso_added" {
                                levels.push(e["level"].as_f64().unwrap());
                            }
                        }
                    }
                }
                (ws, versions, levels)
            })
        })
        .collect();
    let mut results = Vec::new();
    for t in tasks {
        results.push(t.await.unwrap());
    }

    let n = 2 * CLIENTS * PER_CLIENT;
    let expected: Vec<u64> = (base + 1..=base + n as u64).collect();
    for (_, versions, levels) in &results {
        assert_eq!(versions, &expected);
        assert_eq!(levels, &results[0].2);
    }
    assert_eq!(state.version().await, base + n as u64);

    // Replaying the observed order on a fresh hub reproduces the scene.
    let mut replay = Hub::new(".");
    for text in [
        "synth qcd_lumps dims=8x8x8x2 lumps=2 seed=5 as f".to_string(),
        "view add f axis=t index=0".to_string(),
    ]
    .into_iter()
    .chain(results[0].2.iter().map(|l| format!("iso add view=0 level={l}")))
    {
        replay.handle_text(0, &json!({"type": "Command", "text": text}).to_string());
    }
    let mut scenes = Vec::new();
    for (mut ws, _, _) in results.into_iter().chain([(setup, Vec::new(), Vec::new())]) {
        drain_quiet(&mut ws).await;
        send(&mut ws, json!({"type": "RequestScene"})).await;
        let scene = until(&mut ws, "SceneDelta").await.pop().unwrap();
        scenes.push(scene);
    }
    assert!(scenes.windows(2).all(|w| w[0] == w[1]));
    let iso: Vec<f64> = scenes[0]["events"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["kind"] == "iso_added")
        .map(|e| e["level"].as_f64().unwrap())
        .collect();
    assert_eq!(iso, replay.session().view(0).unwrap().iso_levels);
}

#[tokio::test]
async fn index_page_is_served() {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let (addr, _state) = start().await;
    let mut tcp = TcpStream::connect(addr).await.unwrap();
    tcp.write_all(b"GET / HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n").await.unwrap();
    let mut body = String::new();
    tcp.read_to_string(&mut body).await.unwrap();
    assert!(body.starts_with("HTTP/1.1 200"));
    assert!(body.contains("/session"));
}
