//! HTTP front of the hub: `/session` upgrades to a WebSocket, `/` serves the
//! bundled client page.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, IntoResponse};
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::sync::{mpsc, Mutex};

use crate::hub::{ClientId, Hub, Outgoing, Payload, Recipient};

const INDEX_HTML: &str = include_str!("../static/index.html");

struct Shared {
    hub: Hub,
    clients: HashMap<ClientId, mpsc::UnboundedSender<Message>>,
    next_client: ClientId,
}

impl Shared {
    /// Routes messages in order; a client whose channel closed is dropped.
    fn dispatch(&mut self, out: Vec<Outgoing>) {
        for o in out {
            let msg = match o.payload {
                Payload::Message(m) => Message::Text(m.to_json().into()),
                Payload::Binary(b) => Message::Binary(b.into()),
            };
            match o.to {
                Recipient::All => {
                    self.clients.retain(|_, tx| tx.send(msg.clone()).is_ok());
                }
                Recipient::Client(id) => {
                    if let Some(tx) = self.clients.get(&id) {
                        if tx.send(msg).is_err() {
                            self.clients.remove(&id);
                        }
                    }
                }
            }
        }
    }
}

/// Handle to the one session served by [`router`].
#[derive(Clone)]
pub struct AppState(Arc<Mutex<Shared>>);

impl AppState {
    pub fn new(hub: Hub) -> Self {
        AppState(Arc::new(Mutex::new(Shared { hub, clients: HashMap::new(), next_client: 1 })))
    }

    /// Current session version, for callers outside the message channel.
    pub async fn version(&self) -> u64 {
        self.0.lock().await.hub.version()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/", get(|| async { Html(INDEX_HTML) }))
        .route("/session", get(upgrade))
        .with_state(state)
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| connection(socket, state))
}

async fn connection(socket: WebSocket, state: AppState) {
    let (mut sink, mut stream) = socket.split();
    let (tx, mut rx) = mpsc::unbounded_channel::<Message>();
    let id = {
        let mut s = state.0.lock().await;
        let id = s.next_client;
        s.next_client += 1;
        s.clients.insert(id, tx);
        id
    };
    let writer = tokio::spawn(async move {
        while let Some(m) = rx.recv().await {
            if sink.send(m).await.is_err() {
                break;
            }
        }
    });
    while let Some(Ok(msg)) = stream.next().await {
        // Every mutation and its broadcast happen under one lock, so all
        // clients see deltas in version order.
        let mut s = state.0.lock().await;
        let out = match msg {
            Message::Text(t) => s.hub.handle_text(id, t.as_str()),
            Message::Binary(_) => Hub::reject(id, "binary messages are not accepted"),
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        s.dispatch(out);
    }
    state.0.lock().await.clients.remove(&id);
    writer.abort();
}

/// Binds `addr` and serves until the process ends. Returns the bound address
/// through `on_bound` so callers can use port 0.
pub async fn serve(addr: SocketAddr, hub: Hub, on_bound: impl FnOnce(SocketAddr)) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(AppState::new(hub))).await
}
