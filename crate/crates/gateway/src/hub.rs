//! The single writer over one live session. `Hub` is synchronous and free of
//! I/O; the server feeds it one message at a time and routes what it returns.

use std::collections::HashSet;
use std::path::PathBuf;

use viz_core::geometry::{extract_cut_plane, marching_cubes};
use viz_core::scene::{iso_color, render_view, BACKGROUND};
use viz_core::session::{Event, Mode, PointerEvent, Session, View};
use viz_core::viewlang::{evaluate, parse, EvalContext};

use crate::protocol::{encode_mesh, ClientMessage, ErrorOrigin, FramePayload, ImagePayload, ServerMessage};

pub type ClientId = u64;

/// Longest side of a streamed volume frame unless configured otherwise.
pub const DEFAULT_FRAME_CAP: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipient {
    All,
    Client(ClientId),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Message(ServerMessage),
    Binary(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outgoing {
    pub to: Recipient,
    pub payload: Payload,
}

impl Outgoing {
    fn message(to: Recipient, m: ServerMessage) -> Self {
        Self { to, payload: Payload::Message(m) }
    }
}

fn error(client: ClientId, origin: ErrorOrigin, message: impl Into<String>) -> Vec<Outgoing> {
    vec![Outgoing::message(Recipient::Client(client), ServerMessage::Error { message: message.into(), origin })]
}

/// Frame size with the longer side clamped to `cap`, aspect preserved.
pub fn capped_size(width: usize, height: usize, cap: usize) -> (usize, usize) {
    let longest = width.max(height);
    if longest <= cap {
        return (width, height);
    }
    let scale = |n: usize| (n * cap / longest).max(1);
    (scale(width), scale(height))
}

#[derive(Debug, Clone)]
pub struct Hub {
    session: Session,
    version: u64,
    ctx: EvalContext,
    next_binary: u64,
    frame_cap: usize,
}

impl Hub {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Self::with_session(Session::new(), data_dir)
    }

    pub fn with_session(session: Session, data_dir: impl Into<PathBuf>) -> Self {
        Self { session, version: 0, ctx: EvalContext::new(data_dir), next_binary: 0, frame_cap: DEFAULT_FRAME_CAP }
    }

    pub fn with_frame_cap(mut self, cap: usize) -> Self {
        self.frame_cap = cap.max(1);
        self
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    /// Number of mutations applied so far.
    pub fn version(&self) -> u64 {
        self.version
    }

    /// Protocol error for a message the hub cannot decode.
    pub fn reject(client: ClientId, reason: &str) -> Vec<Outgoing> {
        error(client, ErrorOrigin::Protocol, reason)
    }

    /// Decodes and handles one text message; malformed input only answers
    /// the sender.
    pub fn handle_text(&mut self, client: ClientId, text: &str) -> Vec<Outgoing> {
        match serde_json::from_str::<ClientMessage>(text) {
            Ok(m) => self.handle(client, m),
            Err(e) => error(client, ErrorOrigin::Protocol, format!("malformed message: {e}")),
        }
    }

    pub fn handle(&mut self, client: ClientId, msg: ClientMessage) -> Vec<Outgoing> {
        match msg {
            ClientMessage::Command { text } => {
                let cmd = match parse(&text) {
                    Ok(c) => c,
                    Err(e) => return error(client, ErrorOrigin::Parse, e.to_string()),
                };
                match evaluate(&self.session, &cmd, &self.ctx) {
                    Ok((next, events)) => self.commit(client, next, events),
                    Err(e) => error(client, ErrorOrigin::Eval, e.to_string()),
                }
            }
            ClientMessage::Pointer { kind, dx, dy, target_view } => {
                let mut next = self.session.clone();
                match next.handle_pointer(&PointerEvent { kind, dx, dy, target_view }) {
                    Ok(events) => self.commit(client, next, events),
                    Err(e) => error(client, ErrorOrigin::Pointer, e.to_string()),
                }
            }
            ClientMessage::Key { key } => match (key, Mode::from_key(key)) {
                (_, Some(mode)) => {
                    let mut next = self.session.clone();
                    let events = next.set_mode(mode);
                    self.commit(client, next, events)
                }
                ('u', None) => self.ack(client),
                (other, None) => error(client, ErrorOrigin::Key, format!("unbound key {other:?}; bound: c o s u")),
            },
            ClientMessage::RequestScene {} => {
                let events = scene_events(&self.session);
                let to = Recipient::Client(client);
                let mut out = vec![Outgoing::message(
                    to,
                    ServerMessage::SceneDelta { events: events.clone(), session_version: self.version },
                )];
                out.extend(self.follow_ups(&events, to));
                out
            }
            ClientMessage::RequestRender { view_id, width, height } => {
                if width == 0 || height == 0 {
                    return error(client, ErrorOrigin::Render, format!("cannot render {width}x{height}"));
                }
                let (w, h) = capped_size(width, height, self.frame_cap);
                match render_view(&self.session, view_id, w, h) {
                    Ok(img) => vec![Outgoing::message(
                        Recipient::Client(client),
                        ServerMessage::VolumeFrame { view_id, image: ImagePayload::from_image(&img, BACKGROUND) },
                    )],
                    Err(e) => error(client, ErrorOrigin::Render, e.to_string()),
                }
            }
        }
    }

    fn ack(&self, client: ClientId) -> Vec<Outgoing> {
        vec![Outgoing::message(Recipient::Client(client), ServerMessage::Ack { session_version: self.version })]
    }

    /// Installs `next`; a change bumps the version and is broadcast with its
    /// derived geometry, then the sender gets an ack.
    fn commit(&mut self, client: ClientId, next: Session, events: Vec<Event>) -> Vec<Outgoing> {
        self.session = next;
        if events.is_empty() {
            return self.ack(client);
        }
        self.version += 1;
        let mut out = vec![Outgoing::message(
            Recipient::All,
            ServerMessage::SceneDelta { events: events.clone(), session_version: self.version },
        )];
        out.extend(self.follow_ups(&events, Recipient::All));
        out.extend(self.ack(client));
        out
    }

    /// Meshes, slice images and histograms implied by `events`, each at
    /// most once per batch.
    fn follow_ups(&mut self, events: &[Event], to: Recipient) -> Vec<Outgoing> {
        let mut out = Vec::new();
        let mut sent_slices = HashSet::new();
        let mut slice = |v: &View, i: usize, out: &mut Vec<Outgoing>| {
            if sent_slices.insert((v.id, i)) {
                out.extend(slice_message(v, i, to));
            }
        };
        for e in events {
            match e {
                Event::IsoAdded { view_id, level } => {
                    if let Ok(v) = self.session.view(*view_id).cloned() {
                        out.extend(self.mesh_messages(&v, *level, to));
                    }
                }
                Event::CutAdded { view_id, plane_index, .. } => {
                    if let Ok(v) = self.session.view(*view_id) {
                        slice(v, *plane_index, &mut out);
                    }
                }
                Event::TransferFunctionChanged { view_id } => {
                    if let Ok(v) = self.session.view(*view_id) {
                        for i in 0..v.cut_planes.len() {
                            slice(v, i, &mut out);
                        }
                    }
                }
                Event::ViewDataChanged { view_id } => {
                    if let Ok(v) = self.session.view(*view_id).cloned() {
                        for &level in &v.iso_levels {
                            out.extend(self.mesh_messages(&v, level, to));
                        }
                        for i in 0..v.cut_planes.len() {
                            slice(&v, i, &mut out);
                        }
                    }
                }
                Event::HistogramShown { view_id, edges, counts } => out.push(Outgoing::message(
                    to,
                    ServerMessage::Histogram { view_id: *view_id, edges: edges.clone(), counts: counts.clone() },
                )),
                _ => {}
            }
        }
        out
    }

    fn mesh_messages(&mut self, v: &View, level: f64, to: Recipient) -> Vec<Outgoing> {
        let Ok(mesh) = marching_cubes(&v.data, level) else { return Vec::new() };
        let binary_ref = self.next_binary;
        self.next_binary += 1;
        vec![
            Outgoing::message(
                to,
                ServerMessage::Mesh { view_id: v.id, level, binary_ref, color: iso_color(v, level) },
            ),
            Outgoing { to, payload: Payload::Binary(encode_mesh(&mesh)) },
        ]
    }
}

/// Cut-plane samples colored through the view's transfer function; invalid
/// samples are background.
fn slice_message(v: &View, plane_index: usize, to: Recipient) -> Option<Outgoing> {
    let plane = v.cut_planes.get(plane_index)?;
    let spacing = v.data.spacing().iter().copied().fold(f64::INFINITY, f64::min);
    let slice = extract_cut_plane(&v.data, plane, 1.0 / spacing).ok()?;
    let mut rgb = Vec::with_capacity(slice.width * slice.height * 3);
    for j in 0..slice.height {
        for i in 0..slice.width {
            match slice.get(i, j) {
                Some(s) => rgb.extend(v.tf.color(s).map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8)),
                None => rgb.extend(BACKGROUND),
            }
        }
    }
    Some(Outgoing::message(
        to,
        ServerMessage::SliceData {
            view_id: v.id,
            plane_index,
            image: ImagePayload::from_rgb(slice.width, slice.height, &rgb),
            frame: FramePayload::from(slice.frame),
        },
    ))
}

/// Events that rebuild the whole session on a fresh client.
pub fn scene_events(s: &Session) -> Vec<Event> {
    let mut ev: Vec<Event> = s
        .datasets()
        .iter()
        .map(|(name, f)| Event::DatasetAdded { name: name.clone(), dims: f.dims().to_vec() })
        .collect();
    ev.push(Event::LayoutChanged { layout: *s.layout() });
    ev.push(Event::ModeChanged { mode: s.mode() });
    ev.push(Event::CameraChanged { camera: *s.camera() });
    for v in s.views() {
        ev.push(Event::ViewAdded { view_id: v.id, cell: v.cell, source: v.source_name.clone() });
        ev.push(Event::TransferFunctionChanged { view_id: v.id });
        ev.push(Event::ViewTransformChanged {
            view_id: v.id,
            rotation: v.object_rotation,
            translation: v.object_translation,
        });
        ev.extend(v.iso_levels.iter().map(|&level| Event::IsoAdded { view_id: v.id, level }));
        ev.extend(
            v.cut_planes
                .iter()
                .enumerate()
                .map(|(plane_index, &plane)| Event::CutAdded { view_id: v.id, plane_index, plane }),
        );
        if v.show_colorbar {
            ev.push(Event::ColorbarShown { view_id: v.id });
        }
        if v.show_histogram {
            if let Ok(h) = v.data.histogram(v.hist_bins, None) {
                ev.push(Event::HistogramShown { view_id: v.id, edges: h.edges, counts: h.counts });
            }
        }
    }
    ev
}
