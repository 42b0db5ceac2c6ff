//! Messages on the `/session` channel. JSON objects carry a `type` tag and
//! camelCase fields; isosurface meshes follow their `Mesh` header as a
//! separate binary message.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use viz_core::geometry::{PlaneFrame, TriangleMesh};
use viz_core::render::Image;
use viz_core::session::{Event, PointerKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all_fields = "camelCase")]
pub enum ClientMessage {
    Command {
        text: String,
    },
    Pointer {
        kind: PointerKind,
        dx: f64,
        dy: f64,
        #[serde(default)]
        target_view: Option<u32>,
    },
    Key {
        #[serde(rename = "char")]
        key: char,
    },
    RequestScene {},
    RequestRender {
        view_id: u32,
        width: usize,
        height: usize,
    },
}

/// Row-major RGB8 pixels, base64-encoded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ImagePayload {
    pub width: usize,
    pub height: usize,
    pub rgb: String,
}

impl ImagePayload {
    pub fn from_rgb(width: usize, height: usize, rgb: &[u8]) -> Self {
        debug_assert_eq!(rgb.len(), width * height * 3);
        Self { width, height, rgb: STANDARD.encode(rgb) }
    }

    pub fn from_image(img: &Image, background: [u8; 3]) -> Self {
        Self::from_rgb(img.width, img.height, &img.rgb_over(background))
    }

    pub fn decode(&self) -> Result<Vec<u8>, base64::DecodeError> {
        STANDARD.decode(&self.rgb)
    }
}

/// Where a cut-plane image sits in its view's local frame: pixel `(i, j)`
/// is at `origin + u*i + v*j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramePayload {
    pub origin: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl From<PlaneFrame<f64>> for FramePayload {
    fn from(f: PlaneFrame<f64>) -> Self {
        Self { origin: f.origin.to_array(), u: f.u.to_array(), v: f.v.to_array() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorOrigin {
    /// Malformed or unsupported message.
    Protocol,
    Parse,
    Eval,
    Pointer,
    Key,
    Render,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all_fields = "camelCase")]
pub enum ServerMessage {
    SceneDelta {
        events: Vec<Event>,
        session_version: u64,
    },
    /// Header for the binary frame sent right after it; `binary_ref` numbers
    /// binary frames on the service.
    Mesh {
        view_id: u32,
        level: f64,
        binary_ref: u64,
        color: [u8; 3],
    },
    SliceData {
        view_id: u32,
        plane_index: usize,
        image: ImagePayload,
        frame: FramePayload,
    },
    VolumeFrame {
        view_id: u32,
        image: ImagePayload,
    },
    Histogram {
        view_id: u32,
        edges: Vec<f64>,
        counts: Vec<u64>,
    },
    Error {
        message: String,
        origin: ErrorOrigin,
    },
    Ack {
        session_version: u64,
    },
}

impl ServerMessage {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}

/// Little-endian `u32 vertexCount, u32 triangleCount, f32 xyz..., u32 index...`.
pub fn encode_mesh(mesh: &TriangleMesh<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + mesh.vertices.len() * 4 + mesh.triangles.len() * 4);
    out.extend_from_slice(&(mesh.vertex_count() as u32).to_le_bytes());
    out.extend_from_slice(&(mesh.triangle_count() as u32).to_le_bytes());
    for &c in &mesh.vertices {
        out.extend_from_slice(&(c as f32).to_le_bytes());
    }
    for &i in &mesh.triangles {
        out.extend_from_slice(&i.to_le_bytes());
    }
    out
}

/// Inverse of [`encode_mesh`]: vertex coordinates and index triples.
pub fn decode_mesh(bytes: &[u8]) -> Option<(Vec<f32>, Vec<u32>)> {
    let word = |k: usize| bytes.get(4 * k..4 * k + 4).map(|b| [b[0], b[1], b[2], b[3]]);
    let nv = u32::from_le_bytes(word(0)?) as usize;
    let nt = u32::from_le_bytes(word(1)?) as usize;
    if bytes.len() != 8 + 12 * nv + 12 * nt {
        return None;
    }
    let verts = (0..3 * nv).map(|k| word(2 + k).map(f32::from_le_bytes)).collect::<Option<Vec<_>>>()?;
    let tris = (0..3 * nt).map(|k| word(2 + 3 * nv + k).map(u32::from_le_bytes)).collect::<Option<Vec<_>>>()?;
    Some((verts, tris))
}
