use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Event, Mode, Result, Session, SessionError};
use crate::math::{Quat, Vec3};
use crate::render::Camera;

const MAX_ELEVATION_DEG: f64 = 89.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PointerKind {
    RotateDrag,
    PanDrag,
    ZoomDrag,
}

/// Drag increment in normalized screen units: `dx` to the right, `dy` up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointerEvent {
    pub kind: PointerKind,
    pub dx: f64,
    pub dy: f64,
    #[serde(default)]
    pub target_view: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnimKind {
    /// Rotation in the current mode: camera orbit in camera mode, every
    /// object in sync mode.
    Rotate,
    /// Camera orbit regardless of mode.
    Orbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnimSpec {
    pub kind: AnimKind,
    /// World axis 0, 1 or 2.
    pub axis: usize,
    pub degrees: f64,
    pub frames: usize,
}

/// Camera and object transforms after one animation step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameState {
    pub frame: usize,
    pub camera: Camera<f64>,
    pub transforms: Vec<(u32, Quat<f64>, Vec3<f64>)>,
}

fn orbit(camera: &Camera<f64>, q: Quat<f64>) -> Camera<f64> {
    Camera {
        position: camera.focal_point + q.rotate(camera.position - camera.focal_point),
        view_up: q.rotate(camera.view_up),
        ..*camera
    }
}

/// Turntable orbit about the view-up axis through the focal point; the
/// elevation stays within the clamp.
fn camera_rotate(camera: &Camera<f64>, dx: f64, dy: f64) -> Camera<f64> {
    let up = camera.view_up.normalized();
    let focal = camera.focal_point;
    let mut offset = camera.position - focal;
    if dx != 0.0 {
        offset = Quat::from_axis_angle(up, dx * PI).rotate(offset);
    }
    if dy != 0.0 {
        let dist = offset.norm();
        let elevation = (offset.dot(up) / dist).clamp(-1.0, 1.0).asin();
        let limit = MAX_ELEVATION_DEG.to_radians();
        let target = (elevation + dy * PI).clamp(-limit, limit);
        let horizontal = (offset - up * offset.dot(up)).normalized();
        offset = (horizontal * target.cos() + up * target.sin()) * dist;
    }
    Camera { position: focal + offset, ..*camera }
}

/// World-space displacement matching a drag of `(dx, dy)` at the focal depth.
fn drag_shift(camera: &Camera<f64>, dx: f64, dy: f64) -> Vec3<f64> {
    let b = camera.basis();
    let scale = 2.0 * camera.distance() * camera.tan_half_fov();
    (b.right * dx + b.up * dy) * scale
}

impl Session {
    /// Applies one drag in the current mode.
    pub fn handle_pointer(&mut self, ev: &PointerEvent) -> Result<Vec<Event>> {
        if !ev.dx.is_finite() || !ev.dy.is_finite() {
            return Err(SessionError::Argument("pointer deltas must be finite".into()));
        }
        if ev.dx == 0.0 && ev.dy == 0.0 {
            return Ok(Vec::new());
        }
        match self.mode {
            Mode::Camera => {
                let c = &self.camera;
                let camera = match ev.kind {
                    PointerKind::RotateDrag => camera_rotate(c, ev.dx, ev.dy),
                    PointerKind::PanDrag => {
                        let s = drag_shift(c, ev.dx, ev.dy);
                        Camera { position: c.position - s, focal_point: c.focal_point - s, ..*c }
                    }
                    PointerKind::ZoomDrag => {
                        Camera { position: c.focal_point + (c.position - c.focal_point) * ev.dy.exp(), ..*c }
                    }
                };
                camera.validate()?;
                self.camera = camera;
                Ok(vec![Event::CameraChanged { camera }])
            }
            Mode::Object => {
                let id = ev.target_view.ok_or(SessionError::MissingTarget)?;
                let i = self.view_index(id)?;
                Ok(self.move_objects(&[i], ev))
            }
            Mode::Sync => {
                let all: Vec<usize> = (0..self.views.len()).collect();
                Ok(self.move_objects(&all, ev))
            }
        }
    }

    fn move_objects(&mut self, idx: &[usize], ev: &PointerEvent) -> Vec<Event> {
        let c = self.camera;
        let b = c.basis();
        let (rotation, shift) = match ev.kind {
            PointerKind::RotateDrag => {
                let q = Quat::from_axis_angle(b.up, ev.dx * PI) * Quat::from_axis_angle(b.right, -ev.dy * PI);
                (Some(q), Vec3::zero())
            }
            PointerKind::PanDrag => (None, drag_shift(&c, ev.dx, ev.dy)),
            PointerKind::ZoomDrag => (None, b.forward * (c.distance() * (ev.dy.exp() - 1.0))),
        };
        self.transform_objects(idx, rotation, shift)
    }

    fn transform_objects(&mut self, idx: &[usize], rotation: Option<Quat<f64>>, shift: Vec3<f64>) -> Vec<Event> {
        idx.iter()
            .map(|&i| {
                let v = &mut self.views[i];
                if let Some(q) = rotation {
                    v.object_rotation = (q * v.object_rotation).normalized();
                }
                v.object_translation += shift;
                Event::ViewTransformChanged { view_id: v.id, rotation: v.object_rotation, translation: v.object_translation }
            })
            .collect()
    }

    fn frame_state(&self, frame: usize) -> FrameState {
        FrameState {
            frame,
            camera: self.camera,
            transforms: self.views.iter().map(|v| (v.id, v.object_rotation, v.object_translation)).collect(),
        }
    }

    /// Steps through `frames` equal increments, leaving the session at the
    /// last one.
    pub fn animate(&mut self, spec: &AnimSpec) -> Result<(Vec<FrameState>, Vec<Event>)> {
        if spec.frames == 0 {
            return Err(SessionError::Argument("animation needs at least one frame".into()));
        }
        if !spec.degrees.is_finite() {
            return Err(SessionError::Argument(format!("animation angle {} is not finite", spec.degrees)));
        }
        if spec.axis > 2 {
            return Err(SessionError::Argument(format!("animation axis {} not in 0..3", spec.axis)));
        }
        let orbit_camera = match (spec.kind, self.mode) {
            (AnimKind::Orbit, _) | (AnimKind::Rotate, Mode::Camera) => true,
            (AnimKind::Rotate, Mode::Sync) => false,
            (AnimKind::Rotate, Mode::Object) => {
                return Err(SessionError::Argument("rotate animation needs camera or sync mode".into()));
            }
        };
        let step = (spec.degrees / spec.frames as f64).to_radians();
        let q = Quat::from_axis_angle(Vec3::axis(spec.axis), step);
        let all: Vec<usize> = (0..self.views.len()).collect();
        let mut frames = Vec::with_capacity(spec.frames);
        let mut events = Vec::new();
        for f in 1..=spec.frames {
            if step != 0.0 {
                if orbit_camera {
                    let camera = orbit(&self.camera, q);
                    camera.validate()?;
                    self.camera = camera;
                } else {
                    self.transform_objects(&all, Some(q), Vec3::zero());
                }
            }
            frames.push(self.frame_state(f));
        }
        if orbit_camera {
            events.push(Event::CameraChanged { camera: self.camera });
        } else {
            events.extend(self.views.iter().map(|v| Event::ViewTransformChanged {
                view_id: v.id,
                rotation: v.object_rotation,
                translation: v.object_translation,
            }));
        }
        events.push(Event::AnimationRendered { frames: spec.frames });
        Ok((frames, events))
    }
}
