use serde::{Deserialize, Serialize};

use super::{Layout, Mode};
use crate::geometry::CutPlane;
use crate::math::{Quat, Vec3};
use crate::render::Camera;

/// Description of one applied change, for clients mirroring the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    DatasetAdded { name: String, dims: Vec<usize> },
    DatasetFiltered { name: String, lo: Option<f64>, hi: Option<f64>, valid_count: usize },
    ViewAdded { view_id: u32, cell: (usize, usize), source: String },
    ViewRemoved { view_id: u32 },
    ViewDataChanged { view_id: u32 },
    IsoAdded { view_id: u32, level: f64 },
    IsoRemoved { view_id: u32, levels: Vec<f64> },
    CutAdded { view_id: u32, plane_index: usize, plane: CutPlane<f64> },
    CutRemoved { view_id: u32, planes: Vec<CutPlane<f64>> },
    TransferFunctionChanged { view_id: u32 },
    HistogramShown { view_id: u32, edges: Vec<f64>, counts: Vec<u64> },
    ColorbarShown { view_id: u32 },
    ModeChanged { mode: Mode },
    CameraChanged { camera: Camera<f64> },
    ViewTransformChanged { view_id: u32, rotation: Quat<f64>, translation: Vec3<f64> },
    LayoutChanged { layout: Layout },
    AnimationRendered { frames: usize },
    SnapshotRequested { path: String, size: Option<(usize, usize)> },
}

impl Event {
    /// Stable name of the variant, as used in the `kind` tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Event::DatasetAdded { .. } => "dataset_added",
            Event::DatasetFiltered { .. } => "dataset_filtered",
            Event::ViewAdded { .. } => "view_added",
            Event::ViewRemoved { .. } => "view_removed",
            Event::ViewDataChanged { .. } => "view_data_changed",
            Event::IsoAdded { .. } => "iso_added",
            Event::IsoRemoved { .. } => "iso_removed",
            Event::CutAdded { .. } => "cut_added",
            Event::CutRemoved { .. } => "cut_removed",
            Event::TransferFunctionChanged { .. } => "transfer_function_changed",
            Event::HistogramShown { .. } => "histogram_shown",
            Event::ColorbarShown { .. } => "colorbar_shown",
            Event::ModeChanged { .. } => "mode_changed",
            Event::CameraChanged { .. } => "camera_changed",
            Event::ViewTransformChanged { .. } => "view_transform_changed",
            Event::LayoutChanged { .. } => "layout_changed",
            Event::AnimationRendered { .. } => "animation_rendered",
            Event::SnapshotRequested { .. } => "snapshot_requested",
        }
    }

    pub const KINDS: [&'static str; 18] = [
        "dataset_added",
        "dataset_filtered",
        "view_added",
        "view_removed",
        "view_data_changed",
        "iso_added",
        "iso_removed",
        "cut_added",
        "cut_removed",
        "transfer_function_changed",
        "histogram_shown",
        "colorbar_shown",
        "mode_changed",
        "camera_changed",
        "view_transform_changed",
        "layout_changed",
        "animation_rendered",
        "snapshot_requested",
    ];
}
