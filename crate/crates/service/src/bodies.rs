//! JSON request and response bodies. CLI edit scripts reuse the request
//! types one to one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use atelier_core::corpus::EntryId;
use atelier_core::editors::{Diagnostics, SketchEditOptions};
use atelier_core::parsers::{ParseOptions, SketchStroke};
use atelier_core::render::{BodyPose, CameraView, ShapeParams};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// Start from this corpus entry.
    #[serde(default)]
    pub entry_id: Option<EntryId>,
    /// Start from an unconditional sample; 0 when neither field is given.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedBody {
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextBody {
    pub text: String,
}

/// Stroke parsing switches shared by the sketch bodies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StrokeOptions {
    /// Render the strokes were drawn over; the latest when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub render_id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expand: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror: Option<bool>,
}

impl StrokeOptions {
    pub fn parse(&self) -> ParseOptions {
        let d = ParseOptions::default();
        ParseOptions {
            expand: self.expand.unwrap_or(d.expand),
            mirror: self.mirror.unwrap_or(d.mirror),
        }
    }

    pub fn edit(&self) -> SketchEditOptions {
        SketchEditOptions {
            parse: self.parse(),
            render_id: self.render_id,
            ..SketchEditOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchBody {
    pub strokes: Vec<SketchStroke>,
    #[serde(flatten)]
    pub options: StrokeOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StyleBody {
    pub ref_id: EntryId,
    pub strokes: Vec<SketchStroke>,
    #[serde(flatten)]
    pub options: StrokeOptions,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBody {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<BodyPose>,
    /// Pose corpus label; exclusive with `pose`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub view: Option<CameraView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeParams>,
}

/// Reply of every mutating endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderReply {
    pub session_id: String,
    pub render_id: u64,
    pub png_base64: String,
    pub diagnostics: serde_json::Value,
}

impl RenderReply {
    pub fn new(session_id: String, render_id: u64, png: &[u8], diagnostics: &Diagnostics) -> Self {
        use base64::Engine;
        Self {
            session_id,
            render_id,
            png_base64: base64::engine::general_purpose::STANDARD.encode(png),
            diagnostics: serde_json::to_value(diagnostics).expect("diagnostics serialize"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub render_id: u64,
    pub created_unix_ms: u64,
    pub history: usize,
    pub pose: BodyPose,
    pub view: CameraView,
    pub shape: ShapeParams,
}

/// View overrides for read-only renders and measurements.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewQuery {
    pub yaw: Option<f64>,
    pub pitch: Option<f64>,
    pub scale: Option<f64>,
    pub pose_id: Option<String>,
    /// `png` (default) or `json`.
    pub format: Option<String>,
    /// `color` (default) or `seg`.
    pub layer: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchQuery {
    pub text: String,
    pub part: Option<String>,
    pub limit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub entry_id: EntryId,
    pub score: f64,
    pub annotation: BTreeMap<String, String>,
    pub thumbnail_png_base64: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseInfo {
    pub id: String,
    pub pose: BodyPose,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportQuery {
    pub frames: Option<usize>,
    /// Degrees swept over the frames.
    pub yaw_sweep: Option<f64>,
}
