//! Scripted edit sequences. A step names an endpoint below
//! `/session/{id}/` and carries the same JSON body the endpoint takes, so a
//! script replays identically through the CLI or over HTTP.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use atelier_core::editors::{EditOutcome, EditSession, Reference};
use atelier_core::render::BodyPose;
use atelier_core::{Error, Result};

use crate::bodies::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptStep {
    /// Endpoint path, e.g. `edit/text`.
    pub op: String,
    #[serde(default)]
    pub body: Value,
}

/// A script: how to open the session, then the steps.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionScript {
    #[serde(default)]
    pub session: CreateSession,
    pub steps: Vec<ScriptStep>,
}

pub const OPS: [&str; 9] = [
    "generate/random",
    "generate/text",
    "generate/sketch",
    "edit/text",
    "edit/sketch",
    "edit/style",
    "params",
    "undo",
    "session",
];

fn body<T: DeserializeOwned>(v: &Value) -> Result<T> {
    let v = if v.is_null() { Value::Object(Default::default()) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| Error::InvalidArgument(format!("bad step body: {e}")))
}

pub fn resolve_pose(pose: Option<BodyPose>, pose_id: Option<String>) -> Result<Option<BodyPose>> {
    match (pose, pose_id) {
        (Some(_), Some(_)) => Err(Error::InvalidArgument("give pose or pose_id, not both".into())),
        (Some(p), None) => Ok(Some(p)),
        (None, Some(label)) => BodyPose::from_corpus(&label)
            .map(Some)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown pose {label:?}"))),
        (None, None) => Ok(None),
    }
}

/// Applies one step; `session` steps are only valid as the script header.
pub fn apply_step(s: &mut EditSession, step: &ScriptStep) -> Result<EditOutcome> {
    match step.op.as_str() {
        "generate/random" => s.generate_random(body::<SeedBody>(&step.body)?.seed),
        "generate/text" => s.generate_text(&body::<TextBody>(&step.body)?.text),
        "generate/sketch" => {
            let b: SketchBody = body(&step.body)?;
            s.generate_sketch(&b.strokes, b.options.edit())
        }
        "edit/text" => s.edit_text(&body::<TextBody>(&step.body)?.text),
        "edit/sketch" => {
            let b: SketchBody = body(&step.body)?;
            s.edit_sketch(&b.strokes, b.options.edit())
        }
        "edit/style" => {
            let b: StyleBody = body(&step.body)?;
            let mut strokes = b.strokes;
            if let Some(r) = b.options.render_id {
                for st in strokes.iter_mut().filter(|st| st.render_id.is_none()) {
                    st.render_id = Some(r);
                }
            }
            s.edit_style_transfer(&Reference::Entry(b.ref_id), &strokes, b.options.parse())
        }
        "params" => {
            let b: ParamsBody = body(&step.body)?;
            s.set_pose_view_shape(resolve_pose(b.pose, b.pose_id)?, b.view, b.shape)
        }
        "undo" => s.undo(),
        op => Err(Error::InvalidArgument(format!("unknown op {op:?}; expected one of {:?}", &OPS[..8]))),
    }
}
