//! Stateful edit sessions: one avatar, its view state and undo history.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::corpus::{EntryId, MultimodalIndex};
use crate::error::{Error, Result};
use crate::measure::{measure_render, GarmentMeasurement};
use crate::parsers::{parse_sketch, parse_text, ParseMode, ParseOptions, SketchStroke, SketchType};
use crate::render::{render, render_canonical, BodyPose, CameraView, RenderOutput, ShapeParams};
use crate::samplers::{sample_sketch, sample_text, sample_unconditional_entry, SamplerResult, DEFAULT_TOP_K, DEFAULT_TOP_N};
use crate::uv::{blend_latent, BodyPartId, UvLatent};

pub const HISTORY_DEPTH: usize = 32;
/// Renders kept addressable for stroke binding.
pub const RECENT_RENDERS: usize = 16;
pub const DEFAULT_RENDER_SIZE: (usize, usize) = (512, 512);

/// Style-transfer source.
#[derive(Clone, Debug)]
pub enum Reference {
    Entry(EntryId),
    Latent(Box<UvLatent>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchEditOptions {
    pub parse: ParseOptions,
    /// Render the strokes were drawn over; the latest when unset.
    pub render_id: Option<u64>,
    /// When false, selection still uses the full-UV mask but only the
    /// single-view region is replaced. Kept for ablation runs.
    pub full_uv: bool,
}

impl Default for SketchEditOptions {
    fn default() -> Self {
        Self {
            parse: ParseOptions::default(),
            render_id: None,
            full_uv: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub operation: &'static str,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub chosen: BTreeMap<BodyPartId, EntryId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub evaluated: usize,
    pub edit_mask_texels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sketch_type: Option<SketchType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neckline_class: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entry: Option<EntryId>,
}

impl Diagnostics {
    fn from_sampler(operation: &'static str, r: &SamplerResult, mask_texels: usize) -> Self {
        Self {
            operation,
            chosen: r.chosen.clone(),
            objective: r.objective,
            evaluated: r.evaluated.len(),
            edit_mask_texels: mask_texels,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct EditOutcome {
    pub render_id: u64,
    pub render: Arc<RenderOutput>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug)]
pub struct EditSession {
    id: String,
    index: Arc<MultimodalIndex>,
    latent: UvLatent,
    pose: BodyPose,
    view: CameraView,
    shape: ShapeParams,
    history: VecDeque<UvLatent>,
    render_size: (usize, usize),
    next_render_id: u64,
    renders: VecDeque<(u64, Arc<RenderOutput>)>,
    pub top_n: usize,
    pub top_k: usize,
}

mod ops;
#[cfg(test)]
mod tests;

impl EditSession {
    pub fn new(id: impl Into<String>, index: Arc<MultimodalIndex>, latent: UvLatent) -> Result<Self> {
        if latent.dims() != index.dims() {
            return Err(Error::invalid(format!(
                "latent is {:?}, corpus uses {:?}",
                latent.dims(),
                index.dims()
            )));
        }
        let mut s = Self {
            id: id.into(),
            index,
            latent,
            pose: BodyPose::canonical(),
            view: CameraView::default(),
            shape: ShapeParams::default(),
            history: VecDeque::new(),
            render_size: DEFAULT_RENDER_SIZE,
            next_render_id: 0,
            renders: VecDeque::new(),
            top_n: DEFAULT_TOP_N,
            top_k: DEFAULT_TOP_K,
        };
        s.rerender()?;
        Ok(s)
    }

    pub fn from_entry(id: impl Into<String>, index: Arc<MultimodalIndex>, entry: EntryId) -> Result<Self> {
        let latent = index.entry(entry)?.latent.clone();
        Self::new(id, index, latent)
    }

    pub fn random(id: impl Into<String>, index: Arc<MultimodalIndex>, seed: u64) -> Result<Self> {
        let entry = sample_unconditional_entry(&index, seed)?;
        Self::from_entry(id, index, entry)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn index(&self) -> &Arc<MultimodalIndex> {
        &self.index
    }

    pub fn latent(&self) -> &UvLatent {
        &self.latent
    }

    pub fn pose(&self) -> &BodyPose {
        &self.pose
    }

    pub fn view(&self) -> &CameraView {
        &self.view
    }

    pub fn shape(&self) -> &ShapeParams {
        &self.shape
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn render_size(&self) -> (usize, usize) {
        self.render_size
    }

    pub fn set_render_size(&mut self, size: (usize, usize)) {
        self.render_size = size;
    }

    /// Latest render and its id.
    pub fn last_render(&self) -> (u64, Arc<RenderOutput>) {
        let (id, r) = self.renders.back().expect("a session always holds a render");
        (*id, r.clone())
    }

    pub fn render_by_id(&self, id: u64) -> Option<Arc<RenderOutput>> {
        self.renders.iter().find(|(i, _)| *i == id).map(|(_, r)| r.clone())
    }

    /// Renders the current latent with optional overrides; state is untouched.
    pub fn render_with(&self, pose: Option<&BodyPose>, view: Option<&CameraView>) -> Result<RenderOutput> {
        render(
            &self.latent,
            pose.unwrap_or(&self.pose),
            view.unwrap_or(&self.view),
            &self.shape,
            self.render_size,
        )
    }

    pub fn measure(&self) -> Result<GarmentMeasurement> {
        let (_, r) = self.last_render();
        Ok(measure_render(&r, self.index.layout()))
    }

    fn push_render(&mut self, out: Arc<RenderOutput>) -> u64 {
        let id = self.next_render_id;
        self.next_render_id += 1;
        self.renders.push_back((id, out));
        while self.renders.len() > RECENT_RENDERS {
            self.renders.pop_front();
        }
        id
    }

    fn rerender(&mut self) -> Result<(u64, Arc<RenderOutput>)> {
        let out = Arc::new(self.render_with(None, None)?);
        Ok((self.push_render(out.clone()), out))
    }

    /// Commits a new latent: renders it first so a failure leaves the session
    /// untouched, then pushes the previous latent onto the history.
    fn commit(&mut self, latent: UvLatent, diagnostics: Diagnostics) -> Result<EditOutcome> {
        let out = Arc::new(render(&latent, &self.pose, &self.view, &self.shape, self.render_size)?);
        let prev = std::mem::replace(&mut self.latent, latent);
        self.history.push_back(prev);
        while self.history.len() > HISTORY_DEPTH {
            self.history.pop_front();
        }
        let id = self.push_render(out.clone());
        Ok(EditOutcome {
            render_id: id,
            render: out,
            diagnostics,
        })
    }
}
