//! Two-stage retrieval samplers over the corpus: rank candidates per part,
//! pick the most appearance-compatible combination, compose.

mod select;

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{EntryId, MultimodalIndex};
use crate::error::{Error, Result};
use crate::matchers::{app_match, sem_match, shape_match, MatchScore};
use crate::parsers::{ParsedSketch, TextQuery};
use crate::render::render_canonical;
use crate::uv::{blend_latent, compose_latents, warp_to_uv, BodyPartId, Mask, PartialUvImage, UvLatent};

pub use select::{select, Objective, Selection, SelectionOutcome, EXHAUSTIVE_LIMIT};

pub const DEFAULT_TOP_N: usize = 4;
pub const DEFAULT_TOP_K: usize = 4;

/// Ranked candidate lists per part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateSet {
    pub parts: BTreeMap<BodyPartId, Vec<(EntryId, MatchScore)>>,
}

impl CandidateSet {
    pub fn combinations(&self) -> usize {
        self.parts.values().map(|v| v.len()).product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplerResult {
    pub chosen: BTreeMap<BodyPartId, EntryId>,
    #[serde(skip)]
    pub latent: UvLatent,
    pub candidates: CandidateSet,
    /// Every selection whose objective was evaluated, in evaluation order.
    pub evaluated: Vec<Selection>,
    /// Objective of the chosen selection; `None` when stage two was skipped.
    pub objective: Option<f64>,
    pub exhaustive: bool,
}

/// Seeded draw of one entry. Each block of `len` consecutive seeds visits
/// every entry exactly once.
pub fn sample_unconditional_entry(index: &MultimodalIndex, seed: u64) -> Result<EntryId> {
    if index.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = index.len() as u64;
    let mut ids: Vec<EntryId> = index.ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed / n);
    ids.shuffle(&mut rng);
    Ok(ids[(seed % n) as usize])
}

pub fn sample_unconditional(index: &MultimodalIndex, seed: u64) -> Result<UvLatent> {
    let id = sample_unconditional_entry(index, seed)?;
    Ok(index.entry(id)?.latent.clone())
}

fn top(mut scored: Vec<(EntryId, MatchScore)>, n: usize) -> Vec<(EntryId, MatchScore)> {
    scored.sort_by(|a, b| {
        let ord = match a.1.polarity {
            crate::matchers::Polarity::HigherBetter => b.1.value.total_cmp(&a.1.value),
            crate::matchers::Polarity::LowerBetter => a.1.value.total_cmp(&b.1.value),
        };
        ord.then(a.0.cmp(&b.0))
    });
    scored.truncate(n);
    scored
}

/// Corpus search: entries ranked by summed semantic score over the query's
/// parts (or only `part`), best first, ties by id. Entries scoring zero are
/// dropped.
pub fn search_text(
    index: &MultimodalIndex,
    query: &TextQuery,
    part: Option<BodyPartId>,
    limit: usize,
) -> Result<Vec<(EntryId, f64)>> {
    if query.is_empty() {
        return Err(Error::invalid("text query specifies no attribute"));
    }
    let slices: Vec<_> = query.parts.iter().filter(|(p, _)| part.is_none_or(|q| q == **p)).collect();
    if slices.is_empty() {
        return Err(Error::invalid(format!("text query says nothing about the {}", part.expect("filtered"))));
    }
    let mut hits = Vec::new();
    for e in index.entries() {
        let mut total = 0.0;
        for (p, slice) in &slices {
            total += sem_match(&e.annotation.slice(**p), slice)?.value;
        }
        if total > 0.0 {
            hits.push((e.id, total));
        }
    }
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    hits.truncate(limit);
    Ok(hits)
}

/// Stage one of the text sampler.
pub fn text_candidates(index: &MultimodalIndex, query: &TextQuery, n: usize) -> Result<CandidateSet> {
    if query.is_empty() {
        return Err(Error::invalid("text query specifies no attribute"));
    }
    if n == 0 {
        return Err(Error::invalid("top-n must be at least 1"));
    }
    let mut parts = BTreeMap::new();
    for (part, slice) in &query.parts {
        let mut scored = Vec::new();
        for e in index.entries() {
            let s = sem_match(&e.annotation.slice(*part), slice)?;
            if s.value > 0.0 {
                scored.push((e.id, s));
            }
        }
        if scored.is_empty() {
            return Err(Error::NoMatch(*part));
        }
        parts.insert(*part, top(scored, n));
    }
    Ok(CandidateSet { parts })
}

/// The shape query for one part: the sketch mask within the part, restricted
/// to texels the canonical view observes.
pub fn sketch_query_mask(index: &MultimodalIndex, sketch: &ParsedSketch, part: BodyPartId) -> Mask {
    sketch
        .mask_uv
        .intersection(index.masks().part(part))
        .intersection(index.canonical_visibility())
}

/// Stage one of the sketch sampler.
pub fn sketch_candidates(index: &MultimodalIndex, sketch: &ParsedSketch, k: usize) -> Result<CandidateSet> {
    if sketch.mask_uv.is_empty() {
        return Err(Error::invalid("sketch mask is empty"));
    }
    if k == 0 {
        return Err(Error::invalid("top-k must be at least 1"));
    }
    let mut parts = BTreeMap::new();
    for part in sketch.target_parts() {
        let q = sketch_query_mask(index, sketch, part);
        if q.is_empty() {
            return Err(Error::invalid(format!(
                "sketch mask on the {part} is not observed in the canonical view"
            )));
        }
        let mut scored = Vec::new();
        for e in index.entries() {
            let s = e.shape_mask(part);
            if s.is_empty() {
                continue;
            }
            scored.push((e.id, shape_match(s, &q)?));
        }
        if scored.is_empty() {
            return Err(Error::NoMatch(part));
        }
        parts.insert(part, top(scored, k));
    }
    Ok(CandidateSet { parts })
}

/// Canonical appearance of an arbitrary latent.
pub fn canonical_appearance(latent: &UvLatent) -> Result<PartialUvImage> {
    let out = render_canonical(latent)?;
    warp_to_uv(&out.color, &out.coords, (latent.height(), latent.width()))
}

fn finish(
    index: &MultimodalIndex,
    candidates: CandidateSet,
    source: Option<&UvLatent>,
    edit_mask: &Mask,
) -> Result<SamplerResult> {
    if let Some(src) = source {
        if src.dims() != index.dims() {
            return Err(Error::invalid(format!(
                "source latent is {:?}, corpus uses {:?}",
                src.dims(),
                index.dims()
            )));
        }
    }
    let parts: Vec<BodyPartId> = candidates.parts.keys().copied().collect();
    let lists: Vec<Vec<EntryId>> = candidates.parts.values().map(|v| v.iter().map(|(id, _)| *id).collect()).collect();
    let outcome = match source {
        None => select(&lists, Objective::Pairwise, |a, b| index.body_app_match(a, b), |_, _| unreachable!())?,
        Some(src) => {
            let src_app = canonical_appearance(src)?;
            let mut memo: HashMap<EntryId, f64> = HashMap::new();
            let body = index.masks().body();
            select(&lists, Objective::Source, |_, _| unreachable!(), |_, id| {
                if let Some(v) = memo.get(&id) {
                    return Ok(*v);
                }
                let v = app_match(&index.entry(id)?.appearance_uv, &src_app, body)?.value;
                memo.insert(id, v);
                Ok(v)
            })?
        }
    };
    let chosen: BTreeMap<BodyPartId, EntryId> = parts.iter().copied().zip(outcome.choice.iter().copied()).collect();

    let masks = index.masks();
    let mut pairs: Vec<(&UvLatent, Mask)> = Vec::new();
    let mut covered = Mask::new(index.dims().0, index.dims().1);
    for (p, id) in &chosen {
        pairs.push((&index.entry(*id)?.latent, masks.part(*p).clone()));
        covered.union_in_place(masks.part(*p));
    }
    let latent = match source {
        None => {
            let fill = &index.entry(outcome.choice[0])?.latent;
            pairs.push((fill, covered.complement()));
            let refs: Vec<(&UvLatent, &Mask)> = pairs.iter().map(|(z, m)| (*z, m)).collect();
            compose_latents(&refs)?
        }
        Some(src) => {
            let refs: Vec<(&UvLatent, &Mask)> = pairs.iter().map(|(z, m)| (*z, m)).collect();
            let composed = compose_latents(&refs)?;
            blend_latent(src, &composed, edit_mask)?
        }
    };
    Ok(SamplerResult {
        chosen,
        latent,
        candidates,
        evaluated: outcome.evaluated,
        objective: outcome.objective,
        exhaustive: outcome.exhaustive,
    })
}

/// Text-conditioned sampling. With a source latent, the result equals the
/// source outside the query's edit mask.
pub fn sample_text(index: &MultimodalIndex, query: &TextQuery, source: Option<&UvLatent>, n: usize) -> Result<SamplerResult> {
    let candidates = text_candidates(index, query, n)?;
    finish(index, candidates, source, &query.edit_mask)
}

/// Sketch-conditioned sampling. With a source latent, the result equals the
/// source outside the sketch's edit mask.
pub fn sample_sketch(index: &MultimodalIndex, sketch: &ParsedSketch, source: Option<&UvLatent>, k: usize) -> Result<SamplerResult> {
    let candidates = sketch_candidates(index, sketch, k)?;
    finish(index, candidates, source, &sketch.edit_mask)
}
