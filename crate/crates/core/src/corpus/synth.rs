use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::render::{channel, logit, Pattern};
use crate::schema::{color_rgb, Attribute, PartAnnotation};
use crate::templates;
use crate::uv::{BodyPartId, Mask, StripId, UvLatent, UvLayout, DEFAULT_CHANNELS, DEFAULT_UV_SIZE};

use super::entry::build_entry;
use super::index::MultimodalIndex;

const COVERED: f32 = 4.0;
const BARE: f32 = -4.0;
const LOWER_DARKEN: f32 = 0.7;
const PATTERN_CONTRAST: f32 = 0.55;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthOptions {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    /// Half-width of the uniform per-entry offset added to color logits.
    pub color_jitter: f32,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            height: DEFAULT_UV_SIZE,
            width: DEFAULT_UV_SIZE,
            channels: DEFAULT_CHANNELS,
            color_jitter: 0.15,
        }
    }
}

/// Each attribute cycles through its vocabulary, then the column is shuffled.
pub fn stratified_annotations(rng: &mut ChaCha8Rng, n: usize) -> Vec<PartAnnotation> {
    let columns: Vec<Vec<&str>> = Attribute::ALL
        .iter()
        .map(|a| {
            let vals = a.values();
            let mut col: Vec<&str> = (0..n).map(|i| vals[i % vals.len()]).collect();
            col.shuffle(rng);
            col
        })
        .collect();
    (0..n)
        .map(|i| {
            PartAnnotation::new(Attribute::ALL.iter().zip(&columns).map(|(a, col)| (*a, col[i].to_string())))
                .expect("stratified values come from the vocabulary")
        })
        .collect()
}

fn color_logits(rgb: [f32; 3], jitter: [f32; 3]) -> [f32; 3] {
    [0, 1, 2].map(|k| logit(rgb[k].clamp(0.02, 0.98)) + jitter[k])
}

fn paint(latent: &mut UvLatent, mask: &Mask, logits: [f32; 3], pattern: Pattern) {
    for (r, c) in mask.iter() {
        let z = latent.texel_mut(r, c);
        z[channel::COLOR[0]] = logits[0];
        z[channel::COLOR[1]] = logits[1];
        z[channel::COLOR[2]] = logits[2];
        z[channel::PATTERN] = pattern.selector();
        z[channel::FREQUENCY] = 0.0;
        z[channel::CONTRAST] = logit(PATTERN_CONTRAST);
        z[channel::COVERAGE] = COVERED;
    }
}

/// A latent whose decode realizes `annotation`; jitter perturbs colors only.
pub fn synthesize_latent(annotation: &PartAnnotation, opts: &SynthOptions, jitter: [f32; 3]) -> Result<UvLatent> {
    let layout = UvLayout::new(opts.height, opts.width)?;
    let mut z = UvLatent::zeros(opts.height, opts.width, opts.channels);
    for (r, c) in layout.part_masks().foreground().iter() {
        z.texel_mut(r, c)[channel::COVERAGE] = BARE;
    }
    let get = |a: Attribute| annotation.get(a);
    let hair_rgb = color_rgb(get(Attribute::HairColor)).expect("schema color");
    let cloth_rgb = color_rgb(get(Attribute::ClothingColor)).expect("schema color");
    let pattern = match get(Attribute::TexturePattern) {
        "stripe" => Pattern::Stripe,
        "checker" => Pattern::Checker,
        "floral" => Pattern::FloralDot,
        _ => Pattern::Plain,
    };
    let cloth = color_logits(cloth_rgb, jitter);
    let lower = color_logits(cloth_rgb.map(|v| v * LOWER_DARKEN), jitter);

    let hair = templates::hair_coverage(&layout, get(Attribute::HairLength)).expect("schema hair length");
    paint(&mut z, &hair, color_logits(hair_rgb, jitter), Pattern::Plain);

    paint(&mut z, &layout.part_mask(BodyPartId::Body), cloth, pattern);
    let neck = templates::neckline_coverage(&layout, get(Attribute::NecklineShape)).expect("schema neckline");
    paint(&mut z, &neck, cloth, pattern);

    let sleeve = templates::sleeve_fraction(get(Attribute::SleeveLength)).expect("schema sleeve");
    let lower_f = templates::lower_fraction(get(Attribute::LowerLength)).expect("schema lower length");
    for id in [StripId::ArmLeft, StripId::ArmRight] {
        paint(&mut z, &templates::limb_coverage(&layout, id, sleeve), cloth, pattern);
    }
    for id in [StripId::LegLeft, StripId::LegRight] {
        paint(&mut z, &templates::limb_coverage(&layout, id, lower_f), lower, Pattern::Plain);
    }

    let shoe = get(Attribute::ShoeType);
    let shoe_mask = templates::shoe_coverage(&layout, shoe).expect("schema shoe");
    let shoe_rgb = templates::shoe_color(shoe).expect("schema shoe");
    paint(&mut z, &shoe_mask, color_logits(shoe_rgb, [0.0; 3]), Pattern::Plain);
    Ok(z)
}

/// Seeded, stratified corpus with ground-truth annotations and ids `0..n`.
pub fn generate_synthetic_corpus(seed: u64, n: usize) -> Result<MultimodalIndex> {
    generate_synthetic_corpus_with(seed, n, &SynthOptions::default())
}

pub fn generate_synthetic_corpus_with(seed: u64, n: usize, opts: &SynthOptions) -> Result<MultimodalIndex> {
    if n == 0 {
        return Err(Error::invalid("corpus size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let annotations = stratified_annotations(&mut rng, n);
    let j = opts.color_jitter;
    let jitters: Vec<[f32; 3]> = (0..n)
        .map(|_| {
            if j > 0.0 {
                [0; 3].map(|_| rng.gen_range(-j..=j))
            } else {
                [0.0; 3]
            }
        })
        .collect();
    let entries = annotations
        .into_par_iter()
        .zip(jitters)
        .enumerate()
        .map(|(i, (ann, jit))| {
            let z = synthesize_latent(&ann, opts, jit)?;
            build_entry(i as u32, z, ann)
        })
        .collect::<Result<Vec<_>>>()?;
    MultimodalIndex::new(entries)
}
