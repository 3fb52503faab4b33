use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use atelier_core::corpus::MultimodalIndex;
use atelier_core::parsers::{ParsedSketch, TextQuery};
use atelier_core::samplers::{sample_sketch, sample_text, SamplerResult, DEFAULT_TOP_K, DEFAULT_TOP_N};
use atelier_core::schema::Attribute;
use atelier_core::{BodyPartId, Error, Result, UvLatent};

use crate::blobs::{Blob, Similarity};
use crate::oracle::{self, Expected};
use crate::{timed, CriterionResult};

const TEXT_QUERIES: usize = 100;
const SKETCH_QUERIES: usize = 50;
const TIME_LIMIT_S: f64 = 60.0;

/// One to three distinct attributes with random values.
pub fn random_text_attributes<R: Rng>(rng: &mut R) -> Vec<(Attribute, String)> {
    let k = rng.gen_range(1..=3);
    Attribute::ALL
        .choose_multiple(rng, k)
        .map(|a| (*a, a.values().choose(rng).expect("attribute has values").to_string()))
        .collect()
}

/// One or two random blob regions, each inside one part and partly visible
/// in the canonical view.
pub fn random_region_sketch<R: Rng>(rng: &mut R, index: &MultimodalIndex) -> Result<ParsedSketch> {
    let layout = index.layout();
    let k = rng.gen_range(1..=2);
    let parts: Vec<BodyPartId> = BodyPartId::ALL.choose_multiple(rng, k).copied().collect();
    let mut regions = Vec::with_capacity(k);
    for part in parts {
        let strips: Vec<_> = layout.strips_of(part).collect();
        let region = loop {
            let s = strips.choose(rng).expect("part has strips");
            let scale = rng.gen_range(0.2..0.5) * s.rows.min(s.cols) as f64 / 12.0;
            let t = Similarity {
                angle: rng.gen_range(0.0..std::f64::consts::TAU),
                scale,
                offset: [
                    s.col0 as f64 + rng.gen_range(0.2..0.8) * s.cols as f64,
                    s.row0 as f64 + rng.gen_range(0.2..0.8) * s.rows as f64,
                ],
            };
            let m = Blob::random(rng)
                .transformed(&t)
                .rasterize(layout.height(), layout.width())
                .intersection(index.masks().part(part));
            if !m.intersection(index.canonical_visibility()).is_empty() {
                break m;
            }
        };
        regions.push((part, region));
    }
    ParsedSketch::from_regions(regions)
}

fn agrees(got: Result<SamplerResult>, want: Option<Expected>) -> bool {
    match (got, want) {
        (Ok(r), Some(e)) => r.chosen == e.chosen && r.latent == e.latent,
        (Err(Error::NoMatch(_)), None) => true,
        _ => false,
    }
}

fn source<'a, R: Rng>(rng: &mut R, index: &'a MultimodalIndex, editing: bool) -> Option<&'a UvLatent> {
    editing.then(|| &index.entries().choose(rng).expect("nonempty corpus").latent)
}

pub fn sampler_oracle(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("sampler_oracle", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        let (mut text_ok, mut sketch_ok) = (0, 0);
        let mut first_miss = None;
        let mut sampler_s = 0.0;
        for i in 0..TEXT_QUERIES {
            let q = TextQuery::from_attributes(index.layout(), random_text_attributes(&mut rng))?;
            let src = source(&mut rng, index, i % 2 == 1);
            let t = Instant::now();
            let got = sample_text(index, &q, src, DEFAULT_TOP_N);
            sampler_s += t.elapsed().as_secs_f64();
            if agrees(got, oracle::text(index, &q, src, DEFAULT_TOP_N)?) {
                text_ok += 1;
            } else {
                first_miss.get_or_insert(format!("text query {i}: {:?}", q.parts));
            }
        }
        for i in 0..SKETCH_QUERIES {
            let sk = random_region_sketch(&mut rng, index)?;
            let src = source(&mut rng, index, i % 2 == 1);
            let t = Instant::now();
            let got = sample_sketch(index, &sk, src, DEFAULT_TOP_K);
            sampler_s += t.elapsed().as_secs_f64();
            if agrees(got, oracle::sketch(index, &sk, src, DEFAULT_TOP_K)?) {
                sketch_ok += 1;
            } else {
                first_miss.get_or_insert(format!("sketch query {i} on {:?}", sk.target_parts()));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let passed = text_ok == TEXT_QUERIES && sketch_ok == SKETCH_QUERIES && secs < TIME_LIMIT_S;
        let mut detail = format!(
            "text {text_ok}/{TEXT_QUERIES}, sketch {sketch_ok}/{SKETCH_QUERIES} equal to brute force; {secs:.1} s with oracle, {sampler_s:.1} s sampling (limit {TIME_LIMIT_S} s)"
        );
        if let Some(m) = first_miss {
            detail.push_str(&format!("; first mismatch: {m}"));
        }
        Ok((passed, detail))
    })
}

