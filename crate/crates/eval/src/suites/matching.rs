use std::sync::Arc;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use atelier_core::corpus::{CorpusEntry, MultimodalIndex};
use atelier_core::matchers::{app_match, shape_match};
use atelier_core::schema::{Attribute, COLORS};

use crate::blobs::blob_pair;
use crate::oracle::hu;
use crate::{timed, CriterionResult};

const BLOBS: usize = 200;
const MIN_BLOB_TEXELS: usize = 200;
const SHAPE_TOLERANCE: f64 = 0.05;
const SSIM_TOLERANCE: f64 = 1e-9;
const APP_SAMPLES: usize = 500;
const APP_MIN_RATE: f64 = 0.95;

pub fn shape_invariance(_: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("shape_invariance", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        let (mut within, mut self_zero, mut worst, mut flipped) = (0, 0, 0.0f64, 0);
        for _ in 0..BLOBS {
            let (a, b, _) = blob_pair(&mut rng, 128, MIN_BLOB_TEXELS);
            let d = shape_match(&a, &b)?.value;
            worst = worst.max(d);
            within += (d < SHAPE_TOLERANCE) as usize;
            let (ha, hb) = (hu(&a), hu(&b));
            flipped += (d >= SHAPE_TOLERANCE && (0..7).any(|i| ha[i].signum() != hb[i].signum())) as usize;
            self_zero += (shape_match(&a, &a)?.value == 0.0 && shape_match(&b, &b)?.value == 0.0) as usize;
        }
        Ok((
            within == BLOBS && self_zero == BLOBS,
            format!(
                "{within}/{BLOBS} transformed blobs within {SHAPE_TOLERANCE} (worst {worst:.4}; {flipped} of the misses flip the sign of an invariant), {self_zero}/{BLOBS} self-distances exactly 0"
            ),
        ))
    })
}

/// Palette color nearest to the RGB inverse of `name`, other than itself.
pub fn complement(name: &str) -> &'static str {
    let rgb = COLORS.iter().find(|(n, _)| *n == name).expect("palette color").1;
    let inv = rgb.map(|v| 1.0 - v);
    COLORS
        .iter()
        .filter(|(n, _)| *n != name)
        .min_by(|a, b| {
            let d = |c: &[f32; 3]| c.iter().zip(&inv).map(|(x, y)| (x - y).powi(2)).sum::<f32>();
            d(&a.1).total_cmp(&d(&b.1))
        })
        .expect("more than one color")
        .0
}

fn look(e: &CorpusEntry) -> (&str, &str) {
    (e.annotation.get(Attribute::ClothingColor), e.annotation.get(Attribute::TexturePattern))
}

pub fn app_ssim(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("app_ssim", || {
        let body = index.masks().body();
        let entries = index.entries();
        let mut worst_self = 0.0f64;
        for e in entries {
            worst_self = worst_self.max((app_match(&e.appearance_uv, &e.appearance_uv, body)?.value - 1.0).abs());
        }
        // Anchors with a same-look partner and a complementary-color partner.
        let mut triples = Vec::new();
        for a in entries {
            let (color, pattern) = look(a);
            let same: Vec<_> = entries.iter().filter(|b| b.id != a.id && look(b) == (color, pattern)).collect();
            let comp_color = complement(color);
            let mut comp: Vec<_> = entries.iter().filter(|c| look(c) == (comp_color, pattern)).collect();
            if comp.is_empty() {
                comp = entries.iter().filter(|c| look(c).0 == comp_color).collect();
            }
            if !same.is_empty() && !comp.is_empty() {
                triples.push((a, same, comp));
            }
        }
        if triples.is_empty() {
            return Ok((false, "no anchor has both a same-look and a complementary-color partner".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        let (mut wins, mut worst_sym) = (0usize, 0.0f64);
        for _ in 0..APP_SAMPLES {
            let (a, same, comp) = triples.choose(&mut rng).expect("nonempty");
            let b = same.choose(&mut rng).expect("nonempty");
            let c = comp.choose(&mut rng).expect("nonempty");
            let ab = app_match(&a.appearance_uv, &b.appearance_uv, body)?.value;
            let ba = app_match(&b.appearance_uv, &a.appearance_uv, body)?.value;
            let ac = app_match(&a.appearance_uv, &c.appearance_uv, body)?.value;
            let ca = app_match(&c.appearance_uv, &a.appearance_uv, body)?.value;
            worst_sym = worst_sym.max((ab - ba).abs()).max((ac - ca).abs());
            wins += (ab > ac) as usize;
        }
        let rate = wins as f64 / APP_SAMPLES as f64;
        let passed = worst_self <= SSIM_TOLERANCE && worst_sym <= SSIM_TOLERANCE && rate >= APP_MIN_RATE;
        Ok((
            passed,
            format!(
                "self |s-1| <= {worst_self:.1e}, symmetry <= {worst_sym:.1e}, same look beats complement in {wins}/{APP_SAMPLES} ({} anchors)",
                triples.len()
            ),
        ))
    })
}
