use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use atelier_core::corpus::{stratified_annotations, synthesize_latent, MultimodalIndex, SynthOptions};
use atelier_core::parsers::{parse_sketch, ParseOptions, ParsedSketch, SketchType};
use atelier_core::render::{decode_texture, render, render_canonical, BodyPose, CameraView, ShapeParams, CANONICAL_SIZE};
use atelier_core::uv::{warp_to_uv, Mask};
use atelier_core::{Result, UvLatent};

use crate::fixtures::{classification_set, StrokeFixture};
use crate::{timed, CriterionResult};

const PER_TYPE: usize = 10;
const MASK_TOLERANCE: usize = 2;
const WARP_LATENTS: usize = 20;
const MIN_PSNR_DB: f64 = 35.0;

/// The single-view mask the strokes warp to, before expansion.
fn warped(p: &ParsedSketch) -> Mask {
    let (h, w) = p.mask_uv.dims();
    p.components.iter().fold(Mask::new(h, w), |mut m, c| {
        m.union_in_place(&c.partial);
        m
    })
}

/// Texel tolerance for deciding a stroke sample is on the visible surface.
const VISIBLE_TOLERANCE: f64 = 0.5;

/// Parse of the fixture drawn at `yaw`, and whether all of it was visible.
fn parse_at(latent: &UvLatent, fixture: &StrokeFixture, yaw: f64) -> Result<(Result<ParsedSketch>, bool)> {
    let (pose, shape, view) = (BodyPose::canonical(), ShapeParams::default(), CameraView::at_yaw(yaw));
    let out = render(latent, &pose, &view, &shape, CANONICAL_SIZE)?;
    let stroke = fixture.draw(&pose, &view, &shape, CANONICAL_SIZE)?;
    let layout = atelier_core::UvLayout::new(latent.height(), latent.width())?;
    let visible = fixture.visible(&out, &pose, &view, &shape, &layout, VISIBLE_TOLERANCE);
    Ok((parse_sketch(&[stroke], &layout, Some(&out), ParseOptions::default()), visible))
}

fn classified(p: &ParsedSketch, f: &StrokeFixture) -> bool {
    p.sketch_type == f.expected
        && p.target_part == f.part
        && (f.expected != SketchType::Neckline || p.neckline_class == f.neckline)
}

pub fn sketch_classification(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("sketch_classification", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
        let fixtures = classification_set(&mut rng, PER_TYPE);
        let (mut right, mut pairs, mut same_mask, mut worst, mut worst_full) = (0usize, 0usize, 0usize, 0usize, 0usize);
        let mut misses = Vec::new();
        for f in &fixtures {
            let latent = &index.entries().choose(&mut rng).expect("nonempty corpus").latent;
            let (front, _) = parse_at(latent, f, 0.0)?;
            let (turned, both_visible) = parse_at(latent, f, 30.0)?;
            match &front {
                Ok(a) if classified(a, f) => right += 1,
                Ok(a) => misses.push(format!("{:?} on {:?} read as {:?}/{:?}", f.expected, f.strip, a.sketch_type, a.neckline_class)),
                Err(e) => misses.push(format!("{:?} on {:?}: {e}", f.expected, f.strip)),
            }
            // Only strokes that can be drawn in both views are comparable.
            if both_visible {
                pairs += 1;
                if let (Ok(a), Ok(b)) = (&front, &turned) {
                    let d = warped(a).symmetric_difference_count(&warped(b));
                    worst = worst.max(d);
                    worst_full = worst_full.max(a.mask_uv.symmetric_difference_count(&b.mask_uv));
                    same_mask += (d <= MASK_TOLERANCE) as usize;
                } else {
                    worst = usize::MAX;
                }
            }
        }
        let n = fixtures.len();
        let mut detail = format!(
            "{right}/{n} strokes classified; yaw 0 vs 30 masks within {MASK_TOLERANCE} texels for {same_mask}/{pairs} strokes visible in both (worst {worst}, {worst_full} after expansion)"
        );
        if let Some(m) = misses.first() {
            detail.push_str(&format!("; first miss {m}"));
        }
        Ok((right == n && pairs > 0 && same_mask == pairs, detail))
    })
}

/// Synthetic latents from fresh annotations, then latents with uniform noise
/// in every channel.
fn warp_latents(index: &MultimodalIndex) -> Result<Vec<UvLatent>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let (h, w, c) = index.dims();
    let opts = SynthOptions { height: h, width: w, channels: c, ..SynthOptions::default() };
    let mut out = Vec::with_capacity(WARP_LATENTS);
    for a in stratified_annotations(&mut rng, WARP_LATENTS / 2) {
        let jitter = [rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15)];
        out.push(synthesize_latent(&a, &opts, jitter)?);
    }
    while out.len() < WARP_LATENTS {
        let data = (0..h * w * c).map(|_| rng.gen_range(-3.0f32..3.0)).collect();
        out.push(UvLatent::from_vec(h, w, c, data)?);
    }
    Ok(out)
}

pub fn psnr_on_visible(latent: &UvLatent) -> Result<(f64, usize)> {
    let tex = decode_texture(latent)?;
    let out = render_canonical(latent)?;
    let back = warp_to_uv(&out.color, &out.coords, (latent.height(), latent.width()))?;
    let (mut se, mut n) = (0.0f64, 0usize);
    for r in 0..latent.height() {
        for c in 0..latent.width() {
            if let Some(rgb) = back.get(r, c) {
                let src = tex.color_at(r, c);
                se += rgb.iter().zip(&src).map(|(a, b)| (*a as f64 - *b as f64).powi(2)).sum::<f64>();
                n += 3;
            }
        }
    }
    let mse = se / n.max(1) as f64;
    Ok((if mse == 0.0 { f64::INFINITY } else { 10.0 * (1.0 / mse).log10() }, n / 3))
}

pub fn warp_roundtrip(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("warp_roundtrip", || {
        let mut worst = f64::INFINITY;
        let mut ok = 0;
        for z in warp_latents(index)? {
            let (p, visible) = psnr_on_visible(&z)?;
            worst = worst.min(p);
            ok += (p >= MIN_PSNR_DB && visible > 0) as usize;
        }
        Ok((
            ok == WARP_LATENTS,
            format!("{ok}/{WARP_LATENTS} latents at or above {MIN_PSNR_DB} dB on visible texels (worst {worst:.1} dB)"),
        ))
    })
}
