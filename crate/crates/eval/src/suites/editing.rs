use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use atelier_core::corpus::MultimodalIndex;
use atelier_core::editors::{EditSession, SketchEditOptions};
use atelier_core::measure::{measure_view, GarmentMeasurement};
use atelier_core::parsers::{parse_text, ParseMode};
use atelier_core::render::{CameraView, RenderOutput};
use atelier_core::schema::Attribute;
use atelier_core::templates::NECKLINES;
use atelier_core::uv::{texel_of, StripId};
use atelier_core::{Mask, Result, UvLatent};

use crate::fixtures::{length_cut, neckline, StrokeFixture};
use crate::{timed, CriterionResult};

const LOCALITY_EDITS: usize = 50;
const VIEW_EDITS: usize = 20;
const VIEW_TOLERANCE: usize = 2;
const ABLATION_MIN_FAIL_RATE: f64 = 0.8;
const PERF_ITERATIONS: usize = 31;
pub const PERF_BUDGET_MS: f64 = 110.0;

/// Editing commands covering every attribute.
pub const COMMANDS: [&str; 20] = [
    "long sleeves",
    "make the sleeves short",
    "sleeveless",
    "medium sleeves",
    "red shirt",
    "blue top",
    "striped",
    "plaid shirt",
    "v-neck",
    "round neckline",
    "boat neck",
    "square neckline",
    "long pants",
    "shorts",
    "black boots",
    "sneakers",
    "heels",
    "long hair",
    "blonde hair",
    "short black hair",
];

/// Texels outside `mask` that differ, and pixels whose UV falls outside
/// `mask` but whose color (or validity) differs.
fn leaks(before: (&UvLatent, &RenderOutput), after: (&UvLatent, &RenderOutput), mask: &Mask) -> (usize, usize) {
    let (z0, r0) = before;
    let (z1, r1) = after;
    let texels = mask.complement().iter().filter(|(r, c)| z0.texel(*r, *c) != z1.texel(*r, *c)).count();
    let (h, w) = mask.dims();
    let mut pixels = 0;
    for i in 0..r0.width * r0.height {
        let (v0, v1) = (r0.coords.valid[i], r1.coords.valid[i]);
        if v0 != v1 {
            pixels += 1;
        } else if v0 {
            let (tr, tc) = texel_of(r0.coords.uv[i], h, w);
            if !mask.get(tr, tc) && r0.color.pixels[i] != r1.color.pixels[i] {
                pixels += 1;
            }
        }
    }
    (texels, pixels)
}

pub fn edit_locality(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("edit_locality", || {
        let idx = index.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        let (mut clean, mut failed) = (0usize, Vec::new());
        let mut session = EditSession::random("locality", idx.clone(), 7)?;
        for i in 0..LOCALITY_EDITS {
            if i % 10 == 0 {
                session = EditSession::random("locality", idx.clone(), rng.gen())?;
            }
            let cmd = *COMMANDS.choose(&mut rng).expect("commands");
            let mask = parse_text(cmd, ParseMode::Editing, idx.layout())?.edit_mask;
            let z0 = session.latent().clone();
            let (_, r0) = session.last_render();
            let out = session.edit_text(cmd)?;
            let (texels, pixels) = leaks((&z0, &r0), (session.latent(), &out.render), &mask);
            if texels == 0 && pixels == 0 {
                clean += 1;
            } else {
                failed.push(format!("{cmd:?}: {texels} texels, {pixels} pixels"));
            }
        }
        let mut detail = format!("{clean}/{LOCALITY_EDITS} edits bit-identical outside the edit mask (latent and render)");
        if let Some(f) = failed.first() {
            detail.push_str(&format!("; first leak {f}"));
        }
        Ok((clean == LOCALITY_EDITS, detail))
    })
}

/// One scripted sketch edit: source entry, stroke, and the yaw it is drawn at.
struct ViewCase {
    entry: u32,
    stroke: StrokeFixture,
    yaw: f64,
}

fn view_cases(index: &MultimodalIndex, rng: &mut ChaCha8Rng) -> Vec<ViewCase> {
    let with = |a: Attribute, values: &[&str]| -> Vec<u32> {
        index.entries().iter().filter(|e| values.contains(&e.annotation.get(a))).map(|e| e.id).collect()
    };
    let short_sleeves = with(Attribute::SleeveLength, &["sleeveless", "short"]);
    let short_lower = with(Attribute::LowerLength, &["short", "medium"]);
    let mut out = Vec::with_capacity(VIEW_EDITS);
    for i in 0..VIEW_EDITS {
        let yaw = rng.gen_range(-30.0..30.0);
        let case = match i % 3 {
            0 => {
                let arm = [StripId::ArmLeft, StripId::ArmRight][rng.gen_range(0..2)];
                ViewCase { entry: *short_sleeves.choose(rng).unwrap(), stroke: length_cut(arm, rng.gen_range(0.5..0.95), 0.5), yaw }
            }
            1 => {
                let leg = [StripId::LegLeft, StripId::LegRight][rng.gen_range(0..2)];
                ViewCase { entry: *short_lower.choose(rng).unwrap(), stroke: length_cut(leg, rng.gen_range(0.8..0.97), 0.5), yaw }
            }
            _ => {
                let class = NECKLINES[rng.gen_range(0..NECKLINES.len())];
                let others: Vec<u32> = index
                    .entries()
                    .iter()
                    .filter(|e| e.annotation.get(Attribute::NecklineShape) != class)
                    .map(|e| e.id)
                    .collect();
                ViewCase { entry: *others.choose(rng).unwrap(), stroke: neckline(class, 0.65), yaw }
            }
        };
        out.push(case);
    }
    out
}

fn agree(a: &GarmentMeasurement, b: &GarmentMeasurement) -> bool {
    a.sleeve_rows.abs_diff(b.sleeve_rows) <= VIEW_TOLERANCE
        && a.lower_rows.abs_diff(b.lower_rows) <= VIEW_TOLERANCE
        && a.neckline == b.neckline
}

fn edited(idx: &Arc<MultimodalIndex>, case: &ViewCase, full_uv: bool) -> Result<EditSession> {
    let mut s = EditSession::from_entry("view", idx.clone(), case.entry)?;
    s.set_pose_view_shape(None, Some(CameraView::at_yaw(case.yaw)), None)?;
    let stroke = case.stroke.draw(s.pose(), s.view(), s.shape(), s.render_size())?;
    s.edit_sketch(&[stroke], SketchEditOptions { full_uv, ..SketchEditOptions::default() })?;
    Ok(s)
}

fn measure_at(s: &EditSession, yaw: f64) -> Result<GarmentMeasurement> {
    measure_view(s.latent(), s.pose(), &CameraView::at_yaw(yaw), s.shape())
}

pub fn view_consistency(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("view_consistency", || {
        let idx = index.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        let cases = view_cases(index, &mut rng);
        let (mut consistent, mut partial_fail) = (0usize, 0usize);
        let mut first_bad = None;
        for (i, case) in cases.iter().enumerate() {
            let full = edited(&idx, case, true)?;
            let m: Vec<GarmentMeasurement> = [0.0, 90.0, 180.0].iter().map(|y| measure_at(&full, *y)).collect::<Result<_>>()?;
            if agree(&m[0], &m[1]) && agree(&m[0], &m[2]) && agree(&m[1], &m[2]) {
                consistent += 1;
            } else {
                first_bad.get_or_insert(format!("case {i} ({:?}): {m:?}", case.stroke.expected));
            }
            let partial = edited(&idx, case, false)?;
            if !agree(&measure_at(&partial, 0.0)?, &measure_at(&partial, 180.0)?) {
                partial_fail += 1;
            }
        }
        let rate = partial_fail as f64 / VIEW_EDITS as f64;
        let passed = consistent == VIEW_EDITS && rate >= ABLATION_MIN_FAIL_RATE;
        let mut detail = format!(
            "full-UV {consistent}/{VIEW_EDITS} consistent at yaw 0/90/180; partial-UV fails {partial_fail}/{VIEW_EDITS} back-view checks"
        );
        if let Some(b) = first_bad {
            detail.push_str(&format!("; first inconsistency {b}"));
        }
        Ok((passed, detail))
    })
}

/// Median wall time of alternating text and sketch edits, each including
/// parse, sampling, blending and a 512x512 render.
pub fn performance(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("performance", || {
        let idx = index.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
        let mut s = EditSession::random("perf", idx.clone(), 11)?;
        let cut = length_cut(StripId::ArmLeft, 0.8, 0.5);
        let mut times = Vec::with_capacity(PERF_ITERATIONS);
        for i in 0..PERF_ITERATIONS {
            let stroke = cut.draw(s.pose(), s.view(), s.shape(), s.render_size())?;
            let cmd = *COMMANDS.choose(&mut rng).expect("commands");
            let start = Instant::now();
            if i % 2 == 0 {
                s.edit_text(cmd)?;
            } else {
                s.edit_sketch(&[stroke], SketchEditOptions::default())?;
            }
            times.push(start.elapsed().as_secs_f64() * 1e3);
        }
        times.sort_by(f64::total_cmp);
        let median = times[times.len() / 2];
        Ok((
            median < PERF_BUDGET_MS,
            format!("median edit-to-render {median:.1} ms over {PERF_ITERATIONS} edits (budget {PERF_BUDGET_MS} ms), max {:.1} ms", times[times.len() - 1]),
        ))
    })
}
