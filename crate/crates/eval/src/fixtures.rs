//! Physical stroke fixtures: polylines given as surface samples on a body
//! strip, projected into whatever view they are drawn on.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use atelier_core::parsers::{SketchStroke, SketchType};
use atelier_core::render::{project_strip_point, BodyPose, CameraView, RenderOutput, ShapeParams};
use atelier_core::templates::{neckline_depth, NECKLINES};
use atelier_core::uv::{StripId, DEFAULT_UV_SIZE};
use atelier_core::{BodyPartId, Error, Result, UvLayout};

/// A stroke on the body surface: `(t, angle)` samples along one strip, where
/// `t` is the axial fraction of the strip and `angle` is measured from the
/// strip's front.
#[derive(Clone, Debug, PartialEq)]
pub struct StrokeFixture {
    pub expected: SketchType,
    pub part: BodyPartId,
    pub strip: StripId,
    pub samples: Vec<(f64, f64)>,
    /// Neckline class the stroke traces, if any.
    pub neckline: Option<&'static str>,
}

impl StrokeFixture {
    /// The stroke as drawn over a `size` render of the given pose and view.
    pub fn draw(&self, pose: &BodyPose, view: &CameraView, shape: &ShapeParams, size: (usize, usize)) -> Result<SketchStroke> {
        let pts = self
            .samples
            .iter()
            .map(|(t, a)| {
                project_strip_point(pose, shape, view, size, self.strip, *t, *a)
                    .ok_or_else(|| Error::InvalidArgument(format!("t = {t} is outside the {:?} strip", self.strip)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SketchStroke::image(pts))
    }

    /// Whether every sample is on the visible surface of `out`: the pixel it
    /// projects to carries a UV within `tol` texels of the sample's own.
    pub fn visible(&self, out: &RenderOutput, pose: &BodyPose, view: &CameraView, shape: &ShapeParams, layout: &UvLayout, tol: f64) -> bool {
        let strip = layout.strip(self.strip);
        let (h, w) = (layout.height() as f64, layout.width() as f64);
        self.samples.iter().all(|(t, a)| {
            let Some([x, y]) = project_strip_point(pose, shape, view, (out.width, out.height), self.strip, *t, *a) else {
                return false;
            };
            let (px, py) = (x * out.width as f64, y * out.height as f64);
            if px < 0.0 || py < 0.0 || px >= out.width as f64 || py >= out.height as f64 {
                return false;
            }
            let Some([u, v]) = out.coords.get(px as usize, py as usize) else {
                return false;
            };
            let want_row = strip.row0 as f64 + t.clamp(0.0, 1.0) * strip.rows as f64;
            let want_col = strip.col0 as f64 + (a + PI).rem_euclid(TAU) / TAU * strip.cols as f64;
            let (dr, dc) = (v as f64 * h - want_row, u as f64 * w - want_col);
            let dc = dc.abs().min(strip.cols as f64 - dc.abs());
            dr.abs() <= tol && dc <= tol
        })
    }
}

fn sweep(n: usize, from: f64, to: f64) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| from + (to - from) * i as f64 / n as f64)
}

const LIMBS: [StripId; 4] = [StripId::ArmLeft, StripId::ArmRight, StripId::LegLeft, StripId::LegRight];

/// Horizontal line across the front of a limb at axial fraction `t`.
pub fn length_cut(strip: StripId, t: f64, half_width: f64) -> StrokeFixture {
    StrokeFixture {
        expected: SketchType::LengthCut,
        part: strip.part(),
        strip,
        samples: sweep(16, -half_width, half_width).map(|a| (t, a)).collect(),
        neckline: None,
    }
}

/// Axial line down a limb at a fixed angle.
pub fn contour(strip: StripId, from: f64, to: f64, angle: f64) -> StrokeFixture {
    StrokeFixture {
        expected: SketchType::Contour,
        part: strip.part(),
        strip,
        samples: sweep(16, from, to).map(|t| (t, angle)).collect(),
        neckline: None,
    }
}

/// Half-angle of the front opening of a neckline template.
pub fn opening(class: &str) -> f64 {
    let base = neckline_depth(class, FRAC_PI_2).expect("known class");
    let mut a = 0.0;
    while a < FRAC_PI_2 && neckline_depth(class, a + 1e-3).expect("known class") > base {
        a += 1e-3;
    }
    a
}

/// The lower edge of a neckline template across the front of the neck, out
/// to `span` radians either side of the center line.
pub fn neckline(class: &'static str, span: f64) -> StrokeFixture {
    let samples = sweep(24, -span, span)
        .map(|a| {
            let depth = neckline_depth(class, a).expect("known class");
            // Template depths are in units of a 24-row neck strip.
            (depth / 24.0, a)
        })
        .collect();
    StrokeFixture {
        expected: SketchType::Neckline,
        part: BodyPartId::Neck,
        strip: StripId::Neck,
        samples,
        neckline: Some(class),
    }
}

const CLOSED_SAMPLES: usize = 96;

/// An ellipse of surface samples, closed by repeating the first point.
pub fn closed_area(strip: StripId, center: (f64, f64), radius: (f64, f64)) -> StrokeFixture {
    let mut samples: Vec<(f64, f64)> = (0..CLOSED_SAMPLES)
        .map(|i| {
            let phi = TAU * i as f64 / CLOSED_SAMPLES as f64;
            (center.0 + radius.0 * phi.sin(), center.1 + radius.1 * phi.cos())
        })
        .collect();
    samples.push(samples[0]);
    StrokeFixture {
        expected: SketchType::ClosedArea,
        part: strip.part(),
        strip,
        samples,
        neckline: None,
    }
}

/// `per_type` fixtures of each sketch type, with randomized placement.
pub fn classification_set<R: Rng>(rng: &mut R, per_type: usize) -> Vec<StrokeFixture> {
    let mut out = Vec::with_capacity(4 * per_type);
    for i in 0..per_type {
        let strip = LIMBS[i % 4];
        out.push(length_cut(strip, rng.gen_range(0.3..0.9), rng.gen_range(0.4..0.7)));
    }
    for i in 0..per_type {
        let strip = LIMBS[i % 4];
        let from = rng.gen_range(0.1..0.3);
        // Column centers keep the stroke off texel boundaries.
        let cols = UvLayout::new(DEFAULT_UV_SIZE, DEFAULT_UV_SIZE).expect("default layout").strip(strip).cols as f64;
        let col = ((rng.gen_range(-0.5..0.5f64) + PI) / TAU * cols).floor() + 0.5;
        out.push(contour(strip, from, from + rng.gen_range(0.35..0.6), col / cols * TAU - PI));
    }
    for i in 0..per_type {
        let class = NECKLINES[i % NECKLINES.len()];
        out.push(neckline(class, opening(class) + rng.gen_range(0.1..0.25)));
    }
    for i in 0..per_type {
        let (strip, center, radius) = if i % 2 == 0 {
            (StripId::Torso, (rng.gen_range(0.35..0.65), rng.gen_range(-0.2..0.2)), (rng.gen_range(0.12..0.2), rng.gen_range(0.5..0.7)))
        } else {
            let s = [StripId::LegLeft, StripId::LegRight][i / 2 % 2];
            // On the thigh: the knee cap hides the top of the shin.
            (s, (rng.gen_range(0.27..0.29), rng.gen_range(-0.1..0.1)), (rng.gen_range(0.18..0.2), rng.gen_range(0.65..0.75)))
        };
        out.push(closed_area(strip, center, radius));
    }
    out
}
