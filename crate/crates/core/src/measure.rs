//! Garment measurements read back from a render through its UV coordinates.

use serde::Serialize;

use crate::corpus::SegUv;
use crate::error::Result;
use crate::render::{render, BodyPose, CameraView, RenderOutput, ShapeParams};
use crate::templates::{self, NECKLINES};
use crate::uv::{Mask, StripId, UvLatent, UvLayout};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GarmentMeasurement {
    /// Covered rows from the shoulder, max over both arms.
    pub sleeve_rows: usize,
    pub sleeve_class: &'static str,
    /// Covered rows from the hip, max over both legs.
    pub lower_rows: usize,
    pub lower_class: &'static str,
    /// None when no neck texel is visible.
    pub neckline: Option<&'static str>,
}

/// Last observed covered row + 1 within a strip; 0 when none.
pub fn strip_extent(layout: &UvLayout, covered: &Mask, id: StripId) -> usize {
    let s = layout.strip(id);
    (0..s.rows)
        .rev()
        .find(|lr| (s.col0..s.col0 + s.cols).any(|c| covered.get(s.row0 + lr, c)))
        .map_or(0, |lr| lr + 1)
}

/// Template with the fewest disagreements with `covered` over `known` neck
/// texels; ties go to the earlier template.
pub fn classify_neckline(layout: &UvLayout, covered: &Mask, known: &Mask) -> Option<&'static str> {
    let neck = layout.strip_mask(StripId::Neck).intersection(known);
    if neck.is_empty() {
        return None;
    }
    let mut best: Option<(&'static str, usize)> = None;
    for class in NECKLINES {
        let tmpl = templates::neckline_coverage(layout, class).expect("template class");
        let miss = neck.iter().filter(|(r, c)| tmpl.get(*r, *c) != covered.get(*r, *c)).count();
        if best.is_none_or(|(_, m)| miss < m) {
            best = Some((class, miss));
        }
    }
    best.map(|(c, _)| c)
}

pub fn measure_seg(layout: &UvLayout, seg: &SegUv) -> GarmentMeasurement {
    let covered = seg.covered();
    let known = seg.observed();
    let ext = |a: StripId, b: StripId| strip_extent(layout, &covered, a).max(strip_extent(layout, &covered, b));
    let sleeve_rows = ext(StripId::ArmLeft, StripId::ArmRight);
    let lower_rows = ext(StripId::LegLeft, StripId::LegRight);
    let arm_len = layout.strip(StripId::ArmLeft).rows as f64;
    let leg_len = layout.strip(StripId::LegLeft).rows as f64;
    GarmentMeasurement {
        sleeve_rows,
        sleeve_class: templates::sleeve_class(sleeve_rows as f64 / arm_len),
        lower_rows,
        lower_class: templates::lower_class(lower_rows as f64 / leg_len),
        neckline: classify_neckline(layout, &covered, &known),
    }
}

pub fn measure_render(out: &RenderOutput, layout: &UvLayout) -> GarmentMeasurement {
    measure_seg(layout, &SegUv::from_render(out, layout.height(), layout.width()))
}

/// Renders at 512² and measures.
pub fn measure_view(latent: &UvLatent, pose: &BodyPose, view: &CameraView, shape: &ShapeParams) -> Result<GarmentMeasurement> {
    let layout = UvLayout::new(latent.height(), latent.width())?;
    let out = render(latent, pose, view, shape, (512, 512))?;
    Ok(measure_render(&out, &layout))
}
