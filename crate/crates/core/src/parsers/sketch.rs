use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matchers::shape_match;
use crate::render::RenderOutput;
use crate::templates::{self, NECKLINES};
use crate::uv::{BodyPartId, ExpandOptions, Mask, Strip, UvLayout};

/// Texels (UV) or pixels (image) a stroke may stray from the body.
pub const OFF_BODY_MARGIN: usize = 8;
const CLOSE_DISTANCE: f64 = 3.0;
const MIN_CLOSED_AREA: f64 = 50.0;
const TRANSVERSAL_COS: f64 = 0.5;
const DENSIFY_STEP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrokeSpace {
    /// Normalized `(x, y)` over the render the stroke was drawn on.
    Image,
    /// Normalized `(u, v)` over the UV grid.
    Uv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchStroke {
    pub points: Vec<[f64; 2]>,
    pub space: StrokeSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub render_id: Option<u64>,
}

impl SketchStroke {
    pub fn image(points: Vec<[f64; 2]>) -> Self {
        Self {
            points,
            space: StrokeSpace::Image,
            render_id: None,
        }
    }

    /// From UV texel coordinates `(row, col)`.
    pub fn uv_texels(layout: &UvLayout, texels: &[[f64; 2]]) -> Self {
        let (h, w) = (layout.height() as f64, layout.width() as f64);
        Self {
            points: texels.iter().map(|[r, c]| [c / w, r / h]).collect(),
            space: StrokeSpace::Uv,
            render_id: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchType {
    LengthCut,
    Contour,
    Neckline,
    ClosedArea,
}

impl SketchType {
    pub const ALL: [SketchType; 4] = [
        SketchType::LengthCut,
        SketchType::Contour,
        SketchType::Neckline,
        SketchType::ClosedArea,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Complete the single-view mask over the full UV surface.
    pub expand: bool,
    /// Include the left/right mirror in the expansion.
    pub mirror: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            expand: true,
            mirror: true,
        }
    }
}

/// One classified stroke.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchComponent {
    pub sketch_type: SketchType,
    pub target_part: BodyPartId,
    /// The single-view mask before expansion.
    pub partial: Mask,
    pub mask_uv: Mask,
    pub edit_mask: Mask,
    /// The single-view edit region before expansion.
    pub partial_edit: Mask,
    pub neckline_class: Option<&'static str>,
}

/// All strokes of one request reduced to UV masks.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedSketch {
    /// Type and part of the first stroke.
    pub sketch_type: SketchType,
    pub target_part: BodyPartId,
    /// Clothing-region mask used as the shape query.
    pub mask_uv: Mask,
    /// Region replaced when editing. Equals `mask_uv` except for necklines,
    /// where the whole neck region is replaced.
    pub edit_mask: Mask,
    pub neckline_class: Option<&'static str>,
    pub components: Vec<SketchComponent>,
}

impl ParsedSketch {
    /// Parts targeted by any component, ascending.
    pub fn target_parts(&self) -> Vec<BodyPartId> {
        let mut v: Vec<BodyPartId> = self.components.iter().map(|c| c.target_part).collect();
        v.sort();
        v.dedup();
        v
    }

    /// A closed-area sketch per `(part, region)`, with regions taken as
    /// already expanded. The first region decides the reported part.
    pub fn from_regions(regions: Vec<(BodyPartId, Mask)>) -> Result<Self> {
        let Some((first, m0)) = regions.first() else {
            return Err(Error::invalid("at least one region is required"));
        };
        let mut mask_uv = Mask::new(m0.height(), m0.width());
        for (_, m) in &regions {
            if m.dims() != m0.dims() {
                return Err(Error::invalid("region masks differ in dimensions"));
            }
            mask_uv.union_in_place(m);
        }
        let target_part = *first;
        let components = regions
            .into_iter()
            .map(|(part, m)| SketchComponent {
                sketch_type: SketchType::ClosedArea,
                target_part: part,
                partial: m.clone(),
                mask_uv: m.clone(),
                edit_mask: m.clone(),
                partial_edit: m,
                neckline_class: None,
            })
            .collect();
        Ok(Self {
            sketch_type: SketchType::ClosedArea,
            target_part,
            edit_mask: mask_uv.clone(),
            mask_uv,
            neckline_class: None,
            components,
        })
    }

    /// Union of the components' single-view edit regions.
    pub fn partial_edit_mask(&self) -> Mask {
        let mut m = Mask::new(self.edit_mask.height(), self.edit_mask.width());
        for c in &self.components {
            m.union_in_place(&c.partial_edit);
        }
        m
    }
}

fn check_points(stroke: &SketchStroke) -> Result<()> {
    if stroke.points.len() < 2 {
        return Err(Error::InvalidStroke("a stroke needs at least two points".into()));
    }
    if stroke.points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidStroke("stroke coordinates must be finite".into()));
    }
    Ok(())
}

/// Points along the polyline no further apart than `step`.
fn densify(points: &[[f64; 2]], step: f64) -> Vec<[f64; 2]> {
    let mut out = vec![points[0]];
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            let t = k as f64 / n as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Largest texel distance between pixel neighbours treated as one smooth
/// surface patch; wider gaps are seams or occlusion edges.
const PATCH_SPAN: f64 = 1.5;

/// UV texel position under the continuous pixel position `(x, y)`: bilinear
/// between the four surrounding pixel centers when they lie on one patch,
/// the pixel's own value otherwise.
fn uv_at(ctx: &RenderOutput, x: f64, y: f64, h: f64, w: f64) -> Option<[f64; 2]> {
    let texel = |xi: usize, yi: usize| ctx.coords.get(xi, yi).map(|[u, v]| [v as f64 * h, u as f64 * w]);
    let own = texel(x as usize, y as usize)?;
    let (fx, fy) = (x - 0.5, y - 0.5);
    if fx < 0.0 || fy < 0.0 {
        return Some(own);
    }
    let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
    if x0 + 1 >= ctx.width || y0 + 1 >= ctx.height {
        return Some(own);
    }
    let corners = [texel(x0, y0), texel(x0 + 1, y0), texel(x0, y0 + 1), texel(x0 + 1, y0 + 1)];
    let Some(c) = corners.iter().copied().collect::<Option<Vec<[f64; 2]>>>() else {
        return Some(own);
    };
    let span = c
        .iter()
        .flat_map(|a| c.iter().map(move |b| (a[0] - b[0]).abs().max((a[1] - b[1]).abs())))
        .fold(0.0, f64::max);
    if span > PATCH_SPAN {
        return Some(own);
    }
    let (tx, ty) = (fx - x0 as f64, fy - y0 as f64);
    let lerp = |i: usize| {
        let top = c[0][i] * (1.0 - tx) + c[1][i] * tx;
        let bottom = c[2][i] * (1.0 - tx) + c[3][i] * tx;
        top * (1.0 - ty) + bottom * ty
    };
    Some([lerp(0), lerp(1)])
}

/// Stroke in UV texel coordinates `(row, col)`. Image-space strokes are
/// looked up in the render's coordinate map at sub-pixel positions.
pub fn stroke_to_uv(stroke: &SketchStroke, layout: &UvLayout, context: Option<&RenderOutput>) -> Result<Vec<[f64; 2]>> {
    check_points(stroke)?;
    let (h, w) = (layout.height() as f64, layout.width() as f64);
    match stroke.space {
        StrokeSpace::Uv => Ok(stroke.points.iter().map(|[u, v]| [v * h, u * w]).collect()),
        StrokeSpace::Image => {
            let ctx = context.ok_or_else(|| Error::invalid("image-space strokes need a render context"))?;
            let (iw, ih) = (ctx.width, ctx.height);
            let px: Vec<[f64; 2]> = stroke.points.iter().map(|[x, y]| [x * iw as f64, y * ih as f64]).collect();
            let silhouette = Mask::from_fn(ih, iw, |y, x| ctx.coords.valid[y * iw + x]).dilate(OFF_BODY_MARGIN);
            let mut near = false;
            let mut out: Vec<[f64; 2]> = Vec::new();
            for [x, y] in densify(&px, DENSIFY_STEP) {
                if x < 0.0 || y < 0.0 || x >= iw as f64 || y >= ih as f64 {
                    continue;
                }
                let (xi, yi) = (x as usize, y as usize);
                near |= silhouette.get(yi, xi);
                if let Some(p) = uv_at(ctx, x, y, h, w) {
                    if out.last() != Some(&p) {
                        out.push(p);
                    }
                }
            }
            if !near {
                return Err(Error::OffBody);
            }
            if out.len() < 2 {
                return Err(Error::InvalidStroke("stroke does not cross any visible body surface".into()));
            }
            Ok(out)
        }
    }
}

fn texel(layout: &UvLayout, p: &[f64; 2]) -> Option<(usize, usize)> {
    let (r, c) = (p[0].floor(), p[1].floor());
    (r >= 0.0 && c >= 0.0 && (r as usize) < layout.height() && (c as usize) < layout.width())
        .then_some((r as usize, c as usize))
}

/// Part of the texel under `p`, or of the nearest foreground texel within
/// the off-body margin.
fn part_near(layout: &UvLayout, p: &[f64; 2]) -> Option<BodyPartId> {
    let m = OFF_BODY_MARGIN as isize;
    let (r0, c0) = (p[0].floor() as isize, p[1].floor() as isize);
    let mut best: Option<(isize, BodyPartId)> = None;
    for dr in -m..=m {
        for dc in -m..=m {
            let (r, c) = (r0 + dr, c0 + dc);
            if r < 0 || c < 0 || r >= layout.height() as isize || c >= layout.width() as isize {
                continue;
            }
            if let Some(part) = layout.part_at(r as usize, c as usize) {
                let d = dr.abs().max(dc.abs());
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, part));
                }
            }
        }
    }
    best.map(|(_, p)| p)
}

fn shoelace(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        s += a[1] * b[0] - b[1] * a[0];
    }
    (s / 2.0).abs()
}

fn majority(parts: &[BodyPartId]) -> BodyPartId {
    let mut counts = [0usize; 6];
    for p in parts {
        counts[p.code() as usize] += 1;
    }
    let best = (0..6).max_by_key(|i| (counts[*i], std::cmp::Reverse(*i))).unwrap();
    BodyPartId::from_code(best as u8).unwrap()
}

/// Classifies a UV-space stroke given as texel coordinates `(row, col)`.
pub fn classify_stroke(points: &[[f64; 2]], layout: &UvLayout) -> Result<(SketchType, BodyPartId)> {
    if points.len() < 2 {
        return Err(Error::InvalidStroke("a stroke needs at least two points".into()));
    }
    let parts: Vec<BodyPartId> = points.iter().filter_map(|p| part_near(layout, p)).collect();
    if parts.is_empty() {
        return Err(Error::OffBody);
    }
    let target = majority(&parts);
    let (first, last) = (points[0], points[points.len() - 1]);
    let gap = ((first[0] - last[0]).powi(2) + (first[1] - last[1]).powi(2)).sqrt();
    if gap <= CLOSE_DISTANCE && shoelace(points) >= MIN_CLOSED_AREA {
        return Ok((SketchType::ClosedArea, target));
    }
    let touches_neck = points
        .iter()
        .filter_map(|p| texel(layout, p))
        .any(|(r, c)| layout.part_at(r, c) == Some(BodyPartId::Neck));
    if touches_neck {
        return Ok((SketchType::Neckline, BodyPartId::Neck));
    }
    let (dr, dc) = (last[0] - first[0], last[1] - first[1]);
    let len = (dr * dr + dc * dc).sqrt();
    if len > 0.0 && (dr.abs() / len) < TRANSVERSAL_COS && target.is_limb() {
        return Ok((SketchType::LengthCut, target));
    }
    Ok((SketchType::Contour, target))
}

/// Signed column offset from the front (or back) center line of a strip,
/// for a continuous local column.
fn axis_offset(strip: &Strip, x: f64, front: bool) -> f64 {
    let w = strip.cols as f64;
    if front {
        x - w / 2.0
    } else {
        (x + w / 2.0).rem_euclid(w) - w / 2.0
    }
}

/// Stroke points that fall in `strip`, as local `(row, col)`.
fn local_points(strip: &Strip, points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    points
        .iter()
        .filter(|p| {
            p[0] >= strip.row0 as f64
                && p[1] >= strip.col0 as f64
                && p[0] < (strip.row0 + strip.rows) as f64
                && p[1] < (strip.col0 + strip.cols) as f64
        })
        .map(|p| [p[0] - strip.row0 as f64, p[1] - strip.col0 as f64])
        .collect()
}

/// Strip of `part` holding most stroke points, with those points local.
fn dominant_strip<'a>(layout: &'a UvLayout, part: BodyPartId, points: &[[f64; 2]]) -> Option<(&'a Strip, Vec<[f64; 2]>)> {
    let found: Vec<_> = layout
        .strips_of(part)
        .map(|s| (s, local_points(s, points)))
        .filter(|(_, p)| !p.is_empty())
        .collect();
    // max_by_key keeps the last maximum; reversing keeps the first strip on ties.
    found.into_iter().rev().max_by_key(|(_, p)| p.len())
}

fn majority_front(strip: &Strip, local: &[[f64; 2]]) -> bool {
    let front = local.iter().filter(|p| strip.is_front_col(p[1] as usize)).count();
    2 * front >= local.len()
}

fn strip_region(layout: &UvLayout, strip: &Strip, f: impl Fn(usize, usize) -> bool) -> Mask {
    Mask::from_fn(layout.height(), layout.width(), |r, c| {
        strip.contains(r, c) && f(r - strip.row0, c - strip.col0)
    })
}

fn length_cut_mask(layout: &UvLayout, strip: &Strip, local: &[[f64; 2]], front: bool) -> Mask {
    let mut rows: Vec<f64> = local.iter().map(|p| p[0]).collect();
    rows.sort_by(f64::total_cmp);
    let median = rows[rows.len() / 2];
    let cut = (median.floor() as usize + 1).min(strip.rows);
    strip_region(layout, strip, |lr, lc| lr < cut && strip.is_front_col(lc) == front)
}

fn contour_mask(layout: &UvLayout, strip: &Strip, local: &[[f64; 2]], front: bool) -> Mask {
    let max_row = local.iter().map(|p| p[0]).fold(0.0, f64::max);
    let rows = (max_row.floor() as usize + 1).min(strip.rows);
    let mean = local.iter().map(|p| axis_offset(strip, p[1], front)).sum::<f64>() / local.len() as f64;
    let (lo, hi) = (mean.min(0.0) - 0.5, mean.max(0.0) + 0.5);
    strip_region(layout, strip, |lr, lc| {
        let d = axis_offset(strip, lc as f64 + 0.5, front);
        lr < rows && strip.is_front_col(lc) == front && d >= lo && d <= hi
    })
}

/// Bare-skin region above a neckline stroke: for each column the stroke spans,
/// everything down to the stroke's lowest crossing.
fn neckline_notch(layout: &UvLayout, strip: &Strip, local: &[[f64; 2]], front: bool) -> Mask {
    let pts: Vec<[f64; 2]> = local.iter().map(|p| [p[0], axis_offset(strip, p[1], front)]).collect();
    let depth_at = |x: f64| -> Option<f64> {
        let mut best: Option<f64> = None;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (lo, hi) = (a[1].min(b[1]), a[1].max(b[1]));
            if x < lo || x > hi {
                continue;
            }
            let row = if hi - lo < 1e-9 {
                a[0].max(b[0])
            } else {
                a[0] + (x - a[1]) / (b[1] - a[1]) * (b[0] - a[0])
            };
            best = Some(best.map_or(row, |r: f64| r.max(row)));
        }
        best
    };
    let skin = strip_region(layout, strip, |lr, lc| {
        strip.is_front_col(lc) == front
            && depth_at(axis_offset(strip, lc as f64 + 0.5, front)).is_some_and(|d| (lr as f64 + 0.5) < d)
    });
    templates::notch_of(layout, &skin)
}

fn classify_neckline(layout: &UvLayout, notch: &Mask, front: bool) -> Result<&'static str> {
    let half = templates::neck_half(layout, front);
    let mut best: Option<(&'static str, f64)> = None;
    for class in NECKLINES {
        let skin = templates::neckline_skin(layout, class).expect("template class");
        let tmpl = templates::notch_of(layout, &skin).intersection(&half);
        let d = shape_match(notch, &tmpl)?.value;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((class, d));
        }
    }
    Ok(best.expect("templates exist").0)
}

fn fill_polygon(layout: &UvLayout, points: &[[f64; 2]]) -> Mask {
    let n = points.len();
    Mask::from_fn(layout.height(), layout.width(), |r, c| {
        let (y, x) = (r as f64 + 0.5, c as f64 + 0.5);
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (points[i], points[(i + 1) % n]);
            if (a[0] > y) != (b[0] > y) {
                let xc = a[1] + (y - a[0]) / (b[0] - a[0]) * (b[1] - a[1]);
                if x < xc {
                    inside = !inside;
                }
            }
        }
        inside
    })
}

/// Completes a single-view mask of `part` over every equivalent texel.
pub fn expand_partial_to_full(layout: &UvLayout, partial: &Mask, part: BodyPartId) -> Mask {
    layout.expand(&partial.intersection(&layout.part_mask(part)), ExpandOptions::default())
}

fn component(layout: &UvLayout, points: &[[f64; 2]], opts: ParseOptions) -> Result<SketchComponent> {
    let (sketch_type, part) = classify_stroke(points, layout)?;
    let part_mask = layout.part_mask(part);
    let expand = |m: &Mask| {
        if opts.expand {
            layout.expand(m, ExpandOptions { front_back: true, mirror: opts.mirror })
        } else {
            m.clone()
        }
    };
    let mut neckline_class = None;
    let (partial, edit_partial) = if sketch_type == SketchType::ClosedArea {
        let m = fill_polygon(layout, points).intersection(&part_mask);
        (m.clone(), m)
    } else {
        let (strip, local) = dominant_strip(layout, part, points)
            .ok_or_else(|| Error::InvalidStroke(format!("stroke has no points on the {part}")))?;
        let front = majority_front(strip, &local);
        match sketch_type {
            SketchType::LengthCut => {
                let m = length_cut_mask(layout, strip, &local, front);
                (m.clone(), m)
            }
            SketchType::Contour => {
                let m = contour_mask(layout, strip, &local, front);
                (m.clone(), m)
            }
            SketchType::Neckline => {
                let notch = neckline_notch(layout, strip, &local, front);
                if notch.is_empty() {
                    return Err(Error::InvalidStroke("neckline stroke does not dip below the collar".into()));
                }
                let class = classify_neckline(layout, &notch, front)?;
                neckline_class = Some(class);
                let half = templates::neck_half(layout, front);
                let cov = templates::neckline_coverage(layout, class).expect("template class");
                (cov.intersection(&half), half)
            }
            SketchType::ClosedArea => unreachable!(),
        }
    };
    if partial.is_empty() && sketch_type != SketchType::Neckline {
        return Err(Error::InvalidStroke(format!("{sketch_type:?} stroke encloses no texel")));
    }
    Ok(SketchComponent {
        sketch_type,
        target_part: part,
        mask_uv: expand(&partial).intersection(&part_mask),
        edit_mask: expand(&edit_partial).intersection(&part_mask),
        partial_edit: edit_partial.intersection(&part_mask),
        partial,
        neckline_class,
    })
}

/// Warps, classifies and reduces strokes to UV masks.
pub fn parse_sketch(
    strokes: &[SketchStroke],
    layout: &UvLayout,
    context: Option<&RenderOutput>,
    opts: ParseOptions,
) -> Result<ParsedSketch> {
    if strokes.is_empty() {
        return Err(Error::invalid("at least one stroke is required"));
    }
    let mut components = Vec::with_capacity(strokes.len());
    for s in strokes {
        let pts = stroke_to_uv(s, layout, context)?;
        components.push(component(layout, &pts, opts)?);
    }
    let (h, w) = (layout.height(), layout.width());
    let mut mask_uv = Mask::new(h, w);
    let mut edit_mask = Mask::new(h, w);
    for c in &components {
        mask_uv.union_in_place(&c.mask_uv);
        edit_mask.union_in_place(&c.edit_mask);
    }
    let first = &components[0];
    Ok(ParsedSketch {
        sketch_type: first.sketch_type,
        target_part: first.target_part,
        neckline_class: components.iter().find_map(|c| c.neckline_class),
        mask_uv,
        edit_mask,
        components,
    })
}
