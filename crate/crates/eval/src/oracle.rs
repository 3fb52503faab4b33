//! Brute-force reference implementations. They share no ranking, selection
//! or moment code with the library; the SSIM score itself is taken from the
//! library, which is checked against a windowed brute force in its own tests.

use std::collections::{BTreeMap, HashMap};

use atelier_core::corpus::{EntryId, MultimodalIndex};
use atelier_core::matchers::app_match;
use atelier_core::parsers::{ParsedSketch, TextQuery};
use atelier_core::render::render_canonical;
use atelier_core::schema::PartSlice;
use atelier_core::uv::warp_to_uv;
use atelier_core::{BodyPartId, Mask, PartialUvImage, Result, UvLatent};

/// Hu invariants from raw integer moments.
pub fn hu(mask: &Mask) -> [f64; 7] {
    let mut m = [[0i128; 4]; 4];
    for (r, c) in mask.iter() {
        let (x, y) = (c as i128, r as i128);
        for p in 0..4 {
            for q in 0..4 - p {
                m[p][q] += x.pow(p as u32) * y.pow(q as u32);
            }
        }
    }
    let n = m[0][0];
    assert!(n > 0, "empty mask");
    let (sx, sy) = (m[1][0], m[0][1]);
    // N^(p+q-1) * mu_pq
    let c20 = n * m[2][0] - sx * sx;
    let c02 = n * m[0][2] - sy * sy;
    let c11 = n * m[1][1] - sx * sy;
    let c30 = n * n * m[3][0] - 3 * n * sx * m[2][0] + 2 * sx * sx * sx;
    let c03 = n * n * m[0][3] - 3 * n * sy * m[0][2] + 2 * sy * sy * sy;
    let c21 = n * n * m[2][1] - n * (2 * sx * m[1][1] + sy * m[2][0]) + 2 * sx * sx * sy;
    let c12 = n * n * m[1][2] - n * (2 * sy * m[1][1] + sx * m[0][2]) + 2 * sy * sy * sx;
    let nf = n as f64;
    let eta2 = |c: i128| c as f64 / nf / nf.powf(2.0);
    let eta3 = |c: i128| c as f64 / nf.powi(2) / nf.powf(2.5);
    let (n20, n02, n11) = (eta2(c20), eta2(c02), eta2(c11));
    let (n30, n03, n21, n12) = (eta3(c30), eta3(c03), eta3(c21), eta3(c12));
    let a = n30 + n12;
    let b = n21 + n03;
    let p = n30 - 3.0 * n12;
    let q = 3.0 * n21 - n03;
    [
        n20 + n02,
        (n20 - n02).powi(2) + 4.0 * n11 * n11,
        p.powi(2) + q.powi(2),
        a * a + b * b,
        p * a * (a * a - 3.0 * b * b) + q * b * (3.0 * a * a - b * b),
        (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b,
        q * a * (a * a - 3.0 * b * b) - p * b * (3.0 * a * a - b * b),
    ]
}

pub fn hu_distance(a: &Mask, b: &Mask) -> f64 {
    let (ha, hb) = (hu(a), hu(b));
    let lg = |h: f64| h.signum() * (h.abs() + 1e-30).log10();
    (0..7)
        .filter(|&i| ha[i].abs() >= 1e-30 && hb[i].abs() >= 1e-30)
        .map(|i| (1.0 / lg(ha[i]) - 1.0 / lg(hb[i])).abs())
        .sum()
}

/// Fraction of query pairs the entry slice agrees with.
pub fn sem_score(entry: &PartSlice, query: &PartSlice) -> f64 {
    let hits = query.iter().filter(|(a, v)| entry.get(*a) == Some(*v)).count();
    hits as f64 / query.len() as f64
}

/// What a sampler run should produce.
#[derive(Clone, Debug, PartialEq)]
pub struct Expected {
    pub chosen: BTreeMap<BodyPartId, EntryId>,
    pub latent: UvLatent,
}

/// Ranked lists: best first, ties by id, keeping `keep` entries.
fn rank(mut scored: Vec<(EntryId, f64)>, higher_better: bool, keep: usize) -> Vec<EntryId> {
    scored.sort_by(|a, b| {
        let o = if higher_better { b.1.total_cmp(&a.1) } else { a.1.total_cmp(&b.1) };
        o.then(a.0.cmp(&b.0))
    });
    scored.into_iter().take(keep).map(|(id, _)| id).collect()
}

fn canonical_app(latent: &UvLatent) -> Result<PartialUvImage> {
    let out = render_canonical(latent)?;
    warp_to_uv(&out.color, &out.coords, (latent.height(), latent.width()))
}

/// Every combination in lexicographic rank order, scored, first maximum kept.
fn enumerate(
    index: &MultimodalIndex,
    lists: &[Vec<EntryId>],
    source: Option<&UvLatent>,
) -> Result<Vec<EntryId>> {
    if source.is_none() && lists.len() == 1 {
        return Ok(vec![lists[0][0]]);
    }
    let body = index.masks().body();
    let src = source.map(canonical_app).transpose()?;
    let mut combos: Vec<Vec<EntryId>> = vec![Vec::new()];
    for list in lists {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                list.iter().map(move |id| {
                    let mut next = c.clone();
                    next.push(*id);
                    next
                })
            })
            .collect();
    }
    // Scores are pure functions of their operands; remembering them keeps
    // the enumeration exhaustive without recomputing SSIM per combination.
    let mut memo: HashMap<(EntryId, Option<EntryId>), f64> = HashMap::new();
    let mut app = |a: EntryId, b: Option<EntryId>| -> Result<f64> {
        if let Some(v) = memo.get(&(a, b)) {
            return Ok(*v);
        }
        let other = match b {
            Some(b) => &index.entry(b)?.appearance_uv,
            None => src.as_ref().expect("source appearance"),
        };
        let v = app_match(&index.entry(a)?.appearance_uv, other, body)?.value;
        memo.insert((a, b), v);
        Ok(v)
    };
    let mut best: Option<(Vec<EntryId>, f64)> = None;
    for combo in combos {
        let score = if source.is_none() {
            let mut s = Vec::new();
            for i in 0..combo.len() {
                for j in i + 1..combo.len() {
                    s.push(app(combo[i], Some(combo[j]))?);
                }
            }
            s.iter().sum::<f64>() / s.len() as f64
        } else {
            let mut s = 0.0;
            for id in &combo {
                s += app(*id, None)?;
            }
            s / combo.len() as f64
        };
        if best.as_ref().is_none_or(|(_, b)| score > *b) {
            best = Some((combo, score));
        }
    }
    Ok(best.expect("nonempty product").0)
}

/// Texel-by-texel composition of the chosen entries.
fn assemble(
    index: &MultimodalIndex,
    chosen: &BTreeMap<BodyPartId, EntryId>,
    fill: EntryId,
    source: Option<&UvLatent>,
    edit_mask: &Mask,
) -> Result<UvLatent> {
    let layout = index.layout();
    let (h, w, ch) = index.dims();
    let mut out = UvLatent::zeros(h, w, ch);
    for r in 0..h {
        for c in 0..w {
            let from = match (source, layout.part_at(r, c).and_then(|p| chosen.get(&p))) {
                (Some(src), _) if !edit_mask.get(r, c) => Some(src),
                (Some(_), Some(id)) | (None, Some(id)) => Some(&index.entry(*id)?.latent),
                (Some(_), None) => None,
                (None, None) => Some(&index.entry(fill)?.latent),
            };
            if let Some(z) = from {
                out.texel_mut(r, c).copy_from_slice(z.texel(r, c));
            }
        }
    }
    Ok(out)
}

fn finish(
    index: &MultimodalIndex,
    lists: BTreeMap<BodyPartId, Vec<EntryId>>,
    source: Option<&UvLatent>,
    edit_mask: &Mask,
) -> Result<Expected> {
    let parts: Vec<BodyPartId> = lists.keys().copied().collect();
    let lists: Vec<Vec<EntryId>> = lists.into_values().collect();
    let pick = enumerate(index, &lists, source)?;
    let chosen: BTreeMap<BodyPartId, EntryId> = parts.into_iter().zip(pick.iter().copied()).collect();
    let latent = assemble(index, &chosen, pick[0], source, edit_mask)?;
    Ok(Expected { chosen, latent })
}

/// Brute-force text sampler. `None` when some part has no positive match.
pub fn text(index: &MultimodalIndex, query: &TextQuery, source: Option<&UvLatent>, n: usize) -> Result<Option<Expected>> {
    let mut lists = BTreeMap::new();
    for (part, slice) in &query.parts {
        let scored: Vec<(EntryId, f64)> = index
            .entries()
            .iter()
            .map(|e| (e.id, sem_score(&e.annotation.slice(*part), slice)))
            .filter(|(_, s)| *s > 0.0)
            .collect();
        if scored.is_empty() {
            return Ok(None);
        }
        lists.insert(*part, rank(scored, true, n));
    }
    finish(index, lists, source, &query.edit_mask).map(Some)
}

/// Brute-force sketch sampler over `mask_uv ∩ M_p ∩ V_can`.
pub fn sketch(index: &MultimodalIndex, sketch: &ParsedSketch, source: Option<&UvLatent>, k: usize) -> Result<Option<Expected>> {
    let mut lists = BTreeMap::new();
    let mut parts: Vec<BodyPartId> = sketch.components.iter().map(|c| c.target_part).collect();
    parts.sort();
    parts.dedup();
    for part in parts {
        let q = Mask::from_fn(sketch.mask_uv.height(), sketch.mask_uv.width(), |r, c| {
            sketch.mask_uv.get(r, c) && index.masks().part(part).get(r, c) && index.canonical_visibility().get(r, c)
        });
        if q.is_empty() {
            return Ok(None);
        }
        let scored: Vec<(EntryId, f64)> = index
            .entries()
            .iter()
            .filter(|e| !e.shape_mask(part).is_empty())
            .map(|e| (e.id, hu_distance(e.shape_mask(part), &q)))
            .collect();
        if scored.is_empty() {
            return Ok(None);
        }
        lists.insert(part, rank(scored, false, k));
    }
    finish(index, lists, source, &sketch.edit_mask).map(Some)
}
