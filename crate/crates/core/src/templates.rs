//! Garment geometry shared by corpus synthesis, measurement and the sketch
//! parser. Extents are defined on the 128-texel layout and scaled to the
//! actual strip sizes.

use crate::uv::{BodyPartId, Mask, Strip, StripId, UvLayout};

pub const NECKLINES: [&str; 4] = ["v-neck", "round", "boat", "square"];

/// Rows of the neck strip above the neckline base that are always bare.
pub const NECK_BASE_ROWS: f64 = 3.0;
const NECK_STD_ROWS: f64 = 24.0;

fn scaled(strip: &Strip, std_rows: f64, rows: f64) -> usize {
    ((rows * strip.rows as f64 / std_rows).round() as usize).min(strip.rows)
}

pub fn sleeve_fraction(value: &str) -> Option<f64> {
    Some(match value {
        "sleeveless" => 0.0,
        "short" => 16.0 / 72.0,
        "medium" => 40.0 / 72.0,
        "long" => 1.0,
        _ => return None,
    })
}

pub fn sleeve_class(fraction: f64) -> &'static str {
    if fraction >= 0.9 {
        "long"
    } else if fraction >= 0.45 {
        "medium"
    } else if fraction > 0.0 {
        "short"
    } else {
        "sleeveless"
    }
}

pub fn lower_fraction(value: &str) -> Option<f64> {
    Some(match value {
        "short" => 0.25,
        "knee" => 0.5,
        "medium" => 0.75,
        "long" => 1.0,
        _ => return None,
    })
}

pub fn lower_class(fraction: f64) -> &'static str {
    if fraction >= 0.9 {
        "long"
    } else if fraction >= 0.62 {
        "medium"
    } else if fraction >= 0.37 {
        "knee"
    } else {
        "short"
    }
}

/// Covered rows `[0, n)` of a limb strip for a length fraction.
pub fn extent_rows(strip: &Strip, fraction: f64) -> usize {
    ((fraction * strip.rows as f64).round() as usize).min(strip.rows)
}

/// Mask of a limb strip covered from its upper end down to `fraction`.
pub fn limb_coverage(layout: &UvLayout, id: StripId, fraction: f64) -> Mask {
    let s = layout.strip(id);
    let rows = extent_rows(s, fraction);
    Mask::from_fn(layout.height(), layout.width(), |r, c| {
        s.contains(r, c) && r - s.row0 < rows
    })
}

/// Hair on the head strip: a crown band plus the back half down to the length.
pub fn hair_coverage(layout: &UvLayout, value: &str) -> Option<Mask> {
    let length = match value {
        "short" => 8.0,
        "medium" => 14.0,
        "long" => 20.0,
        _ => return None,
    };
    let s = layout.strip(StripId::Head);
    let crown = scaled(s, 20.0, 5.0);
    let back = scaled(s, 20.0, length);
    Some(Mask::from_fn(layout.height(), layout.width(), |r, c| {
        if !s.contains(r, c) {
            return false;
        }
        let lr = r - s.row0;
        lr < crown || (!s.is_front_col(c - s.col0) && lr < back)
    }))
}

/// First covered row of the foot strip per shoe type.
pub fn shoe_start_row(layout: &UvLayout, value: &str) -> Option<usize> {
    let rows = match value {
        "flats" => 6.0,
        "heels" => 3.0,
        "sneakers" => 1.0,
        "boots" => 0.0,
        _ => return None,
    };
    Some(scaled(layout.strip(StripId::FootLeft), 12.0, rows))
}

pub fn shoe_color(value: &str) -> Option<[f32; 3]> {
    Some(match value {
        "flats" => [0.10, 0.10, 0.12],
        "heels" => [0.75, 0.10, 0.20],
        "sneakers" => [0.92, 0.92, 0.90],
        "boots" => [0.40, 0.25, 0.12],
        _ => return None,
    })
}

pub fn shoe_coverage(layout: &UvLayout, value: &str) -> Option<Mask> {
    let start = shoe_start_row(layout, value)?;
    let mut m = Mask::new(layout.height(), layout.width());
    for id in [StripId::FootLeft, StripId::FootRight] {
        let s = layout.strip(id);
        for r in s.row0 + start..s.row0 + s.rows {
            for c in s.col0..s.col0 + s.cols {
                m.set(r, c, true);
            }
        }
    }
    Some(m)
}

/// Angular distance from the nearest of the front or back center line.
pub fn neck_axis_distance(theta: f64) -> f64 {
    let a = theta.abs();
    a.min(std::f64::consts::PI - a)
}

/// Depth of bare skin below the collar, in 24-row neck units.
pub fn neckline_depth(class: &str, theta: f64) -> Option<f64> {
    let e = neck_axis_distance(theta);
    let extra = match class {
        "v-neck" => {
            if e < 0.6 {
                15.0 * (1.0 - e / 0.6)
            } else {
                0.0
            }
        }
        "round" => {
            if e < 0.7 {
                10.0 * (1.0 - (e / 0.7).powi(2)).sqrt()
            } else {
                0.0
            }
        }
        "square" => {
            if e < 0.5 {
                12.0
            } else {
                0.0
            }
        }
        "boat" => {
            if e < 1.2 {
                5.0
            } else {
                0.0
            }
        }
        _ => return None,
    };
    Some(NECK_BASE_ROWS + extra)
}

/// Bare-skin texels of the neck strip for a neckline class.
pub fn neckline_skin(layout: &UvLayout, class: &str) -> Option<Mask> {
    neckline_depth(class, 0.0)?;
    let s = layout.strip(StripId::Neck);
    let k = s.rows as f64 / NECK_STD_ROWS;
    Some(Mask::from_fn(layout.height(), layout.width(), |r, c| {
        if !s.contains(r, c) {
            return false;
        }
        let d = neckline_depth(class, s.angle_of_col(c - s.col0)).unwrap_or(0.0);
        ((r - s.row0) as f64 + 0.5) < d * k
    }))
}

/// Garment coverage of the neck strip for a neckline class.
pub fn neckline_coverage(layout: &UvLayout, class: &str) -> Option<Mask> {
    let skin = neckline_skin(layout, class)?;
    Some(layout.part_mask(BodyPartId::Neck).difference(&skin))
}

/// The part of a skin region below the base rows: the shape that tells
/// neckline classes apart.
pub fn notch_of(layout: &UvLayout, skin: &Mask) -> Mask {
    let s = layout.strip(StripId::Neck);
    let base = (NECK_BASE_ROWS * s.rows as f64 / NECK_STD_ROWS).round() as usize;
    Mask::from_fn(layout.height(), layout.width(), |r, c| {
        skin.get(r, c) && s.contains(r, c) && r - s.row0 >= base
    })
}

/// Neck texels on the front (or back) half of the strip.
pub fn neck_half(layout: &UvLayout, front: bool) -> Mask {
    let s = layout.strip(StripId::Neck);
    Mask::from_fn(layout.height(), layout.width(), |r, c| {
        s.contains(r, c) && s.is_front_col(c - s.col0) == front
    })
}

/// Limb strip texels on the front (or back) half.
pub fn strip_half(layout: &UvLayout, id: StripId, front: bool) -> Mask {
    let s = layout.strip(id);
    Mask::from_fn(layout.height(), layout.width(), |r, c| {
        s.contains(r, c) && s.is_front_col(c - s.col0) == front
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sleeve_classes_round_trip() {
        for v in ["sleeveless", "short", "medium", "long"] {
            assert_eq!(sleeve_class(sleeve_fraction(v).unwrap()), v);
        }
        for v in ["short", "knee", "medium", "long"] {
            assert_eq!(lower_class(lower_fraction(v).unwrap()), v);
        }
    }

    #[test]
    fn necklines_are_distinct_and_front_back_symmetric() {
        let l = UvLayout::standard();
        let skins: Vec<Mask> = NECKLINES.iter().map(|n| neckline_skin(&l, n).unwrap()).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(skins[i].symmetric_difference_count(&skins[j]) > 20, "{} {}", NECKLINES[i], NECKLINES[j]);
            }
            let front = skins[i].intersection(&neck_half(&l, true)).count();
            let back = skins[i].intersection(&neck_half(&l, false)).count();
            assert_eq!(front, back, "{}", NECKLINES[i]);
        }
    }

    #[test]
    fn neckline_coverage_stays_in_neck() {
        let l = UvLayout::standard();
        let neck = l.part_mask(BodyPartId::Neck);
        for n in NECKLINES {
            let cov = neckline_coverage(&l, n).unwrap();
            assert!(cov.is_subset_of(&neck));
            assert!(!cov.is_empty());
        }
    }

    #[test]
    fn hair_lengths_nest() {
        let l = UvLayout::standard();
        let s = hair_coverage(&l, "short").unwrap();
        let m = hair_coverage(&l, "medium").unwrap();
        let g = hair_coverage(&l, "long").unwrap();
        assert!(s.is_subset_of(&m) && m.is_subset_of(&g));
        assert!(g.is_subset_of(&l.part_mask(BodyPartId::Head)));
    }
}
