use crate::error::{Error, Result};
use crate::uv::Mask;

use super::MatchScore;

pub const HU_EPSILON: f64 = 1e-30;

/// Central moment numerators `N^(p+q) * mu_pq` for p + q in 2..=3, indexed
/// `[p][q]`. Exact in integers while they fit; symmetric masks then get exact
/// zeros instead of rounding noise.
fn scaled_central_moments(mask: &Mask) -> Option<(f64, [[f64; 4]; 4])> {
    let (mut n, mut sx, mut sy) = (0i128, 0i128, 0i128);
    for (r, c) in mask.iter() {
        n += 1;
        sx += c as i128;
        sy += r as i128;
    }
    if n == 0 {
        return None;
    }
    let side = mask.height().max(mask.width()) as f64;
    let bound = (n as f64) * (n as f64 * side).powi(3);
    let mut mu = [[0.0f64; 4]; 4];
    if bound < 1e37 {
        let mut m = [[0i128; 4]; 4];
        for (r, c) in mask.iter() {
            let dx = n * c as i128 - sx;
            let dy = n * r as i128 - sy;
            let (dx2, dy2) = (dx * dx, dy * dy);
            m[2][0] += dx2;
            m[0][2] += dy2;
            m[1][1] += dx * dy;
            m[3][0] += dx2 * dx;
            m[0][3] += dy2 * dy;
            m[2][1] += dx2 * dy;
            m[1][2] += dx * dy2;
        }
        for p in 0..4 {
            for q in 0..4 {
                mu[p][q] = m[p][q] as f64;
            }
        }
    } else {
        let nf = n as f64;
        let (xc, yc) = (sx as f64, sy as f64);
        for (r, c) in mask.iter() {
            let dx = nf * c as f64 - xc;
            let dy = nf * r as f64 - yc;
            let (dx2, dy2) = (dx * dx, dy * dy);
            mu[2][0] += dx2;
            mu[0][2] += dy2;
            mu[1][1] += dx * dy;
            mu[3][0] += dx2 * dx;
            mu[0][3] += dy2 * dy;
            mu[2][1] += dx2 * dy;
            mu[1][2] += dx * dy2;
        }
    }
    Some((n as f64, mu))
}

/// The seven Hu invariants of a binary mask, using texel centers with
/// x = column and y = row.
pub fn hu_moments(mask: &Mask) -> Result<[f64; 7]> {
    let (n, mu) = scaled_central_moments(mask).ok_or_else(|| Error::invalid("Hu moments of an empty mask"))?;
    let eta = |p: usize, q: usize| {
        let k = (p + q) as i32;
        mu[p][q] / n.powi(k) / n.powf(1.0 + k as f64 / 2.0)
    };
    let (n20, n02, n11) = (eta(2, 0), eta(0, 2), eta(1, 1));
    let (n30, n03, n21, n12) = (eta(3, 0), eta(0, 3), eta(2, 1), eta(1, 2));
    let a = n30 + n12;
    let b = n21 + n03;
    let h1 = n20 + n02;
    let h2 = (n20 - n02).powi(2) + 4.0 * n11 * n11;
    let h3 = (n30 - 3.0 * n12).powi(2) + (3.0 * n21 - n03).powi(2);
    let h4 = a * a + b * b;
    let h5 = (n30 - 3.0 * n12) * a * (a * a - 3.0 * b * b) + (3.0 * n21 - n03) * b * (3.0 * a * a - b * b);
    let h6 = (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b;
    let h7 = (3.0 * n21 - n03) * a * (a * a - 3.0 * b * b) - (n30 - 3.0 * n12) * b * (3.0 * a * a - b * b);
    Ok([h1, h2, h3, h4, h5, h6, h7])
}

fn log_moment(h: f64) -> f64 {
    h.signum() * (h.abs() + HU_EPSILON).log10()
}

/// Hu-moment distance (method I1). Lower is better.
pub fn shape_match(a: &Mask, b: &Mask) -> Result<MatchScore> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("shape_match needs two nonempty masks"));
    }
    let ha = hu_moments(a)?;
    let hb = hu_moments(b)?;
    let mut d = 0.0;
    for i in 0..7 {
        if ha[i].abs() < HU_EPSILON || hb[i].abs() < HU_EPSILON {
            continue;
        }
        d += (1.0 / log_moment(ha[i]) - 1.0 / log_moment(hb[i])).abs();
    }
    Ok(MatchScore::lower(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(h: usize, w: usize, r0: usize, c0: usize, rh: usize, rw: usize) -> Mask {
        Mask::from_fn(h, w, |r, c| r >= r0 && r < r0 + rh && c >= c0 && c < c0 + rw)
    }

    #[test]
    fn identical_masks_have_zero_distance() {
        let m = Mask::from_fn(64, 64, |r, c| (r as i32 - 30).pow(2) + (c as i32 - 20).pow(2) * 3 < 200 || (r > 40 && c > 40));
        assert_eq!(shape_match(&m, &m).unwrap().value, 0.0);
    }

    #[test]
    fn symmetric_masks_have_exact_zero_odd_invariants() {
        let h = hu_moments(&rect(128, 128, 20, 7, 40, 24)).unwrap();
        assert_eq!(&h[2..], &[0.0; 5]);
        let disk = Mask::from_fn(64, 64, |r, c| (r as i32 - 31).pow(2) + (c as i32 - 31).pow(2) <= 200);
        assert_eq!(hu_moments(&disk).unwrap()[1], 0.0);
    }

    #[test]
    fn translation_is_exactly_invariant() {
        let a = rect(64, 64, 3, 4, 10, 20);
        let b = rect(64, 64, 30, 33, 10, 20);
        assert!(shape_match(&a, &b).unwrap().value < 1e-9);
    }

    #[test]
    fn rectangle_hu_matches_closed_form() {
        // Discrete w x h rectangle: mu20 = m00 (w^2 - 1) / 12.
        let m = rect(64, 64, 0, 0, 10, 20);
        let n = 200.0f64;
        let n20 = n * (400.0 - 1.0) / 12.0 / (n * n);
        let n02 = n * (100.0 - 1.0) / 12.0 / (n * n);
        let h = hu_moments(&m).unwrap();
        assert!((h[0] - (n20 + n02)).abs() < 1e-12);
        assert!((h[1] - (n20 - n02).powi(2)).abs() < 1e-12);
        assert_eq!(h[2], 0.0);
    }

    #[test]
    fn symmetric_and_distinguishing() {
        let a = rect(64, 64, 0, 0, 8, 40);
        let b = rect(64, 64, 10, 10, 20, 20);
        let ab = shape_match(&a, &b).unwrap().value;
        assert_eq!(ab, shape_match(&b, &a).unwrap().value);
        assert!(ab > 0.1);
    }

    #[test]
    fn empty_mask_is_rejected() {
        let a = rect(8, 8, 0, 0, 2, 2);
        assert_eq!(shape_match(&a, &Mask::new(8, 8)).unwrap_err().code(), "invalid-argument");
    }
}
