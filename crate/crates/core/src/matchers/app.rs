use crate::error::{Error, Result};
use crate::uv::{Mask, PartialUvImage};

use super::MatchScore;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
const L: f64 = 1.0;
pub const SSIM_C1: f64 = (0.01 * L) * (0.01 * L);
pub const SSIM_C2: f64 = (0.03 * L) * (0.03 * L);

/// Normalized 1-D Gaussian taps.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let half = (size / 2) as f64;
    let mut k: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - half;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable zero-padded blur of `src` over the window `[r0, r1) x [c0, c1)`.
/// Values outside the window are treated as zero.
struct Blur<'a> {
    kernel: &'a [f64],
    r0: usize,
    c0: usize,
    h: usize,
    w: usize,
}

impl Blur<'_> {
    fn run(&self, src: &[f64]) -> Vec<f64> {
        let half = self.kernel.len() / 2;
        let (h, w) = (self.h, self.w);
        let mut tmp = vec![0.0; h * w];
        for r in 0..h {
            for c in 0..w {
                let mut acc = 0.0;
                for (k, g) in self.kernel.iter().enumerate() {
                    let cc = c as isize + k as isize - half as isize;
                    if cc >= 0 && (cc as usize) < w {
                        acc += g * src[r * w + cc as usize];
                    }
                }
                tmp[r * w + c] = acc;
            }
        }
        let mut out = vec![0.0; h * w];
        for r in 0..h {
            for c in 0..w {
                let mut acc = 0.0;
                for (k, g) in self.kernel.iter().enumerate() {
                    let rr = r as isize + k as isize - half as isize;
                    if rr >= 0 && (rr as usize) < h {
                        acc += g * tmp[rr as usize * w + c];
                    }
                }
                out[r * w + c] = acc;
            }
        }
        out
    }
}

/// Masked multichannel SSIM.
///
/// Window statistics are Gaussian-weighted over texels observed in both
/// images, renormalized by the observed weight. The SSIM map is averaged over
/// `mask ∧ V_a ∧ V_b` and then over the three channels.
pub fn app_match(a: &PartialUvImage, b: &PartialUvImage, mask: &Mask) -> Result<MatchScore> {
    if (a.height, a.width) != (b.height, b.width) || mask.dims() != (a.height, a.width) {
        return Err(Error::invalid(format!(
            "app_match needs equal dimensions, got {}x{}, {}x{} and mask {}x{}",
            a.height,
            a.width,
            b.height,
            b.width,
            mask.height(),
            mask.width()
        )));
    }
    let both = a.valid.intersection(&b.valid);
    let eff = mask.intersection(&both);
    if eff.is_empty() {
        return Err(Error::UndefinedComparison(
            "mask and both validity masks share no texel".into(),
        ));
    }
    let (mut rmin, mut rmax, mut cmin, mut cmax) = (usize::MAX, 0, usize::MAX, 0);
    for (r, c) in eff.iter() {
        rmin = rmin.min(r);
        rmax = rmax.max(r);
        cmin = cmin.min(c);
        cmax = cmax.max(c);
    }
    let half = SSIM_WINDOW / 2;
    let r0 = rmin.saturating_sub(half);
    let r1 = (rmax + half + 1).min(a.height);
    let c0 = cmin.saturating_sub(half);
    let c1 = (cmax + half + 1).min(a.width);
    let kernel = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA);
    let blur = Blur {
        kernel: &kernel,
        r0,
        c0,
        h: r1 - r0,
        w: c1 - c0,
    };
    let n = blur.h * blur.w;
    let at = |r: usize, c: usize| (r0 + r) * a.width + (c0 + c);
    let mut v = vec![0.0; n];
    for r in 0..blur.h {
        for c in 0..blur.w {
            if both.get(r0 + r, c0 + c) {
                v[r * blur.w + c] = 1.0;
            }
        }
    }
    let weight = blur.run(&v);

    let mut total = 0.0;
    for ch in 0..3 {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut xx = vec![0.0; n];
        let mut yy = vec![0.0; n];
        let mut xy = vec![0.0; n];
        for r in 0..blur.h {
            for c in 0..blur.w {
                let i = r * blur.w + c;
                if v[i] == 0.0 {
                    continue;
                }
                let p = a.color[at(r, c)][ch] as f64;
                let q = b.color[at(r, c)][ch] as f64;
                x[i] = p;
                y[i] = q;
                xx[i] = p * p;
                yy[i] = q * q;
                xy[i] = p * q;
            }
        }
        let (sx, sy, sxx, syy, sxy) = (blur.run(&x), blur.run(&y), blur.run(&xx), blur.run(&yy), blur.run(&xy));
        let mut sum = 0.0;
        let mut count = 0usize;
        for r in 0..blur.h {
            for c in 0..blur.w {
                if !eff.get(blur.r0 + r, blur.c0 + c) {
                    continue;
                }
                let i = r * blur.w + c;
                let wgt = weight[i];
                let mx = sx[i] / wgt;
                let my = sy[i] / wgt;
                let vx = sxx[i] / wgt - mx * mx;
                let vy = syy[i] / wgt - my * my;
                let cxy = sxy[i] / wgt - mx * my;
                let num = (2.0 * (mx * my) + SSIM_C1) * (2.0 * cxy + SSIM_C2);
                let den = (mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2);
                sum += num / den;
                count += 1;
            }
        }
        total += sum / count as f64;
    }
    Ok(MatchScore::higher(total / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noisy(h: usize, w: usize, seed: u64) -> PartialUvImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut img = PartialUvImage::empty(h, w);
        for r in 0..h {
            for c in 0..w {
                if rng.gen_bool(0.8) {
                    img.valid.set(r, c, true);
                    img.color[r * w + c] = [rng.gen(), rng.gen(), rng.gen()];
                }
            }
        }
        img
    }

    /// Direct per-texel evaluation of the same definition.
    fn brute(a: &PartialUvImage, b: &PartialUvImage, mask: &Mask) -> f64 {
        let g = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA);
        let half = (SSIM_WINDOW / 2) as isize;
        let mut total = 0.0;
        for ch in 0..3 {
            let (mut sum, mut n) = (0.0, 0);
            for r in 0..a.height {
                for c in 0..a.width {
                    let ok = |r: usize, c: usize| a.valid.get(r, c) && b.valid.get(r, c);
                    if !mask.get(r, c) || !ok(r, c) {
                        continue;
                    }
                    let (mut w, mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
                    for dr in -half..=half {
                        for dc in -half..=half {
                            let (rr, cc) = (r as isize + dr, c as isize + dc);
                            if rr < 0 || cc < 0 || rr >= a.height as isize || cc >= a.width as isize {
                                continue;
                            }
                            let (rr, cc) = (rr as usize, cc as usize);
                            if !ok(rr, cc) {
                                continue;
                            }
                            let k = g[(dr + half) as usize] * g[(dc + half) as usize];
                            let x = a.color[rr * a.width + cc][ch] as f64;
                            let y = b.color[rr * a.width + cc][ch] as f64;
                            w += k;
                            sx += k * x;
                            sy += k * y;
                            sxx += k * x * x;
                            syy += k * y * y;
                            sxy += k * x * y;
                        }
                    }
                    let (mx, my) = (sx / w, sy / w);
                    let (vx, vy, cxy) = (sxx / w - mx * mx, syy / w - my * my, sxy / w - mx * my);
                    sum += ((2.0 * mx * my + SSIM_C1) * (2.0 * cxy + SSIM_C2))
                        / ((mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2));
                    n += 1;
                }
            }
            total += sum / n as f64;
        }
        total / 3.0
    }

    #[test]
    fn matches_direct_window_evaluation() {
        let a = noisy(24, 20, 1);
        let b = noisy(24, 20, 2);
        let mask = Mask::from_fn(24, 20, |r, c| r > 3 && c < 15);
        let got = app_match(&a, &b, &mask).unwrap().value;
        assert!((got - brute(&a, &b, &mask)).abs() < 1e-9);
    }

    #[test]
    fn self_similarity_and_symmetry() {
        let a = noisy(32, 32, 3);
        let b = noisy(32, 32, 4);
        let m = Mask::full(32, 32);
        assert!((app_match(&a, &a, &m).unwrap().value - 1.0).abs() < 1e-9);
        let ab = app_match(&a, &b, &m).unwrap().value;
        let ba = app_match(&b, &a, &m).unwrap().value;
        assert_eq!(ab, ba);
        assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn inverse_scores_below_small_noise() {
        let a = noisy(32, 32, 5);
        let mut inv = a.clone();
        let mut near = a.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for i in 0..a.color.len() {
            inv.color[i] = a.color[i].map(|v| 1.0 - v);
            near.color[i] = a.color[i].map(|v| v + rng.gen_range(-0.01..0.01));
        }
        let m = Mask::full(32, 32);
        assert!(app_match(&a, &inv, &m).unwrap().value < app_match(&a, &near, &m).unwrap().value);
    }

    #[test]
    fn empty_overlap_is_undefined() {
        let a = noisy(16, 16, 6);
        let err = app_match(&a, &a, &Mask::new(16, 16)).unwrap_err();
        assert_eq!(err.code(), "undefined-comparison");
        let err = app_match(&a, &PartialUvImage::empty(16, 16), &Mask::full(16, 16)).unwrap_err();
        assert_eq!(err.code(), "undefined-comparison");
    }
}
