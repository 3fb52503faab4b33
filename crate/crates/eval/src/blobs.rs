//! Random blob shapes: unions of ellipses, rasterized at texel centers, with
//! similarity transforms applied to the geometry rather than the raster.

use std::f64::consts::PI;

use rand::Rng;

use atelier_core::Mask;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub center: [f64; 2],
    pub radii: [f64; 2],
    pub angle: f64,
}

impl Ellipse {
    fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.center[0], y - self.center[1]);
        let (s, c) = self.angle.sin_cos();
        let u = (c * dx + s * dy) / self.radii[0];
        let v = (-s * dx + c * dy) / self.radii[1];
        u * u + v * v <= 1.0
    }
}

/// A blob in continuous `(x, y)` coordinates, centered near the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Blob {
    pub parts: Vec<Ellipse>,
}

/// Rotation (radians), uniform scale and translation, applied in that order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    pub angle: f64,
    pub scale: f64,
    pub offset: [f64; 2],
}

impl Blob {
    /// Three or four overlapping ellipses of different sizes, so the shape
    /// has no symmetry that would leave higher invariants near zero.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let k = rng.gen_range(3..=4);
        let mut parts = Vec::with_capacity(k);
        let mut at = [0.0, 0.0];
        for i in 0..k {
            let big = 12.0 - 2.0 * i as f64;
            parts.push(Ellipse {
                center: at,
                radii: [rng.gen_range(big * 0.6..big), rng.gen_range(3.0..big * 0.6)],
                angle: rng.gen_range(0.0..PI),
            });
            let dir = rng.gen_range(0.0..2.0 * PI);
            let step = rng.gen_range(6.0..10.0);
            at = [at[0] + step * dir.cos(), at[1] + step * dir.sin()];
        }
        Blob { parts }
    }

    pub fn transformed(&self, t: &Similarity) -> Blob {
        let (s, c) = t.angle.sin_cos();
        Blob {
            parts: self
                .parts
                .iter()
                .map(|e| {
                    let [x, y] = e.center;
                    Ellipse {
                        center: [
                            t.scale * (c * x - s * y) + t.offset[0],
                            t.scale * (s * x + c * y) + t.offset[1],
                        ],
                        radii: [e.radii[0] * t.scale, e.radii[1] * t.scale],
                        angle: e.angle + t.angle,
                    }
                })
                .collect(),
        }
    }

    /// Texels whose center `(col, row)` lies inside any ellipse.
    pub fn rasterize(&self, height: usize, width: usize) -> Mask {
        Mask::from_fn(height, width, |r, c| self.parts.iter().any(|e| e.contains(c as f64, r as f64)))
    }
}

/// A blob and a transformed copy, both fully inside a `size` square and at
/// least `min_texels` large.
pub fn blob_pair<R: Rng>(rng: &mut R, size: usize, min_texels: usize) -> (Mask, Mask, Similarity) {
    let mid = size as f64 / 2.0;
    loop {
        let blob = Blob::random(rng);
        let place = Similarity {
            angle: 0.0,
            scale: 1.0,
            offset: [mid + rng.gen_range(-8.0..8.0), mid + rng.gen_range(-8.0..8.0)],
        };
        let t = Similarity {
            angle: rng.gen_range(-PI..PI),
            scale: rng.gen_range(0.8..1.5),
            offset: [mid + rng.gen_range(-10.0..10.0), mid + rng.gen_range(-10.0..10.0)],
        };
        let a = blob.transformed(&place).rasterize(size, size);
        let b = blob.transformed(&t).rasterize(size, size);
        let inside = |m: &Mask| {
            !m.iter().any(|(r, c)| r == 0 || c == 0 || r + 1 == size || c + 1 == size)
        };
        if a.count() >= min_texels && b.count() >= min_texels && inside(&a) && inside(&b) {
            return (a, b, t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_transform_reproduces_the_raster() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Blob::random(&mut rng);
        let id = Similarity { angle: 0.0, scale: 1.0, offset: [64.0, 64.0] };
        let m = b.transformed(&id).rasterize(128, 128);
        let shifted = b.transformed(&Similarity { offset: [70.0, 61.0], ..id }).rasterize(128, 128);
        assert_eq!(m.count(), shifted.count());
        assert!(m.count() > 200);
    }

    #[test]
    fn scale_grows_area_quadratically() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = Blob::random(&mut rng);
        let a1 = b.transformed(&Similarity { angle: 0.3, scale: 1.0, offset: [64.0, 64.0] }).rasterize(128, 128).count();
        let a2 = b.transformed(&Similarity { angle: 0.3, scale: 2.0, offset: [64.0, 64.0] }).rasterize(128, 128).count();
        let ratio = a2 as f64 / a1 as f64;
        assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
    }
}
