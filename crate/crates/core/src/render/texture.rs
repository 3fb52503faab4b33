use crate::error::{Error, Result};
use crate::uv::{BodyPartId, Mask, UvLatent, UvLayout};

/// Fixed tone for uncovered texels.
pub const SKIN: [f32; 3] = [0.87, 0.72, 0.60];
pub const BACKGROUND: [f32; 3] = [0.94, 0.94, 0.96];

/// Latent channel roles read by [`decode_texture`].
pub mod channel {
    pub const COLOR: [usize; 3] = [0, 1, 2];
    pub const PATTERN: usize = 3;
    pub const FREQUENCY: usize = 4;
    pub const CONTRAST: usize = 5;
    pub const COVERAGE: usize = 6;
    pub const MIN_CHANNELS: usize = 8;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    Plain,
    Stripe,
    Checker,
    FloralDot,
}

impl Pattern {
    pub fn from_selector(v: f32) -> Self {
        if v < 0.5 {
            Pattern::Plain
        } else if v < 1.5 {
            Pattern::Stripe
        } else if v < 2.5 {
            Pattern::Checker
        } else {
            Pattern::FloralDot
        }
    }

    /// A selector value that decodes to this pattern.
    pub fn selector(self) -> f32 {
        match self {
            Pattern::Plain => 0.0,
            Pattern::Stripe => 1.0,
            Pattern::Checker => 2.0,
            Pattern::FloralDot => 3.0,
        }
    }

    /// Pattern intensity in `[0, 1]` at a texel; 1 is the base color.
    fn value(self, row: usize, col: usize, freq: f32) -> f32 {
        let band = |x: usize| ((x as f32 * freq).fract() < 0.5) as u8;
        match self {
            Pattern::Plain => 1.0,
            Pattern::Stripe => band(row) as f32,
            Pattern::Checker => (band(row) ^ band(col)) as f32,
            Pattern::FloralDot => {
                let period = 1.0 / freq;
                let dr = (row as f32 + 0.5) % period - period / 2.0;
                let dc = (col as f32 + 0.5) % period - period / 2.0;
                if (dr * dr + dc * dc).sqrt() < 0.3 * period {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

#[inline]
pub fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
pub fn logit(p: f32) -> f32 {
    (p / (1.0 - p)).ln()
}

/// Procedural decode of a latent into a UV texture.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodedTexture {
    pub height: usize,
    pub width: usize,
    pub color: Vec<[f32; 3]>,
    /// Garment (or hair, on the head) versus bare skin.
    pub coverage: Mask,
}

impl DecodedTexture {
    #[inline]
    pub fn color_at(&self, row: usize, col: usize) -> [f32; 3] {
        self.color[row * self.width + col]
    }
}

/// Texel-local decode: every output texel depends only on the same latent
/// texel. Channels: 0-2 base color logits, 3 pattern selector, 4 pattern
/// frequency, 5 pattern contrast, 6 coverage logit, 7 unused.
pub fn decode_texture(latent: &UvLatent) -> Result<DecodedTexture> {
    if latent.channels() < channel::MIN_CHANNELS {
        return Err(Error::invalid(format!(
            "decoding needs at least {} channels, latent has {}",
            channel::MIN_CHANNELS,
            latent.channels()
        )));
    }
    let (h, w, _) = latent.dims();
    let layout = UvLayout::new(h, w)?;
    let mut color = vec![[0.0f32; 3]; h * w];
    let mut coverage = Mask::new(h, w);
    for r in 0..h {
        for c in 0..w {
            let Some(part) = layout.part_at(r, c) else {
                continue;
            };
            let z = latent.texel(r, c);
            let covered = z[channel::COVERAGE] > 0.0;
            coverage.set(r, c, covered);
            color[r * w + c] = if !covered {
                SKIN
            } else {
                let base = channel::COLOR.map(|i| sigmoid(z[i]));
                if part == BodyPartId::Head {
                    base
                } else {
                    let pattern = Pattern::from_selector(z[channel::PATTERN]);
                    let freq = 0.05 + 0.2 * sigmoid(z[channel::FREQUENCY]);
                    let contrast = sigmoid(z[channel::CONTRAST]);
                    let k = 1.0 - contrast * (1.0 - pattern.value(r, c, freq));
                    base.map(|b| b * k)
                }
            };
        }
    }
    Ok(DecodedTexture {
        height: h,
        width: w,
        color,
        coverage,
    })
}
