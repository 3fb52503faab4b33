use super::mask::Mask;
use crate::error::{Error, Result};

/// Linear RGB image with components in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[f32; 3]>,
}

impl ColorImage {
    pub fn filled(width: usize, height: usize, color: [f32; 3]) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f32; 3] {
        self.pixels[y * self.width + x]
    }

    /// 8-bit sRGB-agnostic quantization, row-major RGB.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .flat_map(|p| p.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8))
            .collect()
    }
}

/// Per-pixel UV coordinates of a render. Pixels that show no body surface
/// are invalid. Every rasterized pixel is front-most, so validity doubles as
/// the visibility flag.
#[derive(Clone, Debug, PartialEq)]
pub struct UvCoordMap {
    pub width: usize,
    pub height: usize,
    pub uv: Vec<[f32; 2]>,
    pub valid: Vec<bool>,
    /// View-space depth, smaller is nearer. Not part of the `UVCM` file
    /// format; maps read from disk carry zeros.
    pub depth: Vec<f32>,
}

const UVCM_MAGIC: &[u8; 4] = b"UVCM";

impl UvCoordMap {
    pub fn invalid(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            uv: vec![[0.0; 2]; width * height],
            valid: vec![false; width * height],
            depth: vec![f32::INFINITY; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<[f32; 2]> {
        let i = y * self.width + x;
        self.valid[i].then(|| self.uv[i])
    }

    /// `UVCM` file: magic, u32 width, u32 height, `width*height` (u, v)
    /// little-endian f32 pairs, then one validity byte per pixel.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.width * self.height;
        let mut out = Vec::with_capacity(12 + n * 9);
        out.extend_from_slice(UVCM_MAGIC);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        for uv in &self.uv {
            out.extend_from_slice(&uv[0].to_le_bytes());
            out.extend_from_slice(&uv[1].to_le_bytes());
        }
        out.extend(self.valid.iter().map(|v| *v as u8));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..4] != UVCM_MAGIC {
            return Err(Error::invalid("not a UVCM raster"));
        }
        let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let n = width * height;
        if bytes.len() != 12 + n * 9 {
            return Err(Error::invalid("UVCM raster has the wrong length"));
        }
        let body = &bytes[12..];
        let uv = body[..n * 8]
            .chunks_exact(8)
            .map(|c| {
                [
                    f32::from_le_bytes(c[..4].try_into().unwrap()),
                    f32::from_le_bytes(c[4..].try_into().unwrap()),
                ]
            })
            .collect();
        let valid = body[n * 8..].iter().map(|b| *b != 0).collect();
        Ok(Self {
            width,
            height,
            uv,
            valid,
            depth: vec![0.0; n],
        })
    }
}

/// Texel `(row, col)` nearest to a UV coordinate on an `height x width` grid.
#[inline]
pub fn texel_of(uv: [f32; 2], height: usize, width: usize) -> (usize, usize) {
    let col = ((uv[0] * width as f32).max(0.0) as usize).min(width - 1);
    let row = ((uv[1] * height as f32).max(0.0) as usize).min(height - 1);
    (row, col)
}

/// Scatters per-pixel values into UV texels. When several visible pixels hit
/// one texel the nearest (smallest depth) wins; exact ties keep the first
/// pixel in scan order.
pub fn scatter<T: Copy>(values: &[T], coords: &UvCoordMap, height: usize, width: usize) -> Vec<Option<T>> {
    let mut out: Vec<Option<T>> = vec![None; height * width];
    let mut best = vec![f32::INFINITY; height * width];
    for (i, v) in values.iter().enumerate() {
        if !coords.valid[i] {
            continue;
        }
        let (r, c) = texel_of(coords.uv[i], height, width);
        let t = r * width + c;
        let d = coords.depth[i];
        if out[t].is_none() || d < best[t] {
            out[t] = Some(*v);
            best[t] = d;
        }
    }
    out
}

/// Colors observed in UV space from one view, with the texels it covers.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialUvImage {
    pub height: usize,
    pub width: usize,
    /// Zero wherever `valid` is unset.
    pub color: Vec<[f32; 3]>,
    pub valid: Mask,
}

impl PartialUvImage {
    pub fn empty(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            color: vec![[0.0; 3]; height * width],
            valid: Mask::new(height, width),
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<[f32; 3]> {
        self.valid.get(row, col).then(|| self.color[row * self.width + col])
    }
}

/// Warps an image into UV space through its coordinate map.
pub fn warp_to_uv(image: &ColorImage, coords: &UvCoordMap, uv_dims: (usize, usize)) -> Result<PartialUvImage> {
    if image.width != coords.width || image.height != coords.height {
        return Err(Error::invalid(format!(
            "image is {}x{} but coordinate map is {}x{}",
            image.width, image.height, coords.width, coords.height
        )));
    }
    let (h, w) = uv_dims;
    if h == 0 || w == 0 {
        return Err(Error::invalid("UV grid must be nonempty"));
    }
    let hits = scatter(&image.pixels, coords, h, w);
    let mut out = PartialUvImage::empty(h, w);
    for (t, hit) in hits.into_iter().enumerate() {
        if let Some(px) = hit {
            out.color[t] = px;
            out.valid.set(t / w, t % w, true);
        }
    }
    Ok(out)
}
