use crate::error::{Error, Result};
use crate::render::{render_canonical, RenderOutput, SegLabel};
use crate::schema::PartAnnotation;
use crate::uv::{scatter, warp_to_uv, BodyPartId, Mask, PartialUvImage, UvLatent, UvLayout};

pub type EntryId = u32;

/// Segmentation labels warped into UV space; `BACKGROUND` where unobserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegUv {
    pub height: usize,
    pub width: usize,
    pub labels: Vec<SegLabel>,
}

impl SegUv {
    pub fn from_render(out: &RenderOutput, height: usize, width: usize) -> Self {
        let labels = scatter(&out.seg, &out.coords, height, width)
            .into_iter()
            .map(|l| l.unwrap_or(SegLabel::BACKGROUND))
            .collect();
        Self { height, width, labels }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> SegLabel {
        self.labels[row * self.width + col]
    }

    /// Texels observed in the view.
    pub fn observed(&self) -> Mask {
        Mask::from_fn(self.height, self.width, |r, c| self.get(r, c) != SegLabel::BACKGROUND)
    }

    /// Observed texels labelled as covered by garment or hair.
    pub fn covered(&self) -> Mask {
        Mask::from_fn(self.height, self.width, |r, c| self.get(r, c).covered())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.labels.len());
        out.extend_from_slice(b"UVSG");
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend(self.labels.iter().map(|l| l.raw()));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let corrupt = |m: &str| Error::CorruptCorpus(format!("segmentation raster: {m}"));
        if bytes.len() < 12 || &bytes[..4] != b"UVSG" {
            return Err(corrupt("bad header"));
        }
        let h = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let w = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        if bytes.len() != 12 + h * w {
            return Err(corrupt("length does not match header"));
        }
        let labels = bytes[12..]
            .iter()
            .map(|b| SegLabel::from_raw(*b).ok_or_else(|| corrupt("unknown label")))
            .collect::<Result<_>>()?;
        Ok(Self { height: h, width: w, labels })
    }
}

pub fn appearance_to_bytes(img: &PartialUvImage) -> Vec<u8> {
    let n = img.height * img.width;
    let mut out = Vec::with_capacity(12 + n * 13);
    out.extend_from_slice(b"UVAP");
    out.extend_from_slice(&(img.height as u32).to_le_bytes());
    out.extend_from_slice(&(img.width as u32).to_le_bytes());
    for px in &img.color {
        for v in px {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.extend(img.valid.bits().iter().map(|b| *b as u8));
    out
}

pub fn appearance_from_bytes(bytes: &[u8]) -> Result<PartialUvImage> {
    let corrupt = |m: &str| Error::CorruptCorpus(format!("appearance raster: {m}"));
    if bytes.len() < 12 || &bytes[..4] != b"UVAP" {
        return Err(corrupt("bad header"));
    }
    let h = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let n = h * w;
    if bytes.len() != 12 + n * 13 {
        return Err(corrupt("length does not match header"));
    }
    let mut img = PartialUvImage::empty(h, w);
    for (i, chunk) in bytes[12..12 + n * 12].chunks_exact(12).enumerate() {
        for k in 0..3 {
            img.color[i][k] = f32::from_le_bytes(chunk[k * 4..k * 4 + 4].try_into().unwrap());
        }
    }
    for (i, b) in bytes[12 + n * 12..].iter().enumerate() {
        match b {
            0 => {}
            1 => img.valid.set(i / w, i % w, true),
            _ => return Err(corrupt("validity byte out of range")),
        }
    }
    Ok(img)
}

/// One base latent with everything derived from its canonical render.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub id: EntryId,
    pub latent: UvLatent,
    pub appearance_uv: PartialUvImage,
    pub seg_uv: SegUv,
    /// Indexed by `BodyPartId::code`.
    pub shape_masks: Vec<Mask>,
    pub annotation: PartAnnotation,
}

impl CorpusEntry {
    pub fn shape_mask(&self, part: BodyPartId) -> &Mask {
        &self.shape_masks[part.code() as usize]
    }

    /// The canonical image is not stored; it is reproduced on demand.
    pub fn canonical_render(&self) -> Result<RenderOutput> {
        render_canonical(&self.latent)
    }
}

/// Shape masks as covered, observed texels of each part region.
pub fn shape_masks_from_seg(layout: &UvLayout, seg: &SegUv) -> Vec<Mask> {
    let covered = seg.covered();
    BodyPartId::ALL
        .iter()
        .map(|p| covered.intersection(&layout.part_mask(*p)))
        .collect()
}

/// Derives appearance, segmentation and shape masks from the canonical render.
pub fn build_entry(id: EntryId, latent: UvLatent, annotation: PartAnnotation) -> Result<CorpusEntry> {
    let (h, w, _) = latent.dims();
    let layout = UvLayout::new(h, w)?;
    let out = render_canonical(&latent)?;
    let appearance_uv = warp_to_uv(&out.color, &out.coords, (h, w))?;
    let seg_uv = SegUv::from_render(&out, h, w);
    let shape_masks = shape_masks_from_seg(&layout, &seg_uv);
    Ok(CorpusEntry {
        id,
        latent,
        appearance_uv,
        seg_uv,
        shape_masks,
        annotation,
    })
}
