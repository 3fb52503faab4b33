use super::latent::UvLatent;
use super::mask::Mask;
use crate::error::{Error, Result};

fn check_mask(latent: &UvLatent, mask: &Mask) -> Result<()> {
    if mask.dims() != (latent.height(), latent.width()) {
        return Err(Error::invalid(format!(
            "mask is {}x{} but latent is {}x{}",
            mask.height(),
            mask.width(),
            latent.height(),
            latent.width()
        )));
    }
    Ok(())
}

/// Builds a latent from disjoint masked pieces: each covered texel takes the
/// latent of the mask covering it, uncovered texels are zero.
pub fn compose_latents(parts: &[(&UvLatent, &Mask)]) -> Result<UvLatent> {
    let Some((first, _)) = parts.first() else {
        return Err(Error::invalid("compose_latents needs at least one part"));
    };
    for (i, (z, m)) in parts.iter().enumerate() {
        if !z.same_dims(first) {
            return Err(Error::invalid("latents to compose differ in dimensions"));
        }
        check_mask(z, m)?;
        for (_, m2) in &parts[i + 1..] {
            if !m.is_disjoint(m2) {
                return Err(Error::invalid("composition masks overlap"));
            }
        }
    }
    let (h, w, c) = first.dims();
    let mut out = UvLatent::zeros(h, w, c);
    for (z, m) in parts {
        for (r, col) in m.iter() {
            out.texel_mut(r, col).copy_from_slice(z.texel(r, col));
        }
    }
    Ok(out)
}

/// `target` where `mask` is set, `source` elsewhere; both sides copied exactly.
pub fn blend_latent(source: &UvLatent, target: &UvLatent, mask: &Mask) -> Result<UvLatent> {
    if !source.same_dims(target) {
        return Err(Error::invalid("blend latents differ in dimensions"));
    }
    check_mask(source, mask)?;
    let mut out = source.clone();
    for (r, c) in mask.iter() {
        out.texel_mut(r, c).copy_from_slice(target.texel(r, c));
    }
    Ok(out)
}
