//! UV-space primitives shared by every other module.

mod latent;
mod layout;
mod mask;
mod ops;
mod warp;

pub use latent::{UvLatent, DEFAULT_CHANNELS, DEFAULT_UV_SIZE};
pub use layout::{BodyPartId, ExpandOptions, PartMaskSet, Strip, StripId, UvLayout};
pub use mask::Mask;
pub use ops::{blend_latent, compose_latents};
pub use warp::{scatter, texel_of, warp_to_uv, ColorImage, PartialUvImage, UvCoordMap};
