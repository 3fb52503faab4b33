//! Interactive UV-latent avatar generation and editing.
//!
//! An avatar is a [`UvLatent`]: a grid of feature vectors laid out over a
//! boundary-free body UV layout. Generation and editing never touch pixels
//! directly. They select latents from an annotated corpus (text attributes,
//! UV appearance, UV shape masks) and splice them together with part masks;
//! a deterministic procedural renderer turns the result into images.
//!
//! Module map:
//! - [`uv`]: latent grid, body-part layout, masks, image to UV warping
//! - [`render`]: texture decoding and the capsule-body rasterizer
//! - [`schema`]: attribute vocabulary, aliases, part annotations
//! - [`corpus`]: multimodal corpus entries, synthetic generation, persistence
//! - [`matchers`]: attribute, appearance (SSIM) and shape (Hu moment) scores
//! - [`parsers`]: keyword text parser and sketch parser
//! - [`samplers`]: two-stage text and sketch conditioned samplers
//! - [`editors`]: stateful edit sessions with undo
//! - [`measure`]: garment measurements recovered from renders

pub mod corpus;
pub mod editors;
pub mod error;
pub mod matchers;
pub mod measure;
pub mod parsers;
pub mod render;
pub mod samplers;
pub mod schema;
pub mod templates;
pub mod uv;

pub use error::{Error, Result};
pub use uv::{BodyPartId, Mask, PartMaskSet, PartialUvImage, UvCoordMap, UvLatent, UvLayout};
