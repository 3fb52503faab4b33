//! Deterministic procedural stand-in for a neural avatar renderer.
//!
//! A latent decodes texel-by-texel into a garment texture
//! ([`decode_texture`]); an articulated capsule body carrying the UV layout
//! is posed, scaled and ray-cast orthographically ([`render`]).

mod body;
mod params;
mod raster;
mod texture;

pub use body::{build_body, intersect_down_z, Capsule, Vec3};
pub use params::{BodyPose, CameraView, ShapeParams, MAX_JOINT_DEG};
pub use raster::{encode_png, project_strip_point, render, render_canonical, Camera, RenderOutput, SegLabel, CANONICAL_SIZE};
pub use texture::{channel, decode_texture, logit, sigmoid, DecodedTexture, Pattern, BACKGROUND, SKIN};
