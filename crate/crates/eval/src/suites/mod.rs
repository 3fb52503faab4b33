//! One function per acceptance criterion.

mod editing;
mod matching;
mod sampler;
mod sketch;
mod storage;

use std::sync::Arc;

use atelier_core::corpus::MultimodalIndex;

use crate::CriterionResult;

pub use editing::{edit_locality, performance, view_consistency, PERF_BUDGET_MS};
pub use matching::{app_ssim, shape_invariance};
pub use sampler::{random_region_sketch, random_text_attributes, sampler_oracle};
pub use sketch::{sketch_classification, warp_roundtrip};
pub use storage::corpus_roundtrip;

pub type Suite = fn(&Arc<MultimodalIndex>) -> CriterionResult;

pub const ALL: [(&str, Suite); 9] = [
    ("sampler_oracle", sampler_oracle),
    ("shape_invariance", shape_invariance),
    ("app_ssim", app_ssim),
    ("edit_locality", edit_locality),
    ("view_consistency", view_consistency),
    ("sketch_classification", sketch_classification),
    ("warp_roundtrip", warp_roundtrip),
    ("performance", performance),
    ("corpus_roundtrip", corpus_roundtrip),
];
