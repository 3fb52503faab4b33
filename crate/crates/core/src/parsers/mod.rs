//! Text and sketch parsers: free-form input to per-part queries and UV masks.

mod sketch;
mod text;

pub use sketch::{
    classify_stroke, expand_partial_to_full, parse_sketch, stroke_to_uv, ParseOptions, ParsedSketch, SketchComponent,
    SketchStroke, SketchType, StrokeSpace, OFF_BODY_MARGIN,
};
pub use text::{parse_text, tokenize, ParseMode, TextQuery};

#[cfg(test)]
mod sketch_tests;
