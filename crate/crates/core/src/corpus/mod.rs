//! The annotated latent corpus: entry derivation, synthesis, indexing and
//! on-disk storage.

mod entry;
mod index;
mod store;
mod synth;

pub use entry::{
    appearance_from_bytes, appearance_to_bytes, build_entry, shape_masks_from_seg, CorpusEntry, EntryId, SegUv,
};
pub use index::MultimodalIndex;
pub use store::{load_corpus, save_corpus, verify_corpus, LoadOptions, Manifest, ManifestEntry, CORPUS_VERSION};
pub use synth::{generate_synthetic_corpus, generate_synthetic_corpus_with, stratified_annotations, synthesize_latent, SynthOptions};

#[cfg(test)]
mod tests;
