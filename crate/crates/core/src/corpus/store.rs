use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::schema::{schema_hash, PartAnnotation};
use crate::uv::{UvLatent, UvLayout};

use super::entry::{
    appearance_from_bytes, appearance_to_bytes, build_entry, shape_masks_from_seg, CorpusEntry, EntryId, SegUv,
};
use super::index::MultimodalIndex;

pub const CORPUS_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub uv_height: usize,
    pub uv_width: usize,
    pub channels: usize,
    pub schema_hash: String,
    /// When set, derived rasters are rebuilt from the latents on load.
    pub regenerate: bool,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: EntryId,
    pub annotation: PartAnnotation,
    /// Relative path → SHA-256 (hex) of every file belonging to the entry.
    pub files: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Rebuild derived rasters from the latents and require equality with
    /// the stored ones.
    pub strict: bool,
}

fn latent_path(id: EntryId) -> String {
    format!("latents/{id:06}.uvlt")
}

fn appearance_path(id: EntryId) -> String {
    format!("derived/{id:06}.app")
}

fn seg_path(id: EntryId) -> String {
    format!("derived/{id:06}.seg")
}

fn sha(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes the corpus directory. Output is byte-identical for equal indexes.
pub fn save_corpus(index: &MultimodalIndex, dir: &Path, regenerate: bool) -> Result<()> {
    fs::create_dir_all(dir.join("latents"))?;
    if !regenerate {
        fs::create_dir_all(dir.join("derived"))?;
    }
    let (h, w, c) = index.dims();
    let mut entries = Vec::with_capacity(index.len());
    for e in index.entries() {
        let mut files = BTreeMap::new();
        let mut put = |rel: String, bytes: Vec<u8>| -> Result<()> {
            files.insert(rel.clone(), sha(&bytes));
            fs::write(dir.join(&rel), bytes)?;
            Ok(())
        };
        put(latent_path(e.id), e.latent.to_bytes())?;
        if !regenerate {
            put(appearance_path(e.id), appearance_to_bytes(&e.appearance_uv))?;
            put(seg_path(e.id), e.seg_uv.to_bytes())?;
        }
        entries.push(ManifestEntry {
            id: e.id,
            annotation: e.annotation.clone(),
            files,
        });
    }
    let manifest = Manifest {
        version: CORPUS_VERSION,
        uv_height: h,
        uv_width: w,
        channels: c,
        schema_hash: schema_hash(),
        regenerate,
        entries,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::invalid(e.to_string()))?;
    json.push(b'\n');
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

fn read_checked(dir: &Path, me: &ManifestEntry, rel: &str) -> Result<Vec<u8>> {
    let want = me
        .files
        .get(rel)
        .ok_or_else(|| Error::CorruptCorpus(format!("entry {} does not list {rel}", me.id)))?;
    let bytes = fs::read(dir.join(rel)).map_err(|e| Error::CorruptCorpus(format!("{rel}: {e}")))?;
    if &sha(&bytes) != want {
        return Err(Error::CorruptCorpus(format!("{rel}: checksum mismatch")));
    }
    Ok(bytes)
}

fn load_entry(dir: &Path, m: &Manifest, me: &ManifestEntry, opts: LoadOptions) -> Result<CorpusEntry> {
    let latent = UvLatent::from_bytes(&read_checked(dir, me, &latent_path(me.id))?)?;
    if latent.dims() != (m.uv_height, m.uv_width, m.channels) {
        return Err(Error::CorruptCorpus(format!(
            "entry {} latent is {:?}, manifest says {:?}",
            me.id,
            latent.dims(),
            (m.uv_height, m.uv_width, m.channels)
        )));
    }
    if m.regenerate {
        return build_entry(me.id, latent, me.annotation.clone());
    }
    let appearance_uv = appearance_from_bytes(&read_checked(dir, me, &appearance_path(me.id))?)?;
    let seg_uv = SegUv::from_bytes(&read_checked(dir, me, &seg_path(me.id))?)?;
    if (appearance_uv.height, appearance_uv.width) != (m.uv_height, m.uv_width)
        || (seg_uv.height, seg_uv.width) != (m.uv_height, m.uv_width)
    {
        return Err(Error::CorruptCorpus(format!("entry {} derived rasters have wrong size", me.id)));
    }
    let layout = UvLayout::new(m.uv_height, m.uv_width)?;
    let shape_masks = shape_masks_from_seg(&layout, &seg_uv);
    let entry = CorpusEntry {
        id: me.id,
        latent,
        appearance_uv,
        seg_uv,
        shape_masks,
        annotation: me.annotation.clone(),
    };
    if opts.strict {
        let rebuilt = build_entry(me.id, entry.latent.clone(), me.annotation.clone())?;
        if rebuilt != entry {
            return Err(Error::CorruptCorpus(format!(
                "entry {}: stored rasters differ from a rebuild",
                me.id
            )));
        }
    }
    Ok(entry)
}

/// Loads a corpus directory. Any inconsistency yields `CorruptCorpus` and no
/// index.
pub fn load_corpus(dir: &Path, opts: LoadOptions) -> Result<MultimodalIndex> {
    let raw = fs::read(dir.join("manifest.json")).map_err(|e| Error::CorruptCorpus(format!("manifest.json: {e}")))?;
    let m: Manifest =
        serde_json::from_slice(&raw).map_err(|e| Error::CorruptCorpus(format!("manifest.json: {e}")))?;
    if m.version != CORPUS_VERSION {
        return Err(Error::CorruptCorpus(format!(
            "corpus version {} is not supported (expected {CORPUS_VERSION})",
            m.version
        )));
    }
    if m.schema_hash != schema_hash() {
        return Err(Error::CorruptCorpus("attribute schema hash does not match".into()));
    }
    if m.entries.is_empty() {
        return Err(Error::CorruptCorpus("manifest lists no entries".into()));
    }
    let entries = m
        .entries
        .par_iter()
        .map(|me| load_entry(dir, &m, me, opts))
        .collect::<Result<Vec<_>>>()?;
    MultimodalIndex::new(entries).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::CorruptCorpus(msg),
        other => other,
    })
}

/// Strict reload; returns the number of verified entries.
pub fn verify_corpus(dir: &Path) -> Result<usize> {
    Ok(load_corpus(dir, LoadOptions { strict: true })?.len())
}
