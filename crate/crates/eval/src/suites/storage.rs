use std::fs;
use std::path::Path;
use std::sync::Arc;

use atelier_core::corpus::{load_corpus, save_corpus, verify_corpus, LoadOptions, MultimodalIndex};
use atelier_core::{Error, Result};

use crate::{timed, CriterionResult};

fn tree(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d)? {
            let p = e?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).map_err(|e| Error::InvalidArgument(e.to_string()))?;
                out.push((rel.to_string_lossy().into_owned(), fs::read(&p)?));
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn corpus_roundtrip(index: &Arc<MultimodalIndex>) -> CriterionResult {
    timed("corpus_roundtrip", || {
        let tmp = tempfile::tempdir()?;
        let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
        save_corpus(index, &a, false)?;
        let loaded = load_corpus(&a, LoadOptions { strict: true })?;
        let equal = &loaded == index.as_ref();
        save_corpus(&loaded, &b, false)?;
        let (ta, tb) = (tree(&a)?, tree(&b)?);
        let identical = ta == tb;
        let verified = verify_corpus(&a)?;
        Ok((
            equal && identical && verified == index.len(),
            format!(
                "load equals saved: {equal}; resave byte-identical over {} files: {identical}; strict verify {verified}/{} entries",
                ta.len(),
                index.len()
            ),
        ))
    })
}
