use std::collections::{BTreeMap, HashMap};

use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::matchers::app_match;
use crate::schema::Attribute;
use crate::uv::{BodyPartId, Mask, PartMaskSet, UvLayout};

use super::entry::{CorpusEntry, EntryId};

type Key = (BodyPartId, Attribute, String);

/// The annotated corpus with its lookup structures.
#[derive(Debug)]
pub struct MultimodalIndex {
    entries: Vec<CorpusEntry>,
    position: HashMap<EntryId, usize>,
    inverted: BTreeMap<Key, Vec<EntryId>>,
    layout: UvLayout,
    masks: PartMaskSet,
    dims: (usize, usize, usize),
    /// Texels every entry observes in the canonical view.
    canonical_visibility: Mask,
    body_app: Mutex<HashMap<(EntryId, EntryId), f64>>,
}

impl MultimodalIndex {
    /// Entries are kept in ascending id order.
    pub fn new(mut entries: Vec<CorpusEntry>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::EmptyCorpus);
        };
        let dims = first.latent.dims();
        entries.sort_by_key(|e| e.id);
        let mut position = HashMap::new();
        let mut inverted: BTreeMap<Key, Vec<EntryId>> = BTreeMap::new();
        let mut vis = Mask::full(dims.0, dims.1);
        for (i, e) in entries.iter().enumerate() {
            if e.latent.dims() != dims {
                return Err(Error::invalid(format!(
                    "entry {} has dimensions {:?}, corpus uses {:?}",
                    e.id,
                    e.latent.dims(),
                    dims
                )));
            }
            if position.insert(e.id, i).is_some() {
                return Err(Error::invalid(format!("duplicate entry id {}", e.id)));
            }
            for (a, v) in e.annotation.iter() {
                inverted.entry((a.part(), a, v.to_string())).or_default().push(e.id);
            }
            vis = vis.intersection(&e.appearance_uv.valid);
        }
        let layout = UvLayout::new(dims.0, dims.1)?;
        let masks = layout.part_masks();
        Ok(Self {
            entries,
            position,
            inverted,
            layout,
            masks,
            dims,
            canonical_visibility: vis,
            body_app: Mutex::new(HashMap::new()),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn get(&self, id: EntryId) -> Option<&CorpusEntry> {
        self.position.get(&id).map(|i| &self.entries[*i])
    }

    pub fn entry(&self, id: EntryId) -> Result<&CorpusEntry> {
        self.get(id).ok_or_else(|| Error::NotFound(format!("corpus entry {id}")))
    }

    pub fn ids(&self) -> impl Iterator<Item = EntryId> + '_ {
        self.entries.iter().map(|e| e.id)
    }

    pub fn layout(&self) -> &UvLayout {
        &self.layout
    }

    pub fn masks(&self) -> &PartMaskSet {
        &self.masks
    }

    /// Latent dimensions shared by every entry.
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn canonical_visibility(&self) -> &Mask {
        &self.canonical_visibility
    }

    /// Ids (ascending) of entries whose annotation has `attribute = value`.
    /// The value is alias-normalized first.
    pub fn lookup(&self, part: BodyPartId, attribute: Attribute, value: &str) -> &[EntryId] {
        let Some(canon) = attribute.normalize(value) else {
            return &[];
        };
        self.inverted
            .get(&(part, attribute, canon.to_string()))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// AppMatch of two entries' canonical appearance on `M_body`, memoized.
    pub fn body_app_match(&self, a: EntryId, b: EntryId) -> Result<f64> {
        let key = (a.min(b), a.max(b));
        if let Some(v) = self.body_app.lock().get(&key) {
            return Ok(*v);
        }
        let (ea, eb) = (self.entry(key.0)?, self.entry(key.1)?);
        let v = app_match(&ea.appearance_uv, &eb.appearance_uv, self.masks.body())?.value;
        self.body_app.lock().insert(key, v);
        Ok(v)
    }
}

impl PartialEq for MultimodalIndex {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}
