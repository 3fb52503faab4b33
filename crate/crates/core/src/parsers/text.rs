use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{Attribute, PartSlice};
use crate::uv::{BodyPartId, Mask, UvLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    Generation,
    Editing,
}

/// Attributes mentioned by a command, grouped by part, plus the union of the
/// mentioned parts' masks.
#[derive(Clone, Debug, PartialEq)]
pub struct TextQuery {
    pub parts: BTreeMap<BodyPartId, PartSlice>,
    pub edit_mask: Mask,
}

impl TextQuery {
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn attribute_count(&self) -> usize {
        self.parts.values().map(|s| s.len()).sum()
    }

    pub fn mentioned_parts(&self) -> impl Iterator<Item = BodyPartId> + '_ {
        self.parts.keys().copied()
    }

    /// Builds a query directly from attribute/value pairs.
    pub fn from_attributes(layout: &UvLayout, attrs: impl IntoIterator<Item = (Attribute, String)>) -> Result<Self> {
        let mut parts: BTreeMap<BodyPartId, PartSlice> = BTreeMap::new();
        for (a, v) in attrs {
            let canon = a
                .normalize(&v)
                .ok_or_else(|| Error::invalid(format!("{v:?} is not a value of {a}")))?;
            parts.entry(a.part()).or_default().insert(a, canon.to_string());
        }
        let masks = layout.part_masks();
        let edit_mask = masks.union_of(parts.keys().copied());
        Ok(Self { parts, edit_mask })
    }
}

/// Lowercase alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Noun {
    Hair,
    Sleeve,
    Lower,
    Dress,
    Clothing,
    Shoe,
}

#[derive(Clone, Copy, Debug)]
enum Hit {
    Direct(Attribute, &'static str),
    Length(&'static str),
    Color(&'static str),
    Noun(Noun),
}

const NECK_SHAPES: [(&str, &str); 7] = [
    ("v", "v-neck"),
    ("v shape", "v-neck"),
    ("v shaped", "v-neck"),
    ("round", "round"),
    ("crew", "round"),
    ("boat", "boat"),
    ("square", "square"),
];

type PhraseTable = Vec<(Vec<String>, Hit)>;

fn phrase_table() -> &'static PhraseTable {
    static TABLE: OnceLock<PhraseTable> = OnceLock::new();
    TABLE.get_or_init(build_phrase_table)
}

fn build_phrase_table() -> PhraseTable {
    use Attribute::*;
    let mut t: PhraseTable = Vec::new();
    let mut add = |p: &str, h: Hit| t.push((p.split(' ').map(str::to_string).collect(), h));
    for (shape, class) in NECK_SHAPES {
        for noun in ["neck", "neckline", "necklines", "collar"] {
            add(&format!("{shape} {noun}"), Hit::Direct(NecklineShape, class));
        }
    }
    add("vneck", Hit::Direct(NecklineShape, "v-neck"));
    add("crewneck", Hit::Direct(NecklineShape, "round"));
    add("bateau", Hit::Direct(NecklineShape, "boat"));
    add("sleeveless", Hit::Direct(SleeveLength, "sleeveless"));
    add("no sleeves", Hit::Direct(SleeveLength, "sleeveless"));
    add("no sleeve", Hit::Direct(SleeveLength, "sleeveless"));
    add("sleeves cut off", Hit::Direct(SleeveLength, "sleeveless"));
    add("shorts", Hit::Direct(LowerLength, "short"));
    for (p, v) in [
        ("plain", "plain"),
        ("solid", "plain"),
        ("pure color", "plain"),
        ("stripe", "stripe"),
        ("stripes", "stripe"),
        ("striped", "stripe"),
        ("checker", "checker"),
        ("checkered", "checker"),
        ("checked", "checker"),
        ("plaid", "checker"),
        ("lattice", "checker"),
        ("floral", "floral"),
        ("flower", "floral"),
        ("flowers", "floral"),
        ("dotted", "floral"),
        ("dots", "floral"),
        ("polka dot", "floral"),
    ] {
        add(p, Hit::Direct(TexturePattern, v));
    }
    for (p, v) in [
        ("flats", "flats"),
        ("flat shoes", "flats"),
        ("heels", "heels"),
        ("high heels", "heels"),
        ("heel", "heels"),
        ("boots", "boots"),
        ("boot", "boots"),
        ("sneakers", "sneakers"),
        ("sneaker", "sneakers"),
        ("trainers", "sneakers"),
    ] {
        add(p, Hit::Direct(ShoeType, v));
    }
    for (p, v) in [
        ("long", "long"),
        ("full length", "long"),
        ("maxi", "long"),
        ("short", "short"),
        ("mini", "short"),
        ("medium", "medium"),
        ("mid", "medium"),
        ("midi", "medium"),
        ("half", "medium"),
        ("elbow length", "medium"),
        ("shoulder length", "medium"),
        ("knee", "knee"),
        ("knee length", "knee"),
    ] {
        add(p, Hit::Length(v));
    }
    for c in ClothingColor.values() {
        add(c, Hit::Color(c));
    }
    for (alias, c) in ClothingColor.aliases() {
        add(alias, Hit::Color(c));
    }
    for (p, n) in [
        ("hair", Noun::Hair),
        ("hairstyle", Noun::Hair),
        ("sleeve", Noun::Sleeve),
        ("sleeves", Noun::Sleeve),
        ("sleeved", Noun::Sleeve),
        ("pants", Noun::Lower),
        ("trousers", Noun::Lower),
        ("jeans", Noun::Lower),
        ("skirt", Noun::Lower),
        ("lower", Noun::Lower),
        ("dress", Noun::Dress),
        ("shirt", Noun::Clothing),
        ("t shirt", Noun::Clothing),
        ("tshirt", Noun::Clothing),
        ("top", Noun::Clothing),
        ("clothes", Noun::Clothing),
        ("clothing", Noun::Clothing),
        ("outfit", Noun::Clothing),
        ("garment", Noun::Clothing),
        ("shoes", Noun::Shoe),
        ("shoe", Noun::Shoe),
    ] {
        add(p, Hit::Noun(n));
    }
    // Longest phrases first so the greedy scan prefers them.
    t.sort_by(|a, b| b.0.len().cmp(&a.0.len()));
    t
}

fn scan(tokens: &[String]) -> Vec<(usize, Hit)> {
    let table = phrase_table();
    let mut hits = Vec::new();
    let mut i = 0;
    'outer: while i < tokens.len() {
        for (phrase, hit) in table {
            let n = phrase.len();
            if i + n <= tokens.len() && phrase.iter().zip(&tokens[i..i + n]).all(|(p, t)| p == t) {
                hits.push((i, *hit));
                i += n;
                continue 'outer;
            }
        }
        i += 1;
    }
    hits
}

/// Nearest noun within two hits after `k`, else within two before.
fn bind(hits: &[(usize, Hit)], k: usize) -> Option<Noun> {
    let noun = |j: usize| match hits.get(j) {
        Some((_, Hit::Noun(n))) => Some(*n),
        Some((_, Hit::Direct(Attribute::ShoeType, _))) => Some(Noun::Shoe),
        Some((_, Hit::Direct(Attribute::LowerLength, _))) => Some(Noun::Lower),
        _ => None,
    };
    (k + 1..(k + 3).min(hits.len()))
        .find_map(noun)
        .or_else(|| (k.saturating_sub(2)..k).rev().find_map(noun))
}

/// Keyword parse of a command. In editing mode at least one attribute must
/// be recognized.
pub fn parse_text(text: &str, mode: ParseMode, layout: &UvLayout) -> Result<TextQuery> {
    let tokens = tokenize(text);
    let hits = scan(&tokens);
    let mut found: Vec<(Attribute, String)> = Vec::new();
    let mut set = |a: Attribute, v: &str| {
        if let Some(canon) = a.normalize(v) {
            found.retain(|(x, _)| *x != a);
            found.push((a, canon.to_string()));
        }
    };
    for (k, (_, hit)) in hits.iter().enumerate() {
        match *hit {
            Hit::Direct(a, v) => set(a, v),
            Hit::Length(v) => match bind(&hits, k) {
                Some(Noun::Hair) => set(Attribute::HairLength, v),
                Some(Noun::Sleeve) => set(Attribute::SleeveLength, v),
                Some(Noun::Lower | Noun::Dress) => set(Attribute::LowerLength, v),
                _ => {}
            },
            Hit::Color(c) => match bind(&hits, k) {
                Some(Noun::Hair) => set(Attribute::HairColor, c),
                Some(Noun::Shoe) => {}
                _ => set(Attribute::ClothingColor, c),
            },
            Hit::Noun(_) => {}
        }
    }
    if found.is_empty() && mode == ParseMode::Editing {
        return Err(Error::UnparseableCommand(format!("no attribute keywords in {text:?}")));
    }
    TextQuery::from_attributes(layout, found)
}
