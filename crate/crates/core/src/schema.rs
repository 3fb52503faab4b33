//! Closed attribute vocabulary and per-part annotations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::uv::BodyPartId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    HairLength,
    HairColor,
    ClothingColor,
    TexturePattern,
    NecklineShape,
    SleeveLength,
    LowerLength,
    ShoeType,
}

pub const COLORS: [(&str, [f32; 3]); 12] = [
    ("red", [0.85, 0.12, 0.12]),
    ("orange", [0.95, 0.55, 0.10]),
    ("yellow", [0.95, 0.88, 0.20]),
    ("green", [0.15, 0.70, 0.25]),
    ("cyan", [0.15, 0.85, 0.85]),
    ("blue", [0.15, 0.30, 0.85]),
    ("purple", [0.55, 0.20, 0.75]),
    ("pink", [0.95, 0.50, 0.70]),
    ("brown", [0.50, 0.30, 0.15]),
    ("black", [0.08, 0.08, 0.08]),
    ("white", [0.93, 0.93, 0.93]),
    ("gray", [0.50, 0.50, 0.50]),
];

const COLOR_NAMES: [&str; 12] = [
    "red", "orange", "yellow", "green", "cyan", "blue", "purple", "pink", "brown", "black", "white", "gray",
];
const HAIR_LENGTHS: [&str; 3] = ["short", "medium", "long"];
const PATTERNS: [&str; 4] = ["plain", "stripe", "checker", "floral"];
const NECKLINES: [&str; 4] = ["v-neck", "round", "boat", "square"];
const SLEEVES: [&str; 4] = ["sleeveless", "short", "medium", "long"];
const LOWERS: [&str; 4] = ["short", "knee", "medium", "long"];
const SHOES: [&str; 4] = ["flats", "heels", "boots", "sneakers"];

impl Attribute {
    pub const ALL: [Attribute; 8] = [
        Attribute::HairLength,
        Attribute::HairColor,
        Attribute::ClothingColor,
        Attribute::TexturePattern,
        Attribute::NecklineShape,
        Attribute::SleeveLength,
        Attribute::LowerLength,
        Attribute::ShoeType,
    ];

    pub fn part(self) -> BodyPartId {
        match self {
            Attribute::HairLength | Attribute::HairColor => BodyPartId::Head,
            Attribute::ClothingColor | Attribute::TexturePattern => BodyPartId::Body,
            Attribute::NecklineShape => BodyPartId::Neck,
            Attribute::SleeveLength => BodyPartId::Arm,
            Attribute::LowerLength => BodyPartId::Leg,
            Attribute::ShoeType => BodyPartId::Foot,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Attribute::HairLength => "hair_length",
            Attribute::HairColor => "hair_color",
            Attribute::ClothingColor => "clothing_color",
            Attribute::TexturePattern => "texture_pattern",
            Attribute::NecklineShape => "neckline_shape",
            Attribute::SleeveLength => "sleeve_length",
            Attribute::LowerLength => "lower_length",
            Attribute::ShoeType => "shoe_type",
        }
    }

    pub fn values(self) -> &'static [&'static str] {
        match self {
            Attribute::HairLength => &HAIR_LENGTHS,
            Attribute::HairColor | Attribute::ClothingColor => &COLOR_NAMES,
            Attribute::TexturePattern => &PATTERNS,
            Attribute::NecklineShape => &NECKLINES,
            Attribute::SleeveLength => &SLEEVES,
            Attribute::LowerLength => &LOWERS,
            Attribute::ShoeType => &SHOES,
        }
    }

    pub fn of_part(part: BodyPartId) -> impl Iterator<Item = Attribute> {
        Self::ALL.into_iter().filter(move |a| a.part() == part)
    }

    /// Synonyms accepted for this attribute's values, as `(alias, canonical)`.
    pub fn aliases(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Attribute::HairColor | Attribute::ClothingColor => &[
                ("grey", "gray"),
                ("blonde", "yellow"),
                ("blond", "yellow"),
                ("golden", "yellow"),
                ("violet", "purple"),
                ("teal", "cyan"),
                ("navy", "blue"),
                ("crimson", "red"),
            ],
            Attribute::TexturePattern => &[
                ("striped", "stripe"),
                ("stripes", "stripe"),
                ("checked", "checker"),
                ("checkered", "checker"),
                ("plaid", "checker"),
                ("lattice", "checker"),
                ("flower", "floral"),
                ("flowers", "floral"),
                ("dots", "floral"),
                ("dotted", "floral"),
                ("solid", "plain"),
                ("pure color", "plain"),
            ],
            Attribute::NecklineShape => &[
                ("v neck", "v-neck"),
                ("vneck", "v-neck"),
                ("v-shape", "v-neck"),
                ("v-shape neckline", "v-neck"),
                ("v shape", "v-neck"),
                ("v shape neckline", "v-neck"),
                ("crew", "round"),
                ("crew neck", "round"),
                ("round neck", "round"),
                ("boat neck", "boat"),
                ("bateau", "boat"),
                ("square neck", "square"),
            ],
            Attribute::SleeveLength => &[
                ("no sleeves", "sleeveless"),
                ("elbow", "medium"),
                ("half", "medium"),
                ("mid", "medium"),
            ],
            Attribute::LowerLength => &[
                ("knee-length", "knee"),
                ("knee length", "knee"),
                ("mini", "short"),
                ("mid", "medium"),
                ("midi", "medium"),
                ("three-quarter", "medium"),
                ("maxi", "long"),
                ("full", "long"),
            ],
            Attribute::ShoeType => &[
                ("boot", "boots"),
                ("heel", "heels"),
                ("high heels", "heels"),
                ("flat", "flats"),
                ("flat shoes", "flats"),
                ("sneaker", "sneakers"),
                ("trainers", "sneakers"),
            ],
            Attribute::HairLength => &[("mid", "medium"), ("shoulder-length", "medium")],
        }
    }

    /// Canonical value for a raw value or alias, if it belongs to this attribute.
    pub fn normalize(self, raw: &str) -> Option<&'static str> {
        let raw = raw.trim().to_lowercase();
        if let Some(v) = self.values().iter().find(|v| **v == raw) {
            return Some(v);
        }
        self.aliases().iter().find(|(a, _)| *a == raw).map(|(_, v)| *v)
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown attribute {s:?}")))
    }
}

pub fn color_rgb(name: &str) -> Option<[f32; 3]> {
    COLORS.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

/// Attribute values of one part (or a query over one part).
pub type PartSlice = BTreeMap<Attribute, String>;

/// Complete annotation of one corpus entry: every attribute has a value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartAnnotation {
    values: BTreeMap<Attribute, String>,
}

impl PartAnnotation {
    /// Validates completeness and vocabulary, normalizing aliases.
    pub fn new(values: impl IntoIterator<Item = (Attribute, String)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (a, v) in values {
            let canon = a
                .normalize(&v)
                .ok_or_else(|| Error::invalid(format!("{v:?} is not a value of {a}")))?;
            out.insert(a, canon.to_string());
        }
        if let Some(missing) = Attribute::ALL.into_iter().find(|a| !out.contains_key(a)) {
            return Err(Error::invalid(format!("annotation is missing {missing}")));
        }
        Ok(Self { values: out })
    }

    pub fn get(&self, a: Attribute) -> &str {
        &self.values[&a]
    }

    pub fn slice(&self, part: BodyPartId) -> PartSlice {
        Attribute::of_part(part).map(|a| (a, self.values[&a].clone())).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Attribute, &str)> {
        self.values.iter().map(|(a, v)| (*a, v.as_str()))
    }

    pub fn with(&self, a: Attribute, value: &str) -> Result<Self> {
        Self::new(self.iter().map(|(k, v)| (k, if k == a { value.to_string() } else { v.to_string() })))
    }
}

/// Serialized as `{part: {attribute: value}}`.
impl Serialize for PartAnnotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let nested: BTreeMap<&str, BTreeMap<&str, &str>> = BodyPartId::ALL
            .iter()
            .map(|p| {
                let inner = Attribute::of_part(*p).map(|a| (a.name(), self.get(a))).collect();
                (p.name(), inner)
            })
            .collect();
        nested.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartAnnotation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nested: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::deserialize(d)?;
        let mut flat = Vec::new();
        for (part, attrs) in nested {
            let part: BodyPartId = part.parse().map_err(serde::de::Error::custom)?;
            for (a, v) in attrs {
                let a: Attribute = a.parse().map_err(serde::de::Error::custom)?;
                if a.part() != part {
                    return Err(serde::de::Error::custom(format!("{a} does not belong to {part}")));
                }
                flat.push((a, v));
            }
        }
        PartAnnotation::new(flat).map_err(serde::de::Error::custom)
    }
}

/// Stable fingerprint of the vocabulary and alias tables.
pub fn schema_hash() -> String {
    let mut h = Sha256::new();
    for a in Attribute::ALL {
        h.update(a.name().as_bytes());
        h.update([0]);
        for v in a.values() {
            h.update(v.as_bytes());
            h.update([1]);
        }
        for (alias, v) in a.aliases() {
            h.update(alias.as_bytes());
            h.update([2]);
            h.update(v.as_bytes());
            h.update([3]);
        }
    }
    for (name, rgb) in COLORS {
        h.update(name.as_bytes());
        for c in rgb {
            h.update(c.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
