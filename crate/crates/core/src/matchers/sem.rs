use crate::error::{Error, Result};
use crate::schema::{Attribute, PartSlice};
use crate::uv::BodyPartId;

use super::MatchScore;

/// Builds a query slice for `part` from raw attribute names and values.
pub fn query_slice<'a>(part: BodyPartId, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<PartSlice> {
    let mut out = PartSlice::new();
    for (name, value) in pairs {
        let a: Attribute = name.parse()?;
        if a.part() != part {
            return Err(Error::invalid(format!("{a} belongs to {}, not {part}", a.part())));
        }
        out.insert(a, value.to_string());
    }
    Ok(out)
}

/// Fraction of query attributes whose (alias-normalized) value equals the
/// entry's. Every query attribute must be present in the entry slice.
pub fn sem_match(entry: &PartSlice, query: &PartSlice) -> Result<MatchScore> {
    if query.is_empty() {
        return Err(Error::invalid("query slice specifies no attributes"));
    }
    let mut hits = 0usize;
    for (a, v) in query {
        let Some(have) = entry.get(a) else {
            return Err(Error::invalid(format!("entry slice lacks {a}")));
        };
        if let (Some(x), Some(y)) = (a.normalize(v), a.normalize(have)) {
            if x == y {
                hits += 1;
            }
        }
    }
    Ok(MatchScore::higher(hits as f64 / query.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slice(pairs: &[(Attribute, &str)]) -> PartSlice {
        pairs.iter().map(|(a, v)| (*a, v.to_string())).collect()
    }

    #[test]
    fn exact_match_scores_one() {
        let e = slice(&[(Attribute::SleeveLength, "long")]);
        assert_eq!(sem_match(&e, &e).unwrap().value, 1.0);
    }

    #[test]
    fn half_match() {
        let e = slice(&[(Attribute::NecklineShape, "v-neck"), (Attribute::ClothingColor, "blue")]);
        let q = slice(&[(Attribute::NecklineShape, "v-neck"), (Attribute::ClothingColor, "red")]);
        assert_eq!(sem_match(&e, &q).unwrap().value, 0.5);
    }

    #[test]
    fn aliases_match() {
        let e = slice(&[(Attribute::NecklineShape, "v-neck")]);
        let q = slice(&[(Attribute::NecklineShape, "v-shape neckline")]);
        assert_eq!(sem_match(&e, &q).unwrap().value, 1.0);
    }

    #[test]
    fn unknown_attribute_is_rejected() {
        let err = query_slice(BodyPartId::Arm, [("sleeve_colour", "red")]).unwrap_err();
        assert_eq!(err.code(), "invalid-argument");
        let err = query_slice(BodyPartId::Arm, [("hair_length", "long")]).unwrap_err();
        assert_eq!(err.code(), "invalid-argument");
        let e = slice(&[(Attribute::SleeveLength, "long")]);
        let q = slice(&[(Attribute::HairLength, "long")]);
        assert!(sem_match(&e, &q).is_err());
        assert!(sem_match(&e, &PartSlice::new()).is_err());
    }
}
