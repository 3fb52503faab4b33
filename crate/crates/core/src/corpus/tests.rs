use std::collections::BTreeSet;
use std::sync::OnceLock;

use super::*;
use crate::render::{channel, decode_texture, SKIN};
use crate::schema::Attribute;
use crate::uv::{BodyPartId, UvLatent, UvLayout};

fn corpus64() -> &'static MultimodalIndex {
    static C: OnceLock<MultimodalIndex> = OnceLock::new();
    C.get_or_init(|| generate_synthetic_corpus(1, 64).unwrap())
}

fn any_annotation() -> crate::schema::PartAnnotation {
    corpus64().entries()[0].annotation.clone()
}

#[test]
fn zero_latent_entry_is_bare_skin() {
    let e = build_entry(0, UvLatent::standard_zeros(), any_annotation()).unwrap();
    assert!(e.shape_masks.iter().all(|m| m.is_empty()));
    assert!(!e.appearance_uv.valid.is_empty());
    for (r, c) in e.appearance_uv.valid.iter() {
        assert_eq!(e.appearance_uv.get(r, c), Some(SKIN));
    }
}

#[test]
fn full_arm_coverage_gives_visible_arm_mask() {
    let layout = UvLayout::standard();
    let arm = layout.part_mask(BodyPartId::Arm);
    let mut z = UvLatent::standard_zeros();
    for (r, c) in layout.part_masks().foreground().iter() {
        z.texel_mut(r, c)[channel::COVERAGE] = if arm.get(r, c) { 3.0 } else { -3.0 };
    }
    let decoded = decode_texture(&z).unwrap();
    let e = build_entry(0, z, any_annotation()).unwrap();
    let expect = decoded.coverage.intersection(&arm).intersection(&e.appearance_uv.valid);
    assert_eq!(e.shape_mask(BodyPartId::Arm), &expect);
    assert!(expect.count() > arm.count() / 3);
    for p in BodyPartId::ALL.into_iter().filter(|p| *p != BodyPartId::Arm) {
        assert!(e.shape_mask(p).is_empty(), "{p}");
    }
}

#[test]
fn shape_masks_stay_inside_their_parts() {
    let c = corpus64();
    for e in c.entries().iter().take(8) {
        for p in BodyPartId::ALL {
            assert!(e.shape_mask(p).is_subset_of(c.masks().part(p)));
        }
        assert!(!e.appearance_uv.valid.is_empty());
    }
}

#[test]
fn lookup_is_exactly_the_annotation_scan() {
    let c = corpus64();
    assert_eq!(c.len(), 64);
    for a in Attribute::ALL {
        for v in a.values() {
            let want: Vec<u32> = c.entries().iter().filter(|e| e.annotation.get(a) == *v).map(|e| e.id).collect();
            assert_eq!(c.lookup(a.part(), a, v), want.as_slice(), "{a}={v}");
        }
    }
    assert_eq!(
        c.lookup(BodyPartId::Neck, Attribute::NecklineShape, "v-shape neckline"),
        c.lookup(BodyPartId::Neck, Attribute::NecklineShape, "v-neck")
    );
}

#[test]
fn stratification_covers_every_value() {
    let c = corpus64();
    for a in Attribute::ALL {
        let seen: BTreeSet<&str> = c.entries().iter().map(|e| e.annotation.get(a)).collect();
        assert_eq!(seen.len(), a.values().len(), "{a}");
    }
}

#[test]
fn generation_is_deterministic() {
    let a = generate_synthetic_corpus(1, 1).unwrap();
    let b = generate_synthetic_corpus(1, 1).unwrap();
    assert_eq!(a.entries()[0].latent.to_bytes(), b.entries()[0].latent.to_bytes());
    assert_eq!(a, b);
    assert!(generate_synthetic_corpus(1, 0).is_err());
}

#[test]
fn body_app_cache_is_symmetric() {
    let c = corpus64();
    let ab = c.body_app_match(3, 7).unwrap();
    assert_eq!(ab, c.body_app_match(7, 3).unwrap());
    assert!((c.body_app_match(5, 5).unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(c.body_app_match(3, 999).unwrap_err().code(), "not-found");
}

mod storage {
    use super::*;
    use std::fs;

    fn small() -> MultimodalIndex {
        generate_synthetic_corpus(7, 6).unwrap()
    }

    #[test]
    fn round_trip_with_stored_rasters() {
        let idx = small();
        let dir = tempfile::tempdir().unwrap();
        save_corpus(&idx, dir.path(), false).unwrap();
        let back = load_corpus(dir.path(), LoadOptions::default()).unwrap();
        assert_eq!(back, idx);
        assert_eq!(verify_corpus(dir.path()).unwrap(), 6);
    }

    #[test]
    fn regenerated_rasters_equal_stored_ones() {
        let idx = small();
        let full = tempfile::tempdir().unwrap();
        let regen = tempfile::tempdir().unwrap();
        save_corpus(&idx, full.path(), false).unwrap();
        save_corpus(&idx, regen.path(), true).unwrap();
        assert!(!regen.path().join("derived").exists());
        let a = load_corpus(full.path(), LoadOptions::default()).unwrap();
        let b = load_corpus(regen.path(), LoadOptions { strict: true }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn saves_are_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        save_corpus(&small(), a.path(), false).unwrap();
        save_corpus(&small(), b.path(), false).unwrap();
        for rel in ["manifest.json", "latents/000003.uvlt", "derived/000003.app", "derived/000003.seg"] {
            assert_eq!(fs::read(a.path().join(rel)).unwrap(), fs::read(b.path().join(rel)).unwrap(), "{rel}");
        }
    }

    #[test]
    fn truncated_latent_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        save_corpus(&small(), dir.path(), false).unwrap();
        let p = dir.path().join("latents/000002.uvlt");
        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..bytes.len() / 2]).unwrap();
        let err = load_corpus(dir.path(), LoadOptions::default()).unwrap_err();
        assert_eq!(err.code(), "corrupt-corpus");
    }

    #[test]
    fn truncated_manifest_and_wrong_version_are_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        save_corpus(&small(), dir.path(), true).unwrap();
        let p = dir.path().join("manifest.json");
        let text = fs::read_to_string(&p).unwrap();
        fs::write(&p, text.replace("\"version\": 1", "\"version\": 99")).unwrap();
        assert_eq!(load_corpus(dir.path(), LoadOptions::default()).unwrap_err().code(), "corrupt-corpus");
        fs::write(&p, &text[..text.len() / 3]).unwrap();
        assert_eq!(load_corpus(dir.path(), LoadOptions::default()).unwrap_err().code(), "corrupt-corpus");
    }

    #[test]
    fn strict_mode_catches_consistent_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let idx = small();
        save_corpus(&idx, dir.path(), false).unwrap();
        // Replace one stored appearance raster and fix up its checksum.
        let mut app = idx.entries()[1].appearance_uv.clone();
        app.color[0] = [0.5, 0.5, 0.5];
        app.valid.set(0, 0, true);
        let bytes = appearance_to_bytes(&app);
        let rel = "derived/000001.app";
        fs::write(dir.path().join(rel), &bytes).unwrap();
        let mpath = dir.path().join("manifest.json");
        let mut m: Manifest = serde_json::from_slice(&fs::read(&mpath).unwrap()).unwrap();
        m.entries[1].files.insert(rel.into(), hex::encode(<sha2::Sha256 as sha2::Digest>::digest(&bytes)));
        fs::write(&mpath, serde_json::to_vec_pretty(&m).unwrap()).unwrap();
        assert!(load_corpus(dir.path(), LoadOptions::default()).is_ok());
        assert_eq!(verify_corpus(dir.path()).unwrap_err().code(), "corrupt-corpus");
    }
}
