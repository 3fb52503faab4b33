use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use atelier_core::corpus::generate_synthetic_corpus;
use atelier_core::editors::EditSession;
use atelier_core::matchers::{app_match, hu_moments, shape_match};
use atelier_core::parsers::{parse_text, ParseMode};
use atelier_core::render::render_canonical;
use atelier_core::samplers::sample_text;
use atelier_core::BodyPartId;

fn benches(c: &mut Criterion) {
    let index = Arc::new(generate_synthetic_corpus(1, 64).unwrap());
    let e = &index.entries()[3];
    let f = &index.entries()[7];

    c.bench_function("render_canonical_512", |b| b.iter(|| render_canonical(black_box(&e.latent)).unwrap()));

    let body = e.shape_mask(BodyPartId::Body);
    c.bench_function("hu_moments_body", |b| b.iter(|| hu_moments(black_box(body)).unwrap()));
    c.bench_function("shape_match_body", |b| {
        b.iter(|| shape_match(black_box(body), f.shape_mask(BodyPartId::Body)).unwrap())
    });
    c.bench_function("app_match_body", |b| {
        b.iter(|| app_match(&e.appearance_uv, black_box(&f.appearance_uv), index.masks().body()).unwrap())
    });

    let q = parse_text("red striped shirt with long sleeves", ParseMode::Generation, index.layout()).unwrap();
    c.bench_function("sample_text_generation", |b| b.iter(|| sample_text(&index, black_box(&q), None, 4).unwrap()));

    let mut s = EditSession::random("bench", index.clone(), 1).unwrap();
    let edits = ["long sleeves", "short sleeves"];
    let mut i = 0;
    c.bench_function("edit_text_to_render", |b| {
        b.iter(|| {
            i += 1;
            s.edit_text(black_box(edits[i % 2])).unwrap()
        })
    });
}

criterion_group! {
    name = group;
    config = Criterion::default().sample_size(20);
    targets = benches
}
criterion_main!(group);
