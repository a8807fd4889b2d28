use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use pentatile_core::spec_file::corpus;
use pentatile_core::*;

fn spec(name: &str) -> pentatile_core::PentagonSpec {
    corpus().into_iter().find(|s| s.name == name).unwrap()
}

fn grow_cairo(c: &mut Criterion) {
    let s = spec("cairo");
    let tol = Tolerance::default();
    let proto = Arc::new(Prototile::new(&s.angles, &s.edges, &tol).unwrap());
    c.bench_function("grow cairo depth 2", |b| {
        b.iter(|| {
            let seed = seed_patch(proto.clone(), &SeedSpec::default(), tol).unwrap();
            black_box(grow(seed, Limits::default()).patch.tiles.len())
        })
    });
}

fn enumerate(c: &mut Criterion) {
    c.bench_function("enumerate patterns", |b| {
        b.iter(|| black_box(enumerate_candidate_patterns(&ReductionRules::default()).len()))
    });
}

fn certify_type4(c: &mut Criterion) {
    let s = spec("type4");
    c.bench_function("certify type 4", |b| {
        b.iter(|| black_box(certify(&s.angles, &s.edges, &CertifyOptions::default()).unwrap().tiles_per_cell))
    });
}

fn classify_corpus(c: &mut Criterion) {
    let specs = corpus();
    let table = TypeTable::shipped();
    let tol = Tolerance::default();
    c.bench_function("classify corpus", |b| {
        b.iter(|| {
            for s in &specs {
                black_box(classify(&s.angles, &s.edges, &table, &tol));
            }
        })
    });
}

criterion_group!(benches, grow_cairo, enumerate, certify_type4, classify_corpus);
criterion_main!(benches);
