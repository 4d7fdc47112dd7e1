use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tensorank::norms::{nuclear_norm_with, spectral_norm, NuclearOptions, SpectralOptions};
use tensorank::symmetric::{ghz_state_normalized, w_state_normalized};

fn spectral(c: &mut Criterion) {
    let w = w_state_normalized(3).unwrap();
    let opts = SpectralOptions::default();
    c.bench_function("spectral_w3", |b| b.iter(|| spectral_norm(black_box(&w), &opts).unwrap()));
    let g = ghz_state_normalized(2, 5).unwrap();
    c.bench_function("spectral_ghz_2_5", |b| b.iter(|| spectral_norm(black_box(&g), &opts).unwrap()));
}

fn nuclear(c: &mut Criterion) {
    let w = w_state_normalized(3).unwrap();
    let opts = NuclearOptions::default();
    c.bench_function("nuclear_w3", |b| b.iter(|| nuclear_norm_with(black_box(&w), &opts).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = spectral, nuclear
}
criterion_main!(benches);
