use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use primavoid::bounds::{exception_scan, ScanOptions};
use primavoid::charsum::{arrangement_sweep, CharacterGroup};
use primavoid::gf::Basis;
use primavoid::hyperplane::{random_general_position, AvoidedSet};
use primavoid::ntheory::{factor, FactorBudget, FactorCache};
use primavoid_bench::field;

fn factoring(c: &mut Criterion) {
    // 2^64 + 1 = 274177 · 67280421310721
    let v = (BigUint::from(1u32) << 64) + 1u32;
    let budget = FactorBudget::default();
    c.bench_function("factor 2^64+1", |b| b.iter(|| factor(black_box(&v), None, &budget).unwrap()));
    let semi = BigUint::from(1_000_003u64) * BigUint::from(998_244_353u64);
    c.bench_function("factor 10^15 semiprime", |b| b.iter(|| factor(black_box(&semi), None, &budget).unwrap()));
}

fn field_mul(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (p, m, n) in [(2, 1, 16), (3, 2, 5), (11, 1, 12)] {
        let f = field(p, m, n);
        let x = f.random_element(&mut rng);
        let y = f.random_element(&mut rng);
        c.bench_function(&format!("mul {p}^{m}^{n}"), |b| b.iter(|| f.mul(black_box(&x), black_box(&y))));
    }
}

fn char_sum(c: &mut Criterion) {
    let f = field(3, 1, 7);
    let g = CharacterGroup::new(f.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let arr = random_general_position(Basis::power(f.clone()), &mut rng);
    let set = AvoidedSet::new(&arr).unwrap();
    let chi = g.character(5);
    c.bench_function("character sum over S, 3^7", |b| b.iter(|| g.sum_indices(set.indices(), black_box(chi))));
    let small = field(5, 1, 4);
    let gs = CharacterGroup::new(small.clone()).unwrap();
    let arrs: Vec<_> = (0..4).map(|_| random_general_position(Basis::power(small.clone()), &mut rng)).collect();
    c.bench_function("arrangement sweep 5^4, 4 sets", |b| b.iter(|| arrangement_sweep(&gs, &arrs).unwrap()));
}

fn scan(c: &mut Criterion) {
    let cache = FactorCache::shipped().unwrap();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("exception scan", |b| {
        b.iter(|| exception_scan(Some(&cache), &ScanOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, factoring, field_mul, char_sum, scan);
criterion_main!(benches);
