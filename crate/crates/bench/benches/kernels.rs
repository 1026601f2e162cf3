use std::hint::black_box;

use afcoam::afc::{build_comb, propagate_echo, OpticalPulse, ToothShape};
use afcoam::entanglement::{optimize_cglmp, OptimizerOptions};
use afcoam::numerics::hermitian_eig;
use afcoam::numerics::random::random_hermitian;
use afcoam::source::mes;
use afcoam::tomography::{MleData, MleOptions, Tomographer};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn eig(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [3, 9, 81] {
        let h = random_hermitian(n, &mut rng);
        c.bench_function(&format!("hermitian_eig/{n}"), |b| b.iter(|| hermitian_eig(black_box(&h)).unwrap()));
    }
}

fn mle(c: &mut Criterion) {
    let t = Tomographer::bipartite();
    let rho = mes().projector();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let table = t.simulate_counts(&rho, 100_000, 0.0, &mut rng).unwrap();
    let init = t.linear_inversion(&table).unwrap();
    let data = MleData::from_table(&table);
    c.bench_function("mle/bipartite_1e5", |b| {
        b.iter(|| t.mle(black_box(&data), &init, &MleOptions::default()).unwrap())
    });
}

fn cglmp(c: &mut Criterion) {
    let rho = mes().projector();
    let opts = OptimizerOptions { restarts: 4, refine: false, ..Default::default() };
    let mut g = c.benchmark_group("optimize_cglmp");
    g.sample_size(10);
    g.bench_function("mes_4_restarts", |b| b.iter(|| optimize_cglmp(black_box(&rho), &opts).unwrap()));
    g.finish();
}

fn echo(c: &mut Criterion) {
    let comb = build_comb(25e6, 2.0, 3.0, 0.0, 1e9, ToothShape::Square).unwrap();
    let pulse = OpticalPulse::gaussian_for(&comb, 6e-9, 0.0).unwrap();
    c.bench_function("propagate_echo/square_f2_d3", |b| {
        b.iter(|| propagate_echo(black_box(&pulse), &comb).unwrap())
    });
}

criterion_group!(benches, eig, mle, cglmp, echo);
criterion_main!(benches);
