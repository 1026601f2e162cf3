use std::time::Instant;

use afcoam::entanglement::{
    cglmp_value, negativity, optimize_cglmp, uhlmann_fidelity, BellSettings, OptimizerOptions,
};
use afcoam::numerics::kron;
use afcoam::numerics::random::{haar_unitary, random_density};
use afcoam::source::mes;
use afcoam::DensityMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const QUANTUM_CEILING: f64 = 2.9149;

fn gamma_state(gamma: f64) -> DensityMatrix {
    let n = (2.0 + gamma * gamma).sqrt();
    let mut ket = vec![Complex64::new(0.0, 0.0); 9];
    ket[2] = Complex64::new(1.0 / n, 0.0);
    ket[4] = Complex64::new(-gamma / n, 0.0);
    ket[6] = Complex64::new(1.0 / n, 0.0);
    DensityMatrix::pure(&ket, (3, 3)).unwrap()
}

#[test]
fn gamma_state_reaches_global_maximum() {
    let start = Instant::now();
    let r = optimize_cglmp(&gamma_state(0.7923), &OptimizerOptions::default()).unwrap();
    assert!((r.s - 2.9149).abs() <= 1e-3, "{}", r.s);
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn mes_full_search() {
    let r = optimize_cglmp(&mes().projector(), &OptimizerOptions::default()).unwrap();
    assert!(r.s >= 2.872 && r.s <= QUANTUM_CEILING + 1e-3, "{}", r.s);
}

#[test]
fn separable_states_respect_local_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let opts = OptimizerOptions { restarts: 4, refine: true, ..Default::default() };
    for k in 0..5 {
        let a = random_density(3, 1 + k % 3, &mut rng);
        let b = random_density(3, 1, &mut rng);
        let rho = DensityMatrix::new(kron(&a, &b), (3, 3)).unwrap();
        let r = optimize_cglmp(&rho, &opts).unwrap();
        assert!(r.s <= 2.0 + 1e-6, "{}", r.s);
    }
}

#[test]
fn random_states_below_ceiling() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let opts = OptimizerOptions { restarts: 3, refine: false, ..Default::default() };
    for rank in [1, 2, 9] {
        let rho = DensityMatrix::new(random_density(9, rank, &mut rng), (3, 3)).unwrap();
        assert!(optimize_cglmp(&rho, &opts).unwrap().s <= QUANTUM_CEILING + 1e-3);
    }
}

fn pair(seed: u64) -> (DensityMatrix, DensityMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DensityMatrix::new(random_density(9, 1 + (seed % 9) as usize, &mut rng), (3, 3)).unwrap();
    let b = DensityMatrix::new(random_density(9, 1 + (seed % 4) as usize, &mut rng), (3, 3)).unwrap();
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn negativity_is_convex(seed in any::<u64>(), lam in 0.0f64..=1.0) {
        let (a, b) = pair(seed);
        let mix = a.mix(&b, lam).unwrap();
        let lhs = negativity(&mix).unwrap();
        let rhs = lam * negativity(&a).unwrap() + (1.0 - lam) * negativity(&b).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn negativity_local_unitary_invariant(seed in any::<u64>()) {
        let (a, _) = pair(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        let uv = kron(&haar_unitary(3, &mut rng), &haar_unitary(3, &mut rng));
        let rotated = DensityMatrix::new(uv.matmul(a.matrix()).matmul(&uv.adjoint()), (3, 3)).unwrap();
        prop_assert!((negativity(&a).unwrap() - negativity(&rotated).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn fidelity_symmetric_and_bounded(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        let ab = uhlmann_fidelity(&a, &b).unwrap();
        let ba = uhlmann_fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((uhlmann_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cglmp_affine(seed in any::<u64>(), lam in 0.0f64..=1.0) {
        let (a, b) = pair(seed);
        let st = BellSettings::standard();
        let s = |r: &DensityMatrix| cglmp_value(r, &st).unwrap().s;
        let mix = a.mix(&b, lam).unwrap();
        prop_assert!((s(&mix) - (lam * s(&a) + (1.0 - lam) * s(&b))).abs() < 1e-12);
    }
}
