use afcoam::numerics::state_fidelity;
use afcoam::source::mes;
use afcoam::tomography::{linear_inversion, mle_reconstruct, simulate_counts, TomoEstimate};
use afcoam::DensityMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reconstruct(rho: &DensityMatrix, exposure: u64, seed: u64) -> TomoEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = simulate_counts(rho, exposure, &mut rng).unwrap();
    let lin = linear_inversion(&counts).unwrap();
    mle_reconstruct(&counts, &lin).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn mes_reconstructs_at_high_exposure() {
    let psi = mes().projector();
    let fids: Vec<f64> = (0..10)
        .map(|seed| {
            let est = reconstruct(&psi, 10_000_000, seed);
            assert!(est.history.windows(2).all(|w| w[1] >= w[0]), "seed {seed}");
            state_fidelity(est.rho.matrix(), psi.matrix()).unwrap()
        })
        .collect();
    assert!(median(fids.clone()) >= 0.999, "{fids:?}");
}

#[test]
fn maximally_mixed_reconstructs() {
    let mixed = DensityMatrix::maximally_mixed((3, 3));
    let est = reconstruct(&mixed, 1_000_000, 1);
    assert!(est.rho.matrix().max_abs_diff(mixed.matrix()) <= 0.01);
    assert!(est.converged);
}

#[test]
fn fidelity_improves_with_exposure() {
    let psi = mes().projector();
    let fid = |exposure| {
        median((0..5).map(|s| state_fidelity(reconstruct(&psi, exposure, 100 + s).rho.matrix(), psi.matrix()).unwrap()).collect())
    };
    assert!(fid(1_000_000) >= fid(10_000));
}
