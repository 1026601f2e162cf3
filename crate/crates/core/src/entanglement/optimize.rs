//! Search for CGLMP-maximizing measurement settings.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cglmp::{cglmp_from_joint, joint_unchecked, phased_fourier, BellResult, BellSettings, SettingsFamily};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, nelder_mead, ComplexMatrix, NelderMeadOptions};
use crate::state::DensityMatrix;
use crate::tomography::qutrit_operator_basis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    /// Random starts per Fourier variant.
    pub restarts: usize,
    pub seed: u64,
    /// Follow the Fourier search with a search over general unitaries.
    pub refine: bool,
    pub tolerance: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { restarts: 20, seed: 0, refine: true, tolerance: 1e-9 }
    }
}

/// Fourier family: `A_a = diag(e^{iφ}) F`, `B_b = diag(e^{iφ}) F_s`, where
/// `s = +1` suits anti-correlated states such as `|ψ₀>` and `s = -1` suits
/// `Σ|jj>`; both are searched.
fn fourier_settings(x: &[f64], bob_sign: i32) -> BellSettings {
    BellSettings {
        a1: phased_fourier(&x[0..3], 1),
        a2: phased_fourier(&x[3..6], 1),
        b1: phased_fourier(&x[6..9], bob_sign),
        b2: phased_fourier(&x[9..12], bob_sign),
    }
}

/// `exp(i Σ_m x_m λ_m)` over the traceless Gell-Mann generators.
fn generator_unitary(x: &[f64], generators: &[ComplexMatrix]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(3, 3);
    for (c, g) in x.iter().zip(generators) {
        h = &h + &g.scale_re(*c);
    }
    let e = hermitian_eig(&h).expect("generator sum is Hermitian");
    let phase = ComplexMatrix::from_fn(3, 3, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, e.eigenvalues[r])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    e.eigenvectors.matmul(&phase).matmul(&e.eigenvectors.adjoint())
}

fn refined_settings(x: &[f64], base: &BellSettings, generators: &[ComplexMatrix]) -> BellSettings {
    BellSettings {
        a1: generator_unitary(&x[0..8], generators).matmul(&base.a1),
        a2: generator_unitary(&x[8..16], generators).matmul(&base.a2),
        b1: generator_unitary(&x[16..24], generators).matmul(&base.b1),
        b2: generator_unitary(&x[24..32], generators).matmul(&base.b2),
    }
}

struct Candidate {
    s: f64,
    settings: BellSettings,
    converged: bool,
}

/// Maximizes `S` over measurement settings with seeded multi-start
/// Nelder-Mead. Restarts run in parallel; each draws from its own stream of
/// the root seed, so the result does not depend on the thread count.
pub fn optimize_cglmp(rho: &DensityMatrix, opts: &OptimizerOptions) -> Result<BellResult> {
    if rho.dims() != (3, 3) {
        return Err(Error::DimensionMismatch(format!("expected a qutrit pair, got {:?}", rho.dims())));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    let m = rho.matrix();
    let nm = NelderMeadOptions { initial_step: 0.6, x_tol: opts.tolerance, f_tol: 1e-14, max_evals: 40_000 };

    let jobs: Vec<(i32, usize)> = [1, -1].iter().flat_map(|&s| (0..opts.restarts).map(move |r| (s, r))).collect();
    let candidates: Vec<Candidate> = jobs
        .par_iter()
        .enumerate()
        .map(|(job, &(sign, _))| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(job as u64);
            let x0: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            let objective = |x: &[f64]| -cglmp_from_joint(&joint_unchecked(m, &fourier_settings(x, sign)));
            let first = nelder_mead(objective, &x0, &nm);
            // one restart from the optimum guards against simplex collapse
            let second = nelder_mead(objective, &first.x, &NelderMeadOptions { initial_step: 0.1, ..nm });
            Candidate { s: -second.f, settings: fourier_settings(&second.x, sign), converged: second.converged }
        })
        .collect();
    let any_converged = candidates.iter().any(|c| c.converged);
    let best = candidates
        .into_iter()
        .reduce(|a, b| if b.s > a.s { b } else { a })
        .expect("at least one restart");

    let mut result = BellResult {
        s: best.s,
        stderr: None,
        settings: best.settings,
        restarts: jobs.len(),
        family: SettingsFamily::Fourier,
        converged: any_converged,
    };
    if opts.refine {
        let generators = &qutrit_operator_basis()[1..];
        let base = result.settings.clone();
        let objective = |x: &[f64]| -cglmp_from_joint(&joint_unchecked(m, &refined_settings(x, &base, generators)));
        let refine_opts = NelderMeadOptions { initial_step: 0.05, x_tol: opts.tolerance, f_tol: 1e-14, max_evals: 60_000 };
        let r = nelder_mead(objective, &[0.0; 32], &refine_opts);
        if -r.f > result.s + opts.tolerance {
            result.s = -r.f;
            result.settings = refined_settings(&r.x, &base, generators);
            result.family = SettingsFamily::General;
        }
    }
    Ok(result)
}
