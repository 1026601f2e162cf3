//! State reconstruction from projective counts: constrained linear inversion
//! and Poisson maximum likelihood.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::basis::traceless_hermitian_basis;
use super::counts::{sample_counts, CountRow, CountTable, TomoMode};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, psd_projection, ComplexMatrix};
use crate::source::{product_analysis_vectors, tomography_kets};
use crate::state::DensityMatrix;

/// Smallest eigenvalue ratio accepted for the linear-inversion design.
const DESIGN_COND_FLOOR: f64 = 1e-12;
/// Weight of I/D mixed into the starting point so every rate is positive.
const MLE_INIT_MIXING: f64 = 1e-3;
const MLE_MAX_STEP: f64 = 64.0;
const MLE_MIN_STEP: f64 = 1e-14;

/// Analysis vectors together with the precomputed least-squares inverse.
#[derive(Debug, Clone)]
pub struct Tomographer {
    mode: TomoMode,
    dims: (usize, usize),
    vectors: Vec<Vec<Complex64>>,
    basis: Vec<ComplexMatrix>,
    /// `(AᵀA)⁻¹Aᵀ`, one row per basis element.
    pinv: Vec<Vec<f64>>,
    /// `Tr(Π_s)/D`, the fixed identity contribution to each probability.
    offset: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Stop once an accepted step gains less than this much log-likelihood.
    pub tolerance: f64,
    pub initial_step: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { max_iterations: 100_000, tolerance: 1e-10, initial_step: 0.5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TomoEstimate {
    pub rho: DensityMatrix,
    /// Poisson log-likelihood in deviance form (0 for a perfect fit).
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-likelihood after each accepted step, starting with the initial point.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// Observed data for the likelihood: counts `n_s`, trials `N_s` and the
/// accidental mean `b`, so the model rate is `N_s p_s + b`.
#[derive(Debug, Clone)]
pub struct MleData {
    pub counts: Vec<f64>,
    pub exposures: Vec<f64>,
    pub background: f64,
}

impl MleData {
    pub fn from_table(t: &CountTable) -> Self {
        Self { counts: t.counts(), exposures: t.exposures(), background: t.background }
    }

    /// Infinite-statistics data: the probabilities themselves act as counts.
    pub fn from_probabilities(p: &[f64]) -> Self {
        Self { counts: p.to_vec(), exposures: vec![1.0; p.len()], background: 0.0 }
    }
}

impl Tomographer {
    /// 81 product settings on a qutrit pair.
    pub fn bipartite() -> Self {
        Self::new(TomoMode::Bipartite, (3, 3), product_analysis_vectors()).expect("analysis set is complete")
    }

    /// 9 single-qutrit settings.
    pub fn single() -> Self {
        let v = tomography_kets().into_iter().map(|k| k.amplitudes().to_vec()).collect();
        Self::new(TomoMode::Single, (3, 1), v).expect("analysis set is complete")
    }

    pub fn for_mode(mode: TomoMode) -> Self {
        match mode {
            TomoMode::Bipartite => Self::bipartite(),
            TomoMode::Single => Self::single(),
        }
    }

    pub fn new(mode: TomoMode, dims: (usize, usize), vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = dims.0 * dims.1;
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(format!("analysis vectors must have length {d}")));
        }
        let basis = traceless_hermitian_basis(d);
        // design row s: Tr(Π_s λ_m) = <v|λ_m|v>
        let a: Vec<Vec<f64>> = vectors.iter().map(|v| basis.iter().map(|l| l.expectation(v).re).collect()).collect();
        let k = basis.len();
        let ata = ComplexMatrix::from_fn(k, k, |m, n| Complex64::new(a.iter().map(|row| row[m] * row[n]).sum(), 0.0));
        let eig = hermitian_eig(&ata)?;
        let wmax = eig.eigenvalues[k - 1];
        if wmax <= 0.0 || eig.eigenvalues[0] / wmax < DESIGN_COND_FLOOR {
            return Err(Error::Singular("analysis settings are not informationally complete".into()));
        }
        let inv = eig.reconstruct_with(|w| 1.0 / w);
        let pinv = (0..k)
            .map(|m| (0..vectors.len()).map(|s| (0..k).map(|n| inv[(m, n)].re * a[s][n]).sum()).collect())
            .collect();
        let offset = vectors.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() / d as f64).collect();
        Ok(Self { mode, dims, vectors, basis, pinv, offset })
    }

    pub fn mode(&self) -> TomoMode {
        self.mode
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// Born-rule probabilities `<v_s|ρ|v_s>`.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.vectors.iter().map(|v| rho.expectation(v).re).collect()
    }

    pub fn simulate_counts<R: Rng + ?Sized>(
        &self,
        rho: &DensityMatrix,
        exposure: u64,
        background: f64,
        rng: &mut R,
    ) -> Result<CountTable> {
        if rho.dims() != self.dims {
            return Err(Error::DimensionMismatch(format!("state dims {:?}, expected {:?}", rho.dims(), self.dims)));
        }
        let counts = sample_counts(&self.probabilities(rho.matrix()), exposure, background, rng)?;
        let rows = self
            .mode
            .settings()
            .into_iter()
            .zip(counts)
            .map(|((i, j), counts)| CountRow { setting_i: i, setting_j: j, counts, exposure })
            .collect();
        CountTable::new(self.mode, rows, background)
    }

    /// Unit-trace Hermitian least-squares fit to per-setting frequencies.
    pub fn invert_frequencies(&self, freqs: &[f64]) -> Result<ComplexMatrix> {
        if freqs.len() != self.vectors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} frequencies for {} settings",
                freqs.len(),
                self.vectors.len()
            )));
        }
        let d = self.dims.0 * self.dims.1;
        let mut rho = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
        for (row, lambda) in self.pinv.iter().zip(&self.basis) {
            let x: f64 = row.iter().zip(freqs).zip(&self.offset).map(|((p, f), o)| p * (f - o)).sum();
            rho = &rho + &lambda.scale_re(x);
        }
        Ok(rho)
    }

    pub fn linear_inversion(&self, counts: &CountTable) -> Result<ComplexMatrix> {
        self.check_table(counts)?;
        self.invert_frequencies(&counts.frequencies())
    }

    fn check_table(&self, counts: &CountTable) -> Result<()> {
        if counts.mode != self.mode {
            return Err(Error::DimensionMismatch(format!("{:?} table for a {:?} reconstructor", counts.mode, self.mode)));
        }
        counts.validate()
    }

    pub fn mle_reconstruct(&self, counts: &CountTable, init: &ComplexMatrix) -> Result<TomoEstimate> {
        self.check_table(counts)?;
        self.mle(&MleData::from_table(counts), init, &MleOptions::default())
    }

    /// Poisson log-likelihood `Σ n ln(λ/n) - λ + n` with `λ_s = N_s p_s + b`.
    pub fn log_likelihood(&self, data: &MleData, rho: &ComplexMatrix) -> f64 {
        self.probabilities(rho)
            .iter()
            .zip(&data.counts)
            .zip(&data.exposures)
            .map(|((&p, &n), &big_n)| {
                let lam = big_n * p.max(0.0) + data.background;
                if n > 0.0 {
                    if lam <= 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        n * (lam / n).ln() - lam + n
                    }
                } else {
                    -lam
                }
            })
            .sum()
    }

    /// Diluted `RρR` ascent: `ρ ← (I + εG) ρ (I + εG) / Tr` with `G` the
    /// likelihood gradient `Σ (n_s/λ_s - 1) N_s Π_s`, scaled to unit order.
    /// Steps that would lower the likelihood are halved until they do not,
    /// so the likelihood never decreases.
    pub fn mle(&self, data: &MleData, init: &ComplexMatrix, opts: &MleOptions) -> Result<TomoEstimate> {
        let d = self.dims.0 * self.dims.1;
        let s = self.vectors.len();
        if data.counts.len() != s || data.exposures.len() != s {
            return Err(Error::DimensionMismatch(format!("likelihood data must have {s} entries")));
        }
        if init.rows() != d || !init.is_square() {
            return Err(Error::DimensionMismatch(format!("initial state must be {d}x{d}")));
        }
        let mut rho = psd_projection(&init.hermitian_part())?;
        let tr = rho.trace().re;
        rho = if tr > 0.0 { rho.scale_re(1.0 / tr) } else { ComplexMatrix::identity(d).scale_re(1.0 / d as f64) };
        rho = &rho.scale_re(1.0 - MLE_INIT_MIXING) + &ComplexMatrix::identity(d).scale_re(MLE_INIT_MIXING / d as f64);

        let weight: f64 = self.vectors.iter().zip(&data.exposures).map(|(v, n)| n * v.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum();
        let scale = d as f64 / weight;
        let identity = ComplexMatrix::identity(d);

        let mut ll = self.log_likelihood(data, &rho);
        if !ll.is_finite() {
            return Err(Error::InvalidParameter("initial state assigns zero rate to observed counts".into()));
        }
        let mut history = vec![ll];
        let mut step = opts.initial_step;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < opts.max_iterations {
            iterations += 1;
            let probs = self.probabilities(&rho);
            let mut g = ComplexMatrix::zeros(d, d);
            for ((v, &p), (&n, &big_n)) in self.vectors.iter().zip(&probs).zip(data.counts.iter().zip(&data.exposures)) {
                let lam = big_n * p.max(0.0) + data.background;
                let w = if lam > 0.0 { (n / lam - 1.0) * big_n } else { -big_n } * scale;
                add_outer(&mut g, v, w);
            }
            let accepted = loop {
                let k = &identity + &g.scale_re(step);
                let cand = k.matmul(&rho).matmul(&k);
                let tr = cand.trace().re;
                if tr > 0.0 {
                    let cand = cand.scale_re(1.0 / tr).hermitian_part();
                    let cl = self.log_likelihood(data, &cand);
                    if cl >= ll {
                        break Some((cand, cl));
                    }
                }
                step *= 0.5;
                if step < MLE_MIN_STEP {
                    break None;
                }
            };
            let Some((cand, cl)) = accepted else {
                converged = true;
                break;
            };
            let gain = cl - ll;
            rho = cand;
            ll = cl;
            history.push(ll);
            if gain < opts.tolerance {
                converged = true;
                break;
            }
            step = (step * 2.0).min(MLE_MAX_STEP);
        }
        let rho = DensityMatrix::from_unnormalized(&rho, self.dims)?;
        Ok(TomoEstimate { rho, log_likelihood: ll, iterations, converged, history })
    }
}

fn add_outer(m: &mut ComplexMatrix, v: &[Complex64], w: f64) {
    for (i, vi) in v.iter().enumerate() {
        let a = vi * w;
        for (j, vj) in v.iter().enumerate() {
            m[(i, j)] += a * vj.conj();
        }
    }
}

/// Simulated counts for a qutrit pair over the 81 product settings.
pub fn simulate_counts<R: Rng + ?Sized>(rho: &DensityMatrix, exposure: u64, rng: &mut R) -> Result<CountTable> {
    Tomographer::bipartite().simulate_counts(rho, exposure, 0.0, rng)
}

pub fn linear_inversion(counts: &CountTable) -> Result<ComplexMatrix> {
    Tomographer::for_mode(counts.mode).linear_inversion(counts)
}

pub fn mle_reconstruct(counts: &CountTable, init: &ComplexMatrix) -> Result<TomoEstimate> {
    Tomographer::for_mode(counts.mode).mle_reconstruct(counts, init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_density;
    use crate::numerics::state_fidelity;
    use crate::source::mes;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_inversion_recovers_state() {
        let t = Tomographer::bipartite();
        let psi = mes().projector();
        let r = t.invert_frequencies(&t.probabilities(psi.matrix())).unwrap();
        assert!(r.max_abs_diff(psi.matrix()) < 1e-10);
        let mixed = DensityMatrix::maximally_mixed((3, 3));
        let r = t.invert_frequencies(&t.probabilities(mixed.matrix())).unwrap();
        assert!(r.max_abs_diff(mixed.matrix()) < 1e-10);
        let s = Tomographer::single();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density(3, 3, &mut rng);
        assert!(s.invert_frequencies(&s.probabilities(&rho)).unwrap().max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn finite_counts_keep_unit_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = DensityMatrix::new(random_density(9, 2, &mut rng), (3, 3)).unwrap();
        let counts = simulate_counts(&rho, 200, &mut rng).unwrap();
        let r = linear_inversion(&counts).unwrap();
        assert!((r.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(r.hermiticity_residual() < 1e-12);
    }

    #[test]
    fn incomplete_settings_rejected() {
        let v: Vec<Vec<Complex64>> = tomography_kets().into_iter().take(5).map(|k| k.amplitudes().to_vec()).collect();
        assert!(matches!(Tomographer::new(TomoMode::Single, (3, 1), v), Err(Error::Singular(_))));
    }

    #[test]
    fn mle_is_monotone_and_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = DensityMatrix::new(random_density(9, 1, &mut rng), (3, 3)).unwrap();
        let counts = simulate_counts(&rho, 500, &mut rng).unwrap();
        let lin = linear_inversion(&counts).unwrap();
        assert!(hermitian_eig(&lin).unwrap().eigenvalues[0] < 0.0);
        let est = mle_reconstruct(&counts, &lin).unwrap();
        assert!(est.converged);
        assert!(est.history.windows(2).all(|w| w[1] >= w[0]));
        assert!(hermitian_eig(est.rho.matrix()).unwrap().eigenvalues[0] >= -1e-10);
        assert!(state_fidelity(est.rho.matrix(), rho.matrix()).unwrap() > 0.9);
    }

    #[test]
    fn exact_probabilities_fixed_point() {
        let t = Tomographer::single();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(3, 3, &mut rng);
        let data = MleData::from_probabilities(&t.probabilities(&rho));
        let est = t.mle(&data, &ComplexMatrix::identity(3), &MleOptions::default()).unwrap();
        assert!(est.rho.matrix().max_abs_diff(&rho) < 1e-4, "{}", est.rho.matrix().max_abs_diff(&rho));
    }

    #[test]
    fn simulated_counts_match_born_rule() {
        let t = Tomographer::bipartite();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rho = DensityMatrix::new(random_density(9, 3, &mut rng), (3, 3)).unwrap();
        let p = t.probabilities(rho.matrix());
        let exposure = 1000u64;
        let runs = 100;
        let mut sums = vec![0.0; 81];
        for seed in 0..runs {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let c = t.simulate_counts(&rho, exposure, 0.0, &mut r).unwrap();
            sums.iter_mut().zip(c.counts()).for_each(|(s, n)| *s += n);
        }
        // 81 simultaneous comparisons: bound each at 4σ and the spread of z at ~1
        let z: Vec<f64> = sums
            .iter()
            .zip(&p)
            .map(|(s, p)| {
                let mean = s / runs as f64;
                let sigma = (exposure as f64 * p * (1.0 - p) / runs as f64).sqrt();
                (mean - exposure as f64 * p) / sigma
            })
            .collect();
        assert!(z.iter().all(|z| z.abs() <= 4.0), "{z:?}");
        let rms = (z.iter().map(|z| z * z).sum::<f64>() / z.len() as f64).sqrt();
        assert!((rms - 1.0).abs() < 0.3, "{rms}");
    }

    #[test]
    fn product_state_counts() {
        let mut ket = vec![Complex64::new(0.0, 0.0); 9];
        ket[4] = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(&ket, (3, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = simulate_counts(&rho, 10_000, &mut rng).unwrap();
        // (|0>,|0>) is setting 1*9+1; (|-1>,|0>) is 0*9+1
        assert_eq!(c.rows[10].counts, 10_000);
        assert_eq!(c.rows[1].counts, 0);
    }
}
