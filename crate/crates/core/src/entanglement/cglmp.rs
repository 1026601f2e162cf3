//! The qutrit CGLMP Bell functional.
//!
//! With `P(A_a = B_b + k) = Σ_j P(A_a = j, B_b = (j - k) mod 3)`,
//!
//! ```text
//! S = P(A1=B1) + P(B1=A2+1) + P(A2=B2) + P(B2=A1)
//!   - P(A1=B1-1) - P(B1=A2) - P(A2=B2-1) - P(B2=A1-1)
//! ```
//!
//! Local models obey `S <= 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{kron_vec, ComplexMatrix};
use crate::state::DensityMatrix;
use crate::tomography::sample_counts;

pub const UNITARY_TOL: f64 = 1e-10;

/// Setting pairs in the order used by probability and count tables.
pub const SETTING_PAIRS: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

/// Sign of `P(A=j, B=l)` in `S` for each pair in [`SETTING_PAIRS`], indexed
/// by `(j - l) mod 3`.
const COEFFICIENTS: [[f64; 3]; 4] = [
    // A1B1: +P(A1=B1), -P(A1=B1-1)
    [1.0, 0.0, -1.0],
    // A2B1: +P(B1=A2+1) = P(A2=B1-1), -P(B1=A2)
    [-1.0, 0.0, 1.0],
    // A2B2: +P(A2=B2), -P(A2=B2-1)
    [1.0, 0.0, -1.0],
    // A1B2: +P(B2=A1), -P(B2=A1-1) = P(A1=B2+1)
    [1.0, -1.0, 0.0],
];

fn coefficient(pair: usize, j: usize, l: usize) -> f64 {
    COEFFICIENTS[pair][(j + 3 - l) % 3]
}

/// Four measurement bases; column `k` of each unitary is the ket of outcome `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellSettings {
    #[serde(rename = "A1")]
    pub a1: ComplexMatrix,
    #[serde(rename = "A2")]
    pub a2: ComplexMatrix,
    #[serde(rename = "B1")]
    pub b1: ComplexMatrix,
    #[serde(rename = "B2")]
    pub b2: ComplexMatrix,
}

impl BellSettings {
    pub fn new(a1: ComplexMatrix, a2: ComplexMatrix, b1: ComplexMatrix, b2: ComplexMatrix) -> Result<Self> {
        let s = Self { a1, a2, b1, b2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, u) in [("A1", &self.a1), ("A2", &self.a2), ("B1", &self.b1), ("B2", &self.b2)] {
            if u.rows() != 3 || !u.is_square() {
                return Err(Error::DimensionMismatch(format!("basis {name} must be 3x3")));
            }
            let res = u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(3));
            if res > UNITARY_TOL {
                return Err(Error::InvalidParameter(format!("basis {name} is not unitary (residual {res:e})")));
            }
        }
        Ok(())
    }

    pub fn alice(&self, a: usize) -> &ComplexMatrix {
        if a == 0 {
            &self.a1
        } else {
            &self.a2
        }
    }

    pub fn bob(&self, b: usize) -> &ComplexMatrix {
        if b == 0 {
            &self.b1
        } else {
            &self.b2
        }
    }

    /// Settings that reach `2.8729` on `|ψ₀>`: Fourier bases with phases
    /// `α = (0, 1/2)`, `β = (1/4, -1/4)` (units of 2π/3) for the all-plus
    /// state `Σ|jj>/√3`, with Bob's bases carried through the local map
    /// `|0> -> |2>, |1> -> -|1>, |2> -> |0>` that takes it to `|ψ₀>`.
    pub fn standard() -> Self {
        let flip = ComplexMatrix::from_fn(3, 3, |r, c| match (r, c) {
            (0, 2) | (2, 0) => Complex64::new(1.0, 0.0),
            (1, 1) => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
        Self {
            a1: shifted_fourier(1, 0.0),
            a2: shifted_fourier(1, 0.5),
            b1: flip.matmul(&shifted_fourier(-1, 0.25)),
            b2: flip.matmul(&shifted_fourier(-1, -0.25)),
        }
    }
}

/// Column `k`: `Σ_j ω^{j (sign·k + shift)} |j> / √3`, `ω = e^{2πi/3}`.
pub fn shifted_fourier(sign: i32, shift: f64) -> ComplexMatrix {
    let s = 1.0 / 3f64.sqrt();
    ComplexMatrix::from_fn(3, 3, |j, k| {
        Complex64::from_polar(s, 2.0 * PI / 3.0 * j as f64 * (sign as f64 * k as f64 + shift))
    })
}

/// `diag(e^{iφ}) F` with `F` the DFT (sign +1) or its conjugate (sign -1).
pub fn phased_fourier(phases: &[f64], sign: i32) -> ComplexMatrix {
    let f = shifted_fourier(sign, 0.0);
    ComplexMatrix::from_fn(3, 3, |j, k| f[(j, k)] * Complex64::from_polar(1.0, phases[j]))
}

/// `P(A_a = j, B_b = l)` for each pair of [`SETTING_PAIRS`].
pub fn joint_probabilities(rho: &DensityMatrix, settings: &BellSettings) -> Result<[[[f64; 3]; 3]; 4]> {
    if rho.dims() != (3, 3) {
        return Err(Error::DimensionMismatch(format!("expected a qutrit pair, got {:?}", rho.dims())));
    }
    Ok(joint_unchecked(rho.matrix(), settings))
}

#[allow(clippy::needless_range_loop)]
pub(crate) fn joint_unchecked(rho: &ComplexMatrix, settings: &BellSettings) -> [[[f64; 3]; 3]; 4] {
    let mut out = [[[0.0; 3]; 3]; 4];
    for (p, &(a, b)) in SETTING_PAIRS.iter().enumerate() {
        let (ua, ub) = (settings.alice(a), settings.bob(b));
        for j in 0..3 {
            let aj = ua.col(j);
            for l in 0..3 {
                let v = kron_vec(&aj, &ub.col(l));
                out[p][j][l] = rho.expectation(&v).re;
            }
        }
    }
    out
}

/// `S` from per-pair joint distributions (each normalized by its pair total).
pub fn cglmp_from_joint(p: &[[[f64; 3]; 3]; 4]) -> f64 {
    let mut s = 0.0;
    for (pair, table) in p.iter().enumerate() {
        for (j, row) in table.iter().enumerate() {
            for (l, &x) in row.iter().enumerate() {
                s += coefficient(pair, j, l) * x;
            }
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingsFamily {
    Fourier,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellResult {
    #[serde(rename = "S")]
    pub s: f64,
    pub stderr: Option<f64>,
    pub settings: BellSettings,
    pub restarts: usize,
    pub family: SettingsFamily,
    /// False when no local search met its tolerance.
    #[serde(default = "default_true")]
    pub converged: bool,
}

fn default_true() -> bool {
    true
}

pub fn cglmp_value(rho: &DensityMatrix, settings: &BellSettings) -> Result<BellResult> {
    settings.validate()?;
    let s = cglmp_from_joint(&joint_probabilities(rho, settings)?);
    Ok(BellResult { s, stderr: None, settings: settings.clone(), restarts: 0, family: SettingsFamily::General, converged: true })
}

/// Coincidence counts `n[pair][j][l]` for the pairs of [`SETTING_PAIRS`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellCounts {
    pub counts: [[[u64; 3]; 3]; 4],
}

impl BellCounts {
    /// Each of the 36 projectors is counted over `exposure` trials.
    pub fn simulate<R: Rng + ?Sized>(
        rho: &DensityMatrix,
        settings: &BellSettings,
        exposure: u64,
        rng: &mut R,
    ) -> Result<Self> {
        let p = joint_probabilities(rho, settings)?;
        let flat: Vec<f64> = p.iter().flatten().flatten().copied().collect();
        let n = sample_counts(&flat, exposure, 0.0, rng)?;
        let mut counts = [[[0u64; 3]; 3]; 4];
        for (k, c) in n.into_iter().enumerate() {
            counts[k / 9][(k / 3) % 3][k % 3] = c;
        }
        Ok(Self { counts })
    }
}

/// `S` from relative frequencies with a Poisson-propagated standard error:
/// `∂S/∂n_{jl} = (c_{jl} - S_pair) / N_pair`, `Var n = n`.
pub fn bell_from_counts(counts: &BellCounts, settings: &BellSettings) -> Result<BellResult> {
    let mut s = 0.0;
    let mut var = 0.0;
    for (pair, table) in counts.counts.iter().enumerate() {
        let total: u64 = table.iter().flatten().sum();
        if total == 0 {
            return Err(Error::InvalidParameter(format!("no counts for setting pair {pair}")));
        }
        let n = total as f64;
        let mut s_pair = 0.0;
        for (j, row) in table.iter().enumerate() {
            for (l, &c) in row.iter().enumerate() {
                s_pair += coefficient(pair, j, l) * c as f64 / n;
            }
        }
        for (j, row) in table.iter().enumerate() {
            for (l, &c) in row.iter().enumerate() {
                let d = (coefficient(pair, j, l) - s_pair) / n;
                var += d * d * c as f64;
            }
        }
        s += s_pair;
    }
    Ok(BellResult {
        s,
        stderr: Some(var.sqrt()),
        settings: settings.clone(),
        restarts: 0,
        family: SettingsFamily::General,
        converged: true,
    })
}
