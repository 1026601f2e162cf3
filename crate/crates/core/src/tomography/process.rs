//! Qutrit process tomography.
//!
//! A channel `E` is stored through its Choi matrix
//! `J = Σ_{jk} E(|j><k|) ⊗ |j><k|` (output factor slow), and the χ matrix over
//! `λ₁..λ₉` is `χ = W† J W`, where column `m` of `W` is the row-major
//! vectorization of `λ_m`. Then `E(ρ) = Σ_{mn} χ_mn λ_m ρ λ_n†`, the identity
//! channel has `χ₁₁ = 3`, and trace preservation reads `Tr_out J = I`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::qutrit_operator_basis;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, kron, partial_trace, psd_projection, state_fidelity, ComplexMatrix, Subsystem, PSD_TOL};
use crate::source::OamKet;
use crate::state::DensityMatrix;

const D: usize = 3;
pub const TP_TOLERANCE: f64 = 1e-6;
pub const MAX_ALTERNATIONS: usize = 500;
/// Smallest eigenvalue ratio of the input Gram matrix.
const INPUT_COND_FLOOR: f64 = 1e-10;

/// χ matrix of a qutrit channel over the basis `λ₁..λ₉`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessMatrix {
    pub chi: ComplexMatrix,
}

fn vectorized_basis() -> ComplexMatrix {
    let basis = qutrit_operator_basis();
    ComplexMatrix::from_fn(D * D, D * D, |row, m| basis[m].as_slice()[row])
}

impl ProcessMatrix {
    pub fn new(chi: ComplexMatrix) -> Result<Self> {
        if chi.rows() != D * D || !chi.is_square() {
            return Err(Error::DimensionMismatch(format!("χ must be 9x9, got {}x{}", chi.rows(), chi.cols())));
        }
        let res = chi.hermiticity_residual();
        if res > 1e-9 * chi.max_abs().max(1.0) {
            return Err(Error::NotHermitian { residual: res });
        }
        Ok(Self { chi: chi.hermitian_part() })
    }

    pub fn from_choi(j: &ComplexMatrix) -> Result<Self> {
        let w = vectorized_basis();
        Self::new(w.adjoint().matmul(j).matmul(&w))
    }

    pub fn choi(&self) -> ComplexMatrix {
        let w = vectorized_basis();
        w.matmul(&self.chi).matmul(&w.adjoint())
    }

    /// Builds χ from the action of a linear map on the matrix units.
    pub fn from_map(map: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let mut j = ComplexMatrix::zeros(D * D, D * D);
        for a in 0..D {
            for b in 0..D {
                let unit = ComplexMatrix::from_fn(D, D, |r, c| Complex64::new((r == a && c == b) as u8 as f64, 0.0));
                let out = map(&unit);
                j = &j + &kron(&out, &unit);
            }
        }
        Self::from_choi(&j)
    }

    pub fn identity() -> Self {
        Self::from_map(|rho| rho.clone()).expect("identity map")
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != D || !u.is_square() {
            return Err(Error::DimensionMismatch("unitary must be 3x3".into()));
        }
        let ud = u.adjoint();
        Self::from_map(|rho| u.matmul(rho).matmul(&ud))
    }

    /// `E(ρ) = (1-p) ρ + p Tr(ρ) I/3`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("depolarizing weight {p} outside [0,1]")));
        }
        Self::from_map(|rho| {
            &rho.scale_re(1.0 - p) + &ComplexMatrix::identity(D).scale_re(p * rho.trace().re / D as f64)
        })
    }

    /// `Σ χ_mn λ_m ρ λ_n†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != D || !rho.is_square() {
            return Err(Error::DimensionMismatch("process acts on 3x3 matrices".into()));
        }
        let basis = qutrit_operator_basis();
        let mut out = ComplexMatrix::zeros(D, D);
        for (m, lm) in basis.iter().enumerate() {
            let left = lm.matmul(rho);
            for (n, ln) in basis.iter().enumerate() {
                let c = self.chi[(m, n)];
                if c != Complex64::new(0.0, 0.0) {
                    out = &out + &left.matmul(&ln.adjoint()).scale(c);
                }
            }
        }
        Ok(out)
    }

    /// `max |Tr_out J - I|`.
    pub fn trace_preservation_residual(&self) -> f64 {
        tp_residual(&self.choi())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(&self.chi)?.eigenvalues[0])
    }

    /// Normalized Choi state `J / Tr J`.
    pub fn choi_state(&self) -> Result<ComplexMatrix> {
        let j = self.choi();
        let tr = j.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidParameter("process has zero trace".into()));
        }
        Ok(j.scale_re(1.0 / tr))
    }
}

fn tp_residual(j: &ComplexMatrix) -> f64 {
    partial_trace(j, D, D, Subsystem::B).expect("9x9 Choi").max_abs_diff(&ComplexMatrix::identity(D))
}

/// Moves `J` onto the affine set `Tr_out J = I` along `(I/d) ⊗ Δ`.
fn tp_projection(j: &ComplexMatrix) -> ComplexMatrix {
    let excess = &partial_trace(j, D, D, Subsystem::B).expect("9x9 Choi") - &ComplexMatrix::identity(D);
    j - &kron(&ComplexMatrix::identity(D).scale_re(1.0 / D as f64), &excess)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessFit {
    pub process: ProcessMatrix,
    pub alternations: usize,
    pub tp_residual: f64,
    pub converged: bool,
}

/// Fits χ to the outputs produced by nine informationally complete inputs,
/// then alternates PSD and trace-preservation projections of the Choi matrix.
pub fn process_tomography(inputs: &[OamKet], outputs: &[DensityMatrix]) -> Result<ProcessFit> {
    if inputs.len() != outputs.len() || inputs.len() < D * D {
        return Err(Error::DimensionMismatch(format!(
            "{} inputs and {} outputs; need at least 9 pairs",
            inputs.len(),
            outputs.len()
        )));
    }
    if inputs.iter().any(|k| k.dim() != D) || outputs.iter().any(|o| o.dim() != D) {
        return Err(Error::DimensionMismatch("process tomography is for single qutrits".into()));
    }
    let proj: Vec<ComplexMatrix> = inputs.iter().map(|k| ComplexMatrix::outer(k.amplitudes())).collect();
    let s = proj.len();
    let gram = ComplexMatrix::from_fn(s, s, |a, b| proj[a].hs_inner(&proj[b]));
    let eig = hermitian_eig(&gram)?;
    let wmax = eig.eigenvalues[s - 1];
    // the input projectors must span all nine operator directions
    let rank = eig.eigenvalues.iter().filter(|&&w| w > INPUT_COND_FLOOR * wmax).count();
    if rank < D * D {
        return Err(Error::Singular(format!("input set spans {rank} of 9 operator directions")));
    }
    let pinv = eig.reconstruct_with(|w| if w > INPUT_COND_FLOOR * wmax { 1.0 / w } else { 0.0 });

    let mut j = ComplexMatrix::zeros(D * D, D * D);
    for a in 0..D {
        for b in 0..D {
            // |a><b| = Σ_s c_s P_s with G c = (<P_t, |a><b|>)_t
            let rhs: Vec<Complex64> = proj.iter().map(|p| p[(a, b)].conj()).collect();
            let c = pinv.mat_vec(&rhs);
            let mut out = ComplexMatrix::zeros(D, D);
            for (cs, o) in c.iter().zip(outputs) {
                out = &out + &o.matrix().scale(*cs);
            }
            let unit = ComplexMatrix::from_fn(D, D, |r, q| Complex64::new((r == a && q == b) as u8 as f64, 0.0));
            j = &j + &kron(&out, &unit);
        }
    }
    let mut j = j.hermitian_part();
    let mut alternations = 0;
    let physical = |j: &ComplexMatrix| -> Result<bool> {
        Ok(hermitian_eig(j)?.eigenvalues[0] >= -PSD_TOL && tp_residual(j) <= TP_TOLERANCE)
    };
    while !physical(&j)? && alternations < MAX_ALTERNATIONS {
        alternations += 1;
        j = tp_projection(&psd_projection(&j)?);
    }
    // the loop ends in the trace-preserving set; finish on the PSD cone
    if alternations > 0 {
        j = psd_projection(&j)?;
    }
    let tp = tp_residual(&j);
    Ok(ProcessFit { process: ProcessMatrix::from_choi(&j)?, alternations, tp_residual: tp, converged: tp <= TP_TOLERANCE })
}

/// Uhlmann fidelity between normalized Choi states.
pub fn process_fidelity(a: &ProcessMatrix, b: &ProcessMatrix) -> Result<f64> {
    state_fidelity(&a.choi_state()?, &b.choi_state()?)
}
