//! Matrix functions and bipartite bookkeeping.
//!
//! Bipartite index convention: `index = a * d_b + b`, subsystem A slow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eig::{check_hermitian, hermitian_eig};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Eigenvalues in `[-PSD_TOL, 0)` are treated as zero in PSD contexts.
pub const PSD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Principal square root of a PSD Hermitian matrix.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    let min = e.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    // eigenvalues below the solver's resolution are roundoff from a null space
    let wmax = e.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let floor = 16.0 * f64::EPSILON * e.eigenvalues.len() as f64 * wmax;
    Ok(e.reconstruct_with(|w| if w <= floor { 0.0 } else { w.sqrt() }))
}

/// Projects a Hermitian matrix onto the PSD cone (clips negative eigenvalues).
pub fn psd_projection(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.reconstruct_with(|w| w.max(0.0)))
}

/// A ⊗ B
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * rb, a.cols() * cb, |r, c| {
        a[(r / rb, c / cb)] * b[(r % rb, c % cb)]
    })
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn check_bipartite(rho: &ComplexMatrix, da: usize, db: usize) -> Result<()> {
    if !rho.is_square() || rho.rows() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not on a {da}x{db} bipartite space",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Partial transpose on the chosen subsystem.
pub fn partial_transpose(
    rho: &ComplexMatrix,
    da: usize,
    db: usize,
    which: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(rho, da, db)?;
    Ok(ComplexMatrix::from_fn(da * db, da * db, |r, c| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        match which {
            Subsystem::B => rho[(a * db + b2, a2 * db + b)],
            Subsystem::A => rho[(a2 * db + b, a * db + b2)],
        }
    }))
}

/// Reduced matrix on the kept subsystem.
pub fn partial_trace(
    rho: &ComplexMatrix,
    da: usize,
    db: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(rho, da, db)?;
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| rho[(a * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| rho[(a * db + b, a * db + b2)]).sum()
        }),
    })
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    check_hermitian(m)?;
    Ok(hermitian_eig(m)?.eigenvalues.iter().map(|w| w.abs()).sum())
}

/// Uhlmann fidelity `[Tr sqrt(sqrt(a) b sqrt(a))]²` of two PSD matrices,
/// clamped to `[0, 1]`.
pub fn state_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "fidelity of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let sa = matrix_sqrt_psd(a)?;
    let m = sa.matmul(b).matmul(&sa).hermitian_part();
    let w = hermitian_eig(&m)?.eigenvalues;
    let floor = 16.0 * f64::EPSILON * w.len() as f64 * w.last().copied().unwrap_or(0.0).max(0.0);
    let root: f64 = w.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// Solves the Hermitian positive-definite system `G x = b` spectrally.
///
/// Fails when `w_min / w_max < cond_floor`.
pub fn hermitian_solve(
    g: &ComplexMatrix,
    b: &[Complex64],
    cond_floor: f64,
) -> Result<Vec<Complex64>> {
    let e = hermitian_eig(g)?;
    let wmax = e.eigenvalues.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    let wmin = e.eigenvalues.iter().fold(f64::INFINITY, |m, w| m.min(w.abs()));
    if wmax == 0.0 || wmin / wmax < cond_floor {
        return Err(Error::Singular(format!("condition ratio {:e}", wmin / wmax.max(f64::MIN_POSITIVE))));
    }
    let n = b.len();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for (k, &w) in e.eigenvalues.iter().enumerate() {
        let vk = e.eigenvector(k);
        let coef: Complex64 = vk.iter().zip(b).map(|(v, bi)| v.conj() * bi).sum::<Complex64>() / w;
        for (xi, vi) in x.iter_mut().zip(&vk) {
            *xi += coef * vi;
        }
    }
    Ok(x)
}
