//! Density matrices on single qudits or two-qudit product spaces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, partial_trace, ComplexMatrix, Subsystem, PSD_TOL};

/// Tolerance on `|Tr(rho) - 1|` accepted by [`DensityMatrix::new`].
pub const TRACE_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, PSD operator. `dims` is `(d_a, d_b)`; single
/// systems use `d_b = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity (eigenvalues >= -1e-8).
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        if matrix.rows() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for dims {:?}",
                matrix.rows(),
                dims
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eig(&matrix)?.eigenvalues[0];
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { matrix: matrix.hermitian_part(), dims })
    }

    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, (d, 1))
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: (usize, usize)) -> Self {
        Self { matrix, dims }
    }

    /// Normalizes a PSD Hermitian matrix by its trace.
    pub fn from_unnormalized(matrix: &ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidParameter(format!("non-positive trace {tr}")));
        }
        Self::new(matrix.hermitian_part().scale_re(1.0 / tr), dims)
    }

    /// |psi><psi| for a normalized ket.
    pub fn pure(ket: &[Complex64], dims: (usize, usize)) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("ket norm^2 {norm} is not 1")));
        }
        if ket.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch(format!("ket length {} for dims {:?}", ket.len(), dims)));
        }
        Ok(Self { matrix: ComplexMatrix::outer(ket), dims })
    }

    pub fn maximally_mixed(dims: (usize, usize)) -> Self {
        let d = dims.0 * dims.1;
        Self { matrix: ComplexMatrix::identity(d).scale_re(1.0 / d as f64), dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Born probability <v|rho|v>.
    pub fn probability(&self, v: &[Complex64]) -> f64 {
        self.matrix.expectation(v).re
    }

    /// Convex mixture `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("mixing states of different dims".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w} outside [0,1]")));
        }
        let m = &self.matrix.scale_re(w) + &other.matrix.scale_re(1.0 - w);
        Ok(Self { matrix: m, dims: self.dims })
    }

    pub fn reduced(&self, keep: Subsystem) -> Result<Self> {
        let m = partial_trace(&self.matrix, self.dims.0, self.dims.1, keep)?;
        let d = m.rows();
        Ok(Self { matrix: m, dims: (d, 1) })
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }
}
