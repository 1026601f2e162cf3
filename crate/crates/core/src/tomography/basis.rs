//! Orthonormal Hermitian operator bases.

use num_complex::Complex64;

use crate::numerics::ComplexMatrix;

/// Traceless Hermitian basis of `d x d` matrices with `Tr(A B) = δ`:
/// symmetric and antisymmetric off-diagonal pairs `(j, k)`, `j < k`, then the
/// `d - 1` diagonal generators.
pub fn traceless_hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = Complex64::new(h, 0.0);
            s[(k, j)] = Complex64::new(h, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = Complex64::new(0.0, -h);
            a[(k, j)] = Complex64::new(0.0, h);
            out.push(a);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> =
            (0..d).map(|i| if i < l { norm } else if i == l { -(l as f64) * norm } else { 0.0 }).collect();
        out.push(ComplexMatrix::from_real_diag(&diag));
    }
    out
}

/// Qutrit operator basis `λ₁..λ₉`: `λ₁ = I/√3`, then the Gell-Mann matrices
/// `λ1..λ8` in their standard order divided by √2.
pub fn qutrit_operator_basis() -> Vec<ComplexMatrix> {
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let i = |x: f64| Complex64::new(0.0, x);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 6f64.sqrt();
    let m = |rows: [[Complex64; 3]; 3]| {
        ComplexMatrix::from_vec(3, 3, rows.into_iter().flatten().collect()).expect("3x3 literal")
    };
    vec![
        ComplexMatrix::identity(3).scale_re(1.0 / 3f64.sqrt()),
        m([[z, r(s), z], [r(s), z, z], [z, z, z]]),
        m([[z, i(-s), z], [i(s), z, z], [z, z, z]]),
        m([[r(s), z, z], [z, r(-s), z], [z, z, z]]),
        m([[z, z, r(s)], [z, z, z], [r(s), z, z]]),
        m([[z, z, i(-s)], [z, z, z], [i(s), z, z]]),
        m([[z, z, z], [z, z, r(s)], [z, r(s), z]]),
        m([[z, z, z], [z, z, i(-s)], [z, i(s), z]]),
        m([[r(t), z, z], [z, r(t), z], [z, z, r(-2.0 * t)]]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_orthonormal(b: &[ComplexMatrix]) {
        for (m, x) in b.iter().enumerate() {
            assert!(x.hermiticity_residual() < 1e-15);
            for (n, y) in b.iter().enumerate() {
                let ip = x.hs_inner(y);
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expect, 0.0)).norm() < 1e-14, "({m},{n}) {ip}");
            }
        }
    }

    #[test]
    fn generalized_basis_orthonormal_and_traceless() {
        for d in [2, 3, 9] {
            let b = traceless_hermitian_basis(d);
            assert_eq!(b.len(), d * d - 1);
            assert!(b.iter().all(|x| x.trace().norm() < 1e-14));
            assert_orthonormal(&b);
        }
    }

    #[test]
    fn qutrit_basis_orthonormal() {
        let b = qutrit_operator_basis();
        assert_eq!(b.len(), 9);
        assert_orthonormal(&b);
        assert!(b[1..].iter().all(|x| x.trace().norm() < 1e-15));
    }
}
