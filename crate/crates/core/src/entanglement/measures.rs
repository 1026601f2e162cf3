//! Negativity and fidelities.

use crate::error::{Error, Result};
use crate::numerics::{partial_transpose, state_fidelity, trace_norm, Subsystem};
use crate::source::mes;
use crate::state::DensityMatrix;

/// `(||ρ^{T_B}||₁ - 1) / 2`, clamped at zero.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let (da, db) = rho.dims();
    if db < 2 {
        return Err(Error::DimensionMismatch(format!("negativity needs a bipartite state, got {:?}", rho.dims())));
    }
    let pt = partial_transpose(rho.matrix(), da, db, Subsystem::B)?;
    Ok(((trace_norm(&pt)? - 1.0) / 2.0).max(0.0))
}

pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", rho.dims(), sigma.dims())));
    }
    state_fidelity(rho.matrix(), sigma.matrix())
}

/// `<ψ₀|ρ|ψ₀>` for the qutrit MES `ψ₀`.
pub fn fidelity_to_mes(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != (3, 3) {
        return Err(Error::DimensionMismatch(format!("expected a qutrit pair, got {:?}", rho.dims())));
    }
    Ok(rho.probability(mes().amplitudes()).clamp(0.0, 1.0))
}

/// Isotropic mixture `p |ψ₀><ψ₀| + (1 - p) I/9` with MES visibility `p`.
pub fn isotropic_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("visibility {p} outside [0,1]")));
    }
    mes().projector().mix(&DensityMatrix::maximally_mixed((3, 3)), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::kron;
    use crate::numerics::random::{haar_unitary, random_density, random_ket};
    use crate::source::isotropic_visibility_from_mes_fidelity;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mes_and_product_negativity() {
        assert!((negativity(&mes().projector()).unwrap() - 1.0).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = random_density(3, 3, &mut rng);
            let b = random_density(3, 2, &mut rng);
            let rho = DensityMatrix::new(kron(&a, &b), (3, 3)).unwrap();
            assert!(negativity(&rho).unwrap() < 1e-9);
        }
    }

    #[test]
    fn isotropic_closed_forms() {
        let p = isotropic_visibility_from_mes_fidelity(0.730);
        assert!((p - 0.69625).abs() < 1e-12);
        let rho = isotropic_state(p).unwrap();
        assert!((negativity(&rho).unwrap() - (4.0 * p - 1.0) / 3.0).abs() < 1e-9);
        assert!((negativity(&rho).unwrap() - 0.595).abs() < 1e-6);
        assert!((fidelity_to_mes(&rho).unwrap() - 0.730).abs() < 1e-12);
        assert!(negativity(&isotropic_state(0.2).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn fidelity_cases() {
        let psi = mes().projector();
        let mixed = DensityMatrix::maximally_mixed((3, 3));
        assert!((uhlmann_fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-9);
        assert!((uhlmann_fidelity(&psi, &mixed).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!((fidelity_to_mes(&mixed).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((fidelity_to_mes(&psi).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (u, v) = (random_ket(9, &mut rng), random_ket(9, &mut rng));
        let overlap: f64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<num_complex::Complex64>().norm_sqr();
        let (pu, pv) = (DensityMatrix::pure(&u, (3, 3)).unwrap(), DensityMatrix::pure(&v, (3, 3)).unwrap());
        assert!((uhlmann_fidelity(&pu, &pv).unwrap() - overlap).abs() < 1e-9);
        assert!(uhlmann_fidelity(&psi, &DensityMatrix::maximally_mixed((9, 1))).is_err());
    }

    #[test]
    fn local_unitaries_preserve_negativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let rho = random_density(9, 2, &mut rng);
            let uv = kron(&haar_unitary(3, &mut rng), &haar_unitary(3, &mut rng));
            let rotated = uv.matmul(&rho).matmul(&uv.adjoint());
            let n0 = negativity(&DensityMatrix::new(rho, (3, 3)).unwrap()).unwrap();
            let n1 = negativity(&DensityMatrix::new(rotated, (3, 3)).unwrap()).unwrap();
            assert!((n0 - n1).abs() < 1e-9);
        }
    }
}
