//! OAM qutrit states: the down-conversion pair state, the maximally
//! entangled reference state, the nine analysis kets, `|psi_pm(l)>`
//! superpositions and Laguerre-Gauss (p = 0) intensity profiles.
//!
//! Qutrit basis order is `(|-1>, |0>, |1>)` everywhere; a pair index is
//! `a * 3 + b` with photon A the slow index.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{kron_vec, ComplexMatrix};
use crate::state::DensityMatrix;

/// OAM labels of the qutrit basis, in index order.
pub const QUTRIT_LABELS: [i32; 3] = [-1, 0, 1];

/// Index of OAM label `l` in the qutrit basis.
pub fn qutrit_index(l: i32) -> Option<usize> {
    QUTRIT_LABELS.iter().position(|&x| x == l)
}

/// Normalized state vector with one OAM label list per basis element
/// (one label per photon).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OamKet {
    labels: Vec<Vec<i32>>,
    amplitudes: Vec<Complex64>,
}

impl OamKet {
    pub fn new(labels: Vec<Vec<i32>>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if labels.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch("labels and amplitudes differ in length".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("ket norm^2 {norm} is not 1")));
        }
        Ok(Self { labels, amplitudes })
    }

    /// Qutrit ket from amplitudes on `(|-1>, |0>, |1>)`, normalizing them.
    pub fn qutrit(amps: [Complex64; 3]) -> Result<Self> {
        let labels = QUTRIT_LABELS.iter().map(|&l| vec![l]).collect();
        Self::new(labels, normalize(&amps)?)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> &[Vec<i32>] {
        &self.labels
    }

    /// Single-photon OAM labels (first label of each basis element).
    pub fn single_labels(&self) -> Vec<i32> {
        self.labels.iter().map(|l| l[0]).collect()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn projector(&self) -> DensityMatrix {
        let dims = if self.labels.first().map_or(1, Vec::len) == 2 {
            let d = (self.dim() as f64).sqrt().round() as usize;
            (d, d)
        } else {
            (self.dim(), 1)
        };
        DensityMatrix::new_unchecked(ComplexMatrix::outer(&self.amplitudes), dims)
    }

    /// 1-column matrix in the shared matrix JSON form.
    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::column(&self.amplitudes)
    }
}

fn normalize(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidParameter("all amplitudes are zero".into()));
    }
    Ok(v.iter().map(|z| z / norm).collect())
}

/// Noise admixed into the pair state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpdcNoise {
    /// Weight of the maximally mixed state I/9.
    #[serde(default)]
    pub v: f64,
    /// Damping factors of the coherences between the (-1,0), (-1,1) and
    /// (0,1) pair components, each in [0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<[f64; 3]>,
}

impl Default for SpdcNoise {
    fn default() -> Self {
        Self { v: 0.0, coherence: None }
    }
}

/// Amplitudes `c_{-1}, c_0, c_1` of `sum_l c_l |l>|-l>` plus noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpdcSpec {
    pub c: [Complex64; 3],
    #[serde(default)]
    pub noise: SpdcNoise,
}

impl SpdcSpec {
    pub fn ideal(c: [Complex64; 3]) -> Self {
        Self { c, noise: SpdcNoise::default() }
    }

    /// The maximally entangled amplitudes `(1, -1, 1)/sqrt(3)`.
    pub fn maximally_entangled() -> Self {
        let s = 1.0 / 3f64.sqrt();
        Self::ideal([Complex64::new(s, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0)])
    }

    pub fn with_isotropic_noise(mut self, v: f64) -> Self {
        self.noise.v = v;
        self
    }
}

/// Pure pair ket `sum_l c_l |l>|-l>` (normalized).
pub fn spdc_ket(c: &[Complex64; 3]) -> Result<OamKet> {
    let c = normalize(c)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 9];
    let mut labels = Vec::with_capacity(9);
    for (a, &la) in QUTRIT_LABELS.iter().enumerate() {
        for &lb in &QUTRIT_LABELS {
            labels.push(vec![la, lb]);
        }
        let b = qutrit_index(-la).expect("qutrit labels are symmetric");
        amps[a * 3 + b] = c[a];
    }
    OamKet::new(labels, amps)
}

/// `(1 - v) * D(|Psi><Psi|) + v * I/9`, where `D` damps the pair coherences.
pub fn spdc_state(spec: &SpdcSpec) -> Result<DensityMatrix> {
    let v = spec.noise.v;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("noise weight v = {v} outside [0,1]")));
    }
    let ket = spdc_ket(&spec.c)?;
    let mut m = ComplexMatrix::outer(ket.amplitudes());
    if let Some(damp) = spec.noise.coherence {
        if damp.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return Err(Error::InvalidParameter("coherence factors must lie in [0,1]".into()));
        }
        // pair components sit at indices 2 (l=-1), 4 (l=0), 6 (l=1)
        let comp = [2usize, 4, 6];
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            let (r, c) = (comp[i], comp[j]);
            m[(r, c)] *= damp[k];
            m[(c, r)] *= damp[k];
        }
    }
    let mixed = ComplexMatrix::identity(9).scale_re(1.0 / 9.0);
    let rho = &m.scale_re(1.0 - v) + &mixed.scale_re(v);
    Ok(DensityMatrix::new_unchecked(rho, (3, 3)))
}

/// `(|-1>|1> - |0>|0> + |1>|-1>)/sqrt(3)`.
pub fn mes() -> OamKet {
    spdc_ket(&SpdcSpec::maximally_entangled().c).expect("fixed amplitudes are valid")
}

/// MES weight `p` of the isotropic state `p |psi0><psi0| + (1-p) I/9`
/// whose MES fidelity is `fidelity`: `F = p + (1-p)/9`.
pub fn isotropic_visibility_from_mes_fidelity(fidelity: f64) -> f64 {
    (9.0 * fidelity - 1.0) / 8.0
}

/// The nine analysis kets, in order:
/// `|-1>, |0>, |1>, (|0>+|-1>)/√2, (|0>+|1>)/√2, (|0>+i|-1>)/√2,
/// (|0>-i|1>)/√2, (|-1>+|1>)/√2, (|-1>+i|1>)/√2`.
pub fn tomography_kets() -> Vec<OamKet> {
    let o = Complex64::new(0.0, 0.0);
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, FRAC_1_SQRT_2);
    let one = Complex64::new(1.0, 0.0);
    [
        [one, o, o],
        [o, one, o],
        [o, o, one],
        [r, r, o],
        [o, r, r],
        [i, r, o],
        [o, r, -i],
        [r, o, r],
        [r, o, i],
    ]
    .into_iter()
    .map(|a| OamKet::qutrit(a).expect("analysis kets are normalized"))
    .collect()
}

/// Product analysis vectors `k_i ⊗ k_j`, ordered with `i` slow (81 entries).
pub fn product_analysis_vectors() -> Vec<Vec<Complex64>> {
    let kets = tomography_kets();
    let mut out = Vec::with_capacity(81);
    for ki in &kets {
        for kj in &kets {
            out.push(kron_vec(ki.amplitudes(), kj.amplitudes()));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// `(|l> ± |-l>)/sqrt(2)` on the two-dimensional subspace labelled `{l, -l}`.
pub fn superposition_state(l: i32, sign: Sign) -> Result<OamKet> {
    if l < 1 {
        return Err(Error::InvalidParameter(format!("superposition needs l >= 1, got {l}")));
    }
    let s = match sign {
        Sign::Plus => FRAC_1_SQRT_2,
        Sign::Minus => -FRAC_1_SQRT_2,
    };
    OamKet::new(
        vec![vec![l], vec![-l]],
        vec![Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(s, 0.0)],
    )
}

/// Laguerre-Gauss mode `LG_{p,l}`; only `p = 0` is supported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgProfile {
    pub l: i32,
    #[serde(default)]
    pub p: u32,
    /// Beam waist in mm.
    pub waist: f64,
}

impl LgProfile {
    pub fn new(l: i32, waist: f64) -> Self {
        Self { l, p: 0, waist }
    }

    /// Radius of peak intensity, `w0 * sqrt(|l|/2)`.
    pub fn peak_radius(&self) -> f64 {
        self.waist * (self.l.unsigned_abs() as f64 / 2.0).sqrt()
    }
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Intensity normalized so that `∫ I 2πr dr = 1` (units 1/mm²).
pub fn lg_intensity(profile: &LgProfile, r: f64) -> Result<f64> {
    if profile.p != 0 {
        return Err(Error::InvalidParameter(format!("radial index p = {} unsupported", profile.p)));
    }
    if r < 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("radius {r} must be finite and >= 0")));
    }
    Ok(lg_intensity_unchecked(profile.l, profile.waist, r))
}

pub(crate) fn lg_intensity_unchecked(l: i32, waist: f64, r: f64) -> f64 {
    let l = l.unsigned_abs();
    let x = 2.0 * r * r / (waist * waist);
    let pre = 2.0 / (PI * waist * waist);
    if x == 0.0 {
        return if l == 0 { pre } else { 0.0 };
    }
    pre * (l as f64 * x.ln() - x - ln_factorial(l)).exp()
}

/// Complex field amplitude `sqrt(I(r)) e^{i l φ}`.
pub fn lg_amplitude(profile: &LgProfile, r: f64, phi: f64) -> Result<Complex64> {
    let i = lg_intensity(profile, r)?;
    Ok(Complex64::from_polar(i.sqrt(), profile.l as f64 * phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{adaptive_simpson, partial_trace, Subsystem};

    #[test]
    fn mes_components() {
        let m = mes();
        let s = 1.0 / 3f64.sqrt();
        let a = m.amplitudes();
        assert!((a[2].re - s).abs() < 1e-15); // |-1>|1>
        assert!((a[4].re + s).abs() < 1e-15); // |0>|0>
        assert!((a[6].re - s).abs() < 1e-15); // |1>|-1>
        assert_eq!(m.labels()[2], vec![-1, 1]);
        let rho = m.projector();
        for keep in [Subsystem::A, Subsystem::B] {
            let red = partial_trace(rho.matrix(), 3, 3, keep).unwrap();
            assert!(red.max_abs_diff(&ComplexMatrix::identity(3).scale_re(1.0 / 3.0)) < 1e-15);
        }
    }

    #[test]
    fn spdc_reproduces_mes() {
        let rho = spdc_state(&SpdcSpec::maximally_entangled()).unwrap();
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::outer(mes().amplitudes())) < 1e-15);
    }

    #[test]
    fn spdc_product_and_errors() {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let rho = spdc_state(&SpdcSpec::ideal([z, one, z])).unwrap();
        assert_eq!(rho.matrix()[(4, 4)], one);
        assert!(spdc_state(&SpdcSpec::ideal([z, z, z])).is_err());
        assert!(spdc_state(&SpdcSpec::maximally_entangled().with_isotropic_noise(1.3)).is_err());
    }

    #[test]
    fn isotropic_mixing_weight_for_table_fidelity() {
        let rho = spdc_state(&SpdcSpec::maximally_entangled().with_isotropic_noise(0.30375)).unwrap();
        let f = rho.probability(mes().amplitudes());
        assert!((f - 0.730).abs() < 1e-12);
        assert!((isotropic_visibility_from_mes_fidelity(0.730) - 0.69625).abs() < 1e-12);
    }

    #[test]
    fn analysis_kets() {
        let k = tomography_kets();
        assert_eq!(k.len(), 9);
        for ket in &k {
            let n: f64 = ket.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-15);
        }
        assert_eq!(k[0].inner(&k[1]).norm(), 0.0);
        // (|0> - i|1>)/√2
        assert_eq!(k[6].amplitudes()[2], Complex64::new(0.0, -FRAC_1_SQRT_2));
        // (|-1> + i|1>)/√2
        assert_eq!(k[8].amplitudes()[2], Complex64::new(0.0, FRAC_1_SQRT_2));
    }

    #[test]
    fn superpositions() {
        for l in 1..=25 {
            let p = superposition_state(l, Sign::Plus).unwrap();
            let m = superposition_state(l, Sign::Minus).unwrap();
            assert!(p.inner(&m).norm() < 1e-15);
            assert_eq!(p.single_labels(), vec![l, -l]);
        }
        assert!(superposition_state(0, Sign::Plus).is_err());
    }

    #[test]
    fn lg_normalization_and_peak() {
        let w0 = 1.3;
        for l in [0, 1, 25] {
            let prof = LgProfile::new(l, w0);
            let norm = adaptive_simpson(
                |r| lg_intensity(&prof, r).unwrap() * 2.0 * PI * r,
                0.0,
                12.0 * w0,
                1e-10,
                64,
            )
            .unwrap();
            assert!((norm - 1.0).abs() < 1e-6, "l={l}: {norm}");
        }
        let l0 = LgProfile::new(0, w0);
        assert!(lg_intensity(&l0, 0.0).unwrap() > lg_intensity(&l0, 0.01).unwrap());

        // grid search for the l=25 ring radius
        let prof = LgProfile::new(25, w0);
        let (mut best_r, mut best) = (0.0, 0.0);
        for k in 0..=200_000 {
            let r = 8.0 * w0 * k as f64 / 200_000.0;
            let v = lg_intensity(&prof, r).unwrap();
            if v > best {
                best = v;
                best_r = r;
            }
        }
        let expect = w0 * 12.5f64.sqrt();
        assert!((best_r - expect).abs() / expect < 1e-3);
        assert!((prof.peak_radius() - expect).abs() < 1e-12);
        assert!(lg_intensity(&LgProfile { l: 1, p: 1, waist: 1.0 }, 0.5).is_err());
    }
}
