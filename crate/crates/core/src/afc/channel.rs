//! The memory as a trace-decreasing map on OAM states.
//!
//! Kraus model: amplitude `sqrt(η(l))` per stored mode, followed by a random
//! global rotation θ ~ N(0, σ²) that imprints `e^{ilθ}`; averaging damps the
//! coherence between modes `l` and `l'` by `exp(-(l - l')² σ² / 2)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Subsystem};
use crate::source::{superposition_state, Sign, QUTRIT_LABELS};
use crate::state::DensityMatrix;

/// Per-mode recall efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeEfficiency {
    Uniform(f64),
    /// Keyed by OAM index; modes missing from the table are an error.
    PerMode(#[serde(deserialize_with = "integer_keys")] BTreeMap<i32, f64>),
}

/// JSON object keys are strings; untagged enums cannot parse them as
/// integers directly.
fn integer_keys<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<i32, f64>, D::Error> {
    let raw = BTreeMap::<String, f64>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.trim().parse::<i32>().map(|l| (l, v)).map_err(|_| serde::de::Error::custom(format!("mode key {k:?} is not an integer")))
        })
        .collect()
}

impl ModeEfficiency {
    pub fn get(&self, l: i32) -> Result<f64> {
        let eta = match self {
            Self::Uniform(e) => *e,
            Self::PerMode(t) => *t
                .get(&l)
                .ok_or_else(|| Error::InvalidParameter(format!("no efficiency for mode l = {l}")))?,
        };
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("efficiency {eta} for l = {l} outside [0,1]")));
        }
        Ok(eta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StorageChannel {
    pub efficiency: ModeEfficiency,
    /// Std-dev of the rotational phase jitter (rad).
    pub phase_jitter: f64,
    /// Storage time 1/Δ (s).
    pub delay: f64,
}

/// Renormalized output and the pre-normalization trace.
#[derive(Debug, Clone)]
pub struct ChannelOutput {
    pub state: DensityMatrix,
    pub herald: f64,
}

impl StorageChannel {
    /// Channel for a comb with tooth spacing `spacing` (Hz).
    pub fn new(efficiency: ModeEfficiency, phase_jitter: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::InvalidParameter(format!("tooth spacing {spacing} must be positive")));
        }
        Self { efficiency, phase_jitter, delay: 1.0 / spacing }.validated()
    }

    pub fn identity() -> Self {
        Self { efficiency: ModeEfficiency::Uniform(1.0), phase_jitter: 0.0, delay: 0.0 }
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.phase_jitter >= 0.0 && self.phase_jitter.is_finite()) {
            return Err(Error::InvalidParameter(format!("phase jitter {} must be >= 0", self.phase_jitter)));
        }
        if let ModeEfficiency::Uniform(e) = self.efficiency {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidParameter(format!("efficiency {e} outside [0,1]")));
            }
        }
        Ok(self)
    }

    /// Coherence damping between modes `l` and `l2`.
    pub fn damping(&self, l: i32, l2: i32) -> f64 {
        let dl = (l - l2) as f64;
        (-0.5 * dl * dl * self.phase_jitter * self.phase_jitter).exp()
    }

    /// Applies the channel to a single photon whose basis states carry `labels`.
    pub fn apply_single(&self, rho: &DensityMatrix, labels: &[i32]) -> Result<ChannelOutput> {
        if rho.dim() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for a {}-dimensional state",
                labels.len(),
                rho.dim()
            )));
        }
        self.apply_with(rho, |i| labels[i])
    }

    /// Applies the channel to one photon of a qutrit pair.
    pub fn apply_pair(&self, rho: &DensityMatrix, stored: Subsystem) -> Result<ChannelOutput> {
        if rho.dims() != (3, 3) {
            return Err(Error::DimensionMismatch(format!("expected a 3x3 pair, got {:?}", rho.dims())));
        }
        self.apply_with(rho, |i| match stored {
            Subsystem::A => QUTRIT_LABELS[i / 3],
            Subsystem::B => QUTRIT_LABELS[i % 3],
        })
    }

    fn apply_with(&self, rho: &DensityMatrix, label: impl Fn(usize) -> i32) -> Result<ChannelOutput> {
        let n = rho.dim();
        let labels: Vec<i32> = (0..n).map(&label).collect();
        let amp: Vec<f64> = labels.iter().map(|&l| self.efficiency.get(l).map(f64::sqrt)).collect::<Result<_>>()?;
        let m = rho.matrix();
        let out = ComplexMatrix::from_fn(n, n, |i, j| {
            m[(i, j)] * (amp[i] * amp[j] * self.damping(labels[i], labels[j]))
        });
        let herald = out.trace().re;
        if herald <= 0.0 {
            return Err(Error::InvalidParameter("channel transmits nothing".into()));
        }
        let state = DensityMatrix::new_unchecked(out.scale_re(1.0 / herald), rho.dims());
        Ok(ChannelOutput { state, herald })
    }

    /// Readout visibility of `|psi_+(l)>` analysed against `|psi_±(l)>`.
    pub fn superposition_visibility(&self, l: i32) -> Result<f64> {
        let plus = superposition_state(l, Sign::Plus)?;
        let minus = superposition_state(l, Sign::Minus)?;
        let out = self.apply_single(&plus.projector(), &plus.single_labels())?;
        visibility(out.state.probability(plus.amplitudes()), out.state.probability(minus.amplitudes()))
    }
}

/// `(P+ - P-)/(P+ + P-)`.
pub fn visibility(p_plus: f64, p_minus: f64) -> Result<f64> {
    let s = p_plus + p_minus;
    if !(s > 0.0) {
        return Err(Error::InvalidParameter("visibility of zero probabilities".into()));
    }
    Ok((p_plus - p_minus) / s)
}

/// Phase jitter that gives visibility `v` for `|psi_+(l)>`: `e^{-2 l² σ²} = v`.
pub fn calibrate_phase_jitter(v: f64, l: i32) -> Result<f64> {
    if !(v > 0.0 && v <= 1.0) || l == 0 {
        return Err(Error::InvalidParameter(format!("cannot calibrate to V = {v} at l = {l}")));
    }
    Ok((-v.ln() / (2.0 * (l as f64).powi(2))).sqrt())
}
