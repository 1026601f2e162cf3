//! Comb absorption profiles and their minimum-phase transfer functions.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest FFT grid the automatic sizing will produce.
const MAX_GRID: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToothShape {
    Square,
    Gaussian,
    Lorentzian,
}

/// FFT-ordered frequency grid: `f_k = k df` for `k < n/2`, `(k - n) df` after.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub n: usize,
    pub df: f64,
}

impl FrequencyGrid {
    pub fn frequency(&self, k: usize) -> f64 {
        if k < self.n / 2 {
            k as f64 * self.df
        } else {
            (k as f64 - self.n as f64) * self.df
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.frequency(k)).collect()
    }

    /// Time step of the conjugate grid.
    pub fn dt(&self) -> f64 {
        1.0 / (self.n as f64 * self.df)
    }

    /// Total time window.
    pub fn window(&self) -> f64 {
        1.0 / self.df
    }

    pub fn sample_rate(&self) -> f64 {
        self.n as f64 * self.df
    }
}

/// Periodic absorption comb in optical-depth units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombProfile {
    /// Tooth spacing Δ (Hz).
    pub spacing: f64,
    /// Δ / tooth FWHM.
    pub finesse: f64,
    /// Peak optical depth of a tooth.
    pub peak_depth: f64,
    /// Background optical depth, present at every frequency.
    pub background_depth: f64,
    /// Total comb bandwidth (Hz).
    pub bandwidth: f64,
    pub shape: ToothShape,
    pub grid: FrequencyGrid,
}

/// Builds a comb on an automatically sized grid: `df = Δ / 2^k` with at
/// least `20 F` samples per tooth period and a sample rate of at least `4 B`.
pub fn build_comb(
    spacing: f64,
    finesse: f64,
    peak_depth: f64,
    background_depth: f64,
    bandwidth: f64,
    shape: ToothShape,
) -> Result<CombProfile> {
    check_params(spacing, finesse, peak_depth, background_depth, bandwidth)?;
    let per_period = ((20.0 * finesse).ceil() as usize).next_power_of_two();
    let df = spacing / per_period as f64;
    let n = ((4.0 * bandwidth / df).ceil() as usize).next_power_of_two().max(4 * per_period);
    if n > MAX_GRID {
        return Err(Error::InvalidParameter(format!("comb needs a {n}-point grid")));
    }
    Ok(CombProfile {
        spacing,
        finesse,
        peak_depth,
        background_depth,
        bandwidth,
        shape,
        grid: FrequencyGrid { n, df },
    })
}

fn check_params(spacing: f64, finesse: f64, d: f64, d0: f64, bandwidth: f64) -> Result<()> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidParameter(format!("tooth spacing {spacing} must be positive")));
    }
    if !(finesse > 1.0 && finesse.is_finite()) {
        return Err(Error::InvalidParameter(format!("finesse {finesse} must exceed 1")));
    }
    if !(d >= 0.0 && d0 >= 0.0) {
        return Err(Error::InvalidParameter("optical depths must be non-negative".into()));
    }
    if !(bandwidth >= 2.0 * spacing) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth {bandwidth} Hz holds fewer than two teeth of spacing {spacing} Hz"
        )));
    }
    Ok(())
}

impl CombProfile {
    /// Replaces the sampling grid (validated when the transfer function is built).
    pub fn with_grid(mut self, grid: FrequencyGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn tooth_fwhm(&self) -> f64 {
        self.spacing / self.finesse
    }

    /// Storage time 1/Δ.
    pub fn storage_time(&self) -> f64 {
        1.0 / self.spacing
    }

    pub fn tooth_count(&self) -> usize {
        (self.bandwidth / self.spacing * (1.0 + 1e-12)).floor() as usize
    }

    fn tooth_center(&self, j: i64) -> f64 {
        let n = self.tooth_count() as f64;
        (j as f64 - (n - 1.0) / 2.0) * self.spacing
    }

    /// Optical depth α(f), background included.
    ///
    /// Square teeth are averaged over the grid cell around `f` so that
    /// fractional tooth edges are represented without a duty-cycle bias.
    pub fn absorption(&self, f: f64) -> f64 {
        let n = self.tooth_count() as i64;
        let half_band = n as f64 * self.spacing / 2.0;
        let gamma = self.tooth_fwhm();
        let nearest = ((f / self.spacing) + (n as f64 - 1.0) / 2.0).round() as i64;
        let teeth = |reach: i64| (nearest - reach).max(0)..=(nearest + reach).min(n - 1);
        let tooth_sum = match self.shape {
            ToothShape::Square => {
                let df = self.grid.df;
                let (lo, hi) = (f - df / 2.0, f + df / 2.0);
                teeth(1)
                    .map(|j| {
                        let c = self.tooth_center(j);
                        let overlap = (hi.min(c + gamma / 2.0) - lo.max(c - gamma / 2.0)).max(0.0);
                        overlap / df
                    })
                    .sum::<f64>()
            }
            ToothShape::Gaussian => teeth(6)
                .map(|j| {
                    let x = (f - self.tooth_center(j)) / gamma;
                    (-4.0 * LN_2 * x * x).exp()
                })
                .sum(),
            ToothShape::Lorentzian => {
                if f.abs() > half_band {
                    0.0
                } else {
                    // closed-form periodic sum of Lorentzians with HWHM Γ/2
                    let g = gamma / (2.0 * self.spacing);
                    let u = (f - self.tooth_center(0)) / self.spacing;
                    g * PI * (2.0 * PI * g).sinh() / ((2.0 * PI * g).cosh() - (2.0 * PI * u).cos())
                }
            }
        };
        self.background_depth + self.peak_depth * tooth_sum
    }

    /// α sampled on the grid (FFT order).
    pub fn absorption_on_grid(&self) -> Vec<f64> {
        (0..self.grid.n).map(|k| self.absorption(self.grid.frequency(k))).collect()
    }

    /// Comb-averaged optical depth over one period, without background.
    pub fn mean_tooth_depth(&self) -> f64 {
        match self.shape {
            ToothShape::Square => self.peak_depth / self.finesse,
            ToothShape::Gaussian => self.peak_depth / self.finesse * (PI / (4.0 * LN_2)).sqrt(),
            ToothShape::Lorentzian => self.peak_depth * PI / (2.0 * self.finesse),
        }
    }

    pub(crate) fn check_grid(&self) -> Result<()> {
        let limit = self.spacing / (20.0 * self.finesse);
        if self.grid.df > limit * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse(format!(
                "grid spacing {} Hz exceeds Δ/(20F) = {} Hz",
                self.grid.df, limit
            )));
        }
        if self.grid.n < 4 {
            return Err(Error::GridTooCoarse("grid needs at least 4 points".into()));
        }
        Ok(())
    }
}

/// Complex transmission `H = exp(-α/2 + iφ)` sampled on the comb grid,
/// with φ the minimum-phase (causal) partner of `-α/2`.
#[derive(Debug, Clone)]
pub struct TransferFunction {
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
}

impl TransferFunction {
    pub fn phase(&self) -> Vec<f64> {
        self.values.iter().map(|h| h.arg()).collect()
    }
}

pub(crate) struct FftPair {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    /// Unnormalized forward transform, `X_k = Σ x_n e^{-2πikn/N}`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Normalized inverse transform.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let s = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
}

pub fn transfer_function(comb: &CombProfile) -> Result<TransferFunction> {
    comb.check_grid()?;
    let fft = FftPair::new(comb.grid.n);
    Ok(minimum_phase(&comb.absorption_on_grid(), comb.grid, &fft))
}

pub(crate) fn minimum_phase(alpha: &[f64], grid: FrequencyGrid, fft: &FftPair) -> TransferFunction {
    let n = alpha.len();
    // real cepstrum of the log-magnitude, folded onto non-negative times
    let mut c: Vec<Complex64> = alpha.iter().map(|&a| Complex64::new(-0.5 * a, 0.0)).collect();
    fft.inverse(&mut c);
    for (k, z) in c.iter_mut().enumerate() {
        if k == 0 || k == n / 2 {
            continue;
        }
        if k < n / 2 {
            *z *= 2.0;
        } else {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    fft.forward(&mut c);
    let values = c
        .iter()
        .zip(alpha)
        .map(|(z, &a)| Complex64::from_polar((-0.5 * a).exp(), z.im))
        .collect();
    TransferFunction { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_preset_numbers() {
        let comb = build_comb(25e6, 2.0, 3.0, 0.0, 1e9, ToothShape::Square).unwrap();
        assert!((comb.storage_time() - 40e-9).abs() < 1e-20);
        assert_eq!(comb.tooth_count(), 40);
        assert!(comb.grid.df <= comb.spacing / (20.0 * comb.finesse));
        assert!(comb.grid.sample_rate() >= 4.0 * comb.bandwidth);
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_comb(25e6, 1.0, 3.0, 0.0, 1e9, ToothShape::Square).is_err());
        assert!(build_comb(25e6, 2.0, 3.0, 0.0, 40e6, ToothShape::Square).is_err());
        assert!(build_comb(25e6, 2.0, -1.0, 0.0, 1e9, ToothShape::Square).is_err());
    }

    #[test]
    fn square_duty_cycle_matches_finesse() {
        for f in [2.0, 3.0, 5.0, 10.0] {
            let comb = build_comb(25e6, f, 1.0, 0.0, 1e9, ToothShape::Square).unwrap();
            let m = (comb.spacing / comb.grid.df).round() as usize;
            let mean: f64 = (0..m).map(|k| comb.absorption(k as f64 * comb.grid.df)).sum::<f64>() / m as f64;
            assert!((mean - 1.0 / f).abs() < 1e-12, "F={f}: {mean}");
        }
    }

    #[test]
    fn absorbed_fraction_vanishes_at_high_finesse() {
        let mut last = f64::INFINITY;
        for f in [2.0, 10.0, 100.0, 1000.0] {
            let comb = build_comb(25e6, f, 3.0, 0.0, 50e6, ToothShape::Square).unwrap();
            let m = (comb.spacing / comb.grid.df).round() as usize;
            let frac: f64 =
                (0..m).map(|k| 1.0 - (-comb.absorption(k as f64 * comb.grid.df)).exp()).sum::<f64>() / m as f64;
            assert!(frac < last);
            last = frac;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn transparent_and_flat_absorbers() {
        let comb = build_comb(25e6, 2.0, 0.0, 0.0, 1e9, ToothShape::Square).unwrap();
        let h = transfer_function(&comb).unwrap();
        assert!(h.values.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));

        let comb = build_comb(25e6, 2.0, 0.0, 0.7, 1e9, ToothShape::Square).unwrap();
        let h = transfer_function(&comb).unwrap();
        for z in &h.values {
            assert!((z.norm() - (-0.35f64).exp()).abs() < 1e-12);
            assert!(z.arg().abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_comb_gives_periodic_transfer() {
        for shape in [ToothShape::Square, ToothShape::Gaussian, ToothShape::Lorentzian] {
            let comb = build_comb(25e6, 3.0, 2.0, 0.1, 1e9, shape).unwrap();
            // teeth extend beyond the sampled band: α is exactly periodic on the circle
            let wide = CombProfile { bandwidth: 4.0 * comb.grid.sample_rate(), ..comb.clone() };
            let h = transfer_function(&wide).unwrap();
            let m = (wide.spacing / wide.grid.df).round() as usize;
            let n = wide.grid.n;
            for k in 0..n {
                let d = (h.values[k] - h.values[(k + m) % n]).norm();
                assert!(d < 1e-6, "{shape:?} k={k}: {d}");
            }
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let comb = build_comb(25e6, 2.0, 3.0, 0.0, 1e9, ToothShape::Square).unwrap();
        let coarse = comb.with_grid(FrequencyGrid { n: 1024, df: 25e6 / 8.0 });
        assert!(matches!(transfer_function(&coarse), Err(Error::GridTooCoarse(_))));
    }
}
