//! Pulse propagation through the comb and the echo efficiency.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::comb::{minimum_phase, CombProfile, FftPair, FrequencyGrid, ToothShape};
use crate::error::{Error, Result};

/// Time-bandwidth product of a Gaussian intensity profile.
const GAUSSIAN_TBP: f64 = 2.0 * LN_2 / PI;

/// Complex envelope on the time grid conjugate to a comb's frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalPulse {
    /// Carrier offset from the comb centre (Hz).
    pub center_offset: f64,
    /// Intensity FWHM (s).
    pub duration: f64,
    pub grid: FrequencyGrid,
    /// Samples `a_t` at `t = k dt`, normalized to `Σ |a_t|² dt = 1`.
    pub samples: Vec<Complex64>,
}

impl OpticalPulse {
    /// Gaussian pulse centred at `center_time` on the grid's time axis.
    pub fn gaussian(duration: f64, center_offset: f64, center_time: f64, grid: FrequencyGrid) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::InvalidParameter(format!("pulse duration {duration} must be positive")));
        }
        let dt = grid.dt();
        let mut samples: Vec<Complex64> = (0..grid.n)
            .map(|k| {
                let t = k as f64 * dt;
                let x = (t - center_time) / duration;
                Complex64::from_polar((-2.0 * LN_2 * x * x).exp(), 2.0 * PI * center_offset * t)
            })
            .collect();
        let energy: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * dt;
        if energy == 0.0 {
            return Err(Error::InvalidParameter("pulse has no support on the grid".into()));
        }
        let s = 1.0 / energy.sqrt();
        samples.iter_mut().for_each(|z| *z *= s);
        Ok(Self { center_offset, duration, grid, samples })
    }

    /// Gaussian pulse placed early in the window, clear of wrap-around.
    pub fn gaussian_for(comb: &CombProfile, duration: f64, center_offset: f64) -> Result<Self> {
        Self::gaussian(duration, center_offset, default_center_time(duration), comb.grid)
    }

    /// Spectral intensity FWHM of a Gaussian pulse.
    pub fn bandwidth(&self) -> f64 {
        GAUSSIAN_TBP / self.duration
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples, self.grid.dt())
    }

    pub fn centroid(&self) -> f64 {
        let p: Vec<f64> = self.samples.iter().map(|z| z.norm_sqr()).collect();
        intensity_centroid(&p, self.grid.dt(), 0, p.len())
    }
}

fn default_center_time(duration: f64) -> f64 {
    5.0 * duration
}

fn energy(s: &[Complex64], dt: f64) -> f64 {
    s.iter().map(|z| z.norm_sqr()).sum::<f64>() * dt
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EchoResult {
    pub dt: f64,
    pub output: Vec<Complex64>,
    /// Energy of the first echo relative to the (unit) input energy.
    pub efficiency: f64,
    /// Echo centroid minus transmitted-pulse centroid (s).
    pub echo_time: f64,
    /// First-echo window, absolute times (s).
    pub window: (f64, f64),
    pub input_centroid: f64,
    pub transmitted_centroid: f64,
    pub output_energy: f64,
}

impl EchoResult {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.output.len()).map(move |k| k as f64 * self.dt)
    }
}

/// Half-width of the first-echo window: at least `1/(2B)`, widened to four
/// pulse durations, and never past the midpoint to a neighbouring echo.
pub fn echo_window_half_width(comb: &CombProfile, pulse_duration: f64) -> f64 {
    (1.0 / (2.0 * comb.bandwidth)).max(4.0 * pulse_duration).min(0.5 / comb.spacing)
}

/// Filters the pulse through the comb and integrates the first echo.
pub fn propagate_echo(pulse: &OpticalPulse, comb: &CombProfile) -> Result<EchoResult> {
    if pulse.grid != comb.grid {
        return Err(Error::DimensionMismatch("pulse and comb grids differ".into()));
    }
    if pulse.bandwidth() > 0.8 * comb.bandwidth {
        return Err(Error::InvalidParameter(format!(
            "pulse bandwidth {:e} Hz exceeds 0.8 of the comb bandwidth",
            pulse.bandwidth()
        )));
    }
    if pulse.duration < 5.0 / comb.bandwidth {
        return Err(Error::InvalidParameter(format!(
            "pulse duration {:e} s is shorter than 5/B",
            pulse.duration
        )));
    }
    let fft = FftPair::new(comb.grid.n);
    comb.check_grid()?;
    let h = minimum_phase(&comb.absorption_on_grid(), comb.grid, &fft);
    let mut buf = pulse.samples.clone();
    fft.forward(&mut buf);
    buf.iter_mut().zip(&h.values).for_each(|(x, h)| *x *= h);
    fft.inverse(&mut buf);

    let dt = comb.grid.dt();
    let input_centroid = pulse.centroid();
    let half = echo_window_half_width(comb, pulse.duration);
    let intensity: Vec<f64> = buf.iter().map(|z| z.norm_sqr()).collect();
    let m = measure_echo(&intensity, dt, input_centroid, half, comb.storage_time())?;
    Ok(EchoResult {
        dt,
        output: buf,
        efficiency: m.efficiency,
        echo_time: m.echo_time,
        window: m.window,
        input_centroid,
        transmitted_centroid: m.transmitted_centroid,
        output_energy: m.output_energy,
    })
}

/// Window integrals of an output intensity trace `|a_k|²` sampled at `k dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoMeasurement {
    pub efficiency: f64,
    pub echo_time: f64,
    pub window: (f64, f64),
    pub transmitted_centroid: f64,
    pub output_energy: f64,
}

fn window_indices(center: f64, half: f64, dt: f64, len: usize) -> (usize, usize) {
    let lo = ((center - half) / dt).ceil().max(0.0) as usize;
    let hi = (((center + half) / dt).floor().max(-1.0) + 1.0) as usize;
    (lo, hi.min(len))
}

fn intensity_centroid(p: &[f64], dt: f64, lo: usize, hi: usize) -> f64 {
    let (mut w, mut tw) = (0.0, 0.0);
    for (k, &x) in p.iter().enumerate().take(hi).skip(lo) {
        w += x;
        tw += x * k as f64 * dt;
    }
    if w == 0.0 {
        f64::NAN
    } else {
        tw / w
    }
}

/// Integrates the first echo in `input_centroid + storage_time ± half` and
/// times it against the transmitted pulse in `input_centroid ± half`.
pub fn measure_echo(
    intensity: &[f64],
    dt: f64,
    input_centroid: f64,
    half: f64,
    storage_time: f64,
) -> Result<EchoMeasurement> {
    let center = input_centroid + storage_time;
    let (lo, hi) = window_indices(center, half, dt, intensity.len());
    if lo >= hi {
        return Err(Error::InvalidParameter("echo window falls outside the time grid".into()));
    }
    let efficiency = intensity[lo..hi].iter().sum::<f64>() * dt;
    // The band edges shift both output pulses by a common group delay, so the
    // storage time is read off against the transmitted pulse when there is one.
    let (tlo, thi) = window_indices(input_centroid, half, dt, intensity.len());
    let transmitted = intensity_centroid(intensity, dt, tlo, thi);
    let reference = if transmitted.is_finite() { transmitted } else { input_centroid };
    let echo_time = intensity_centroid(intensity, dt, lo, hi) - reference;
    let output_energy = intensity.iter().sum::<f64>() * dt;
    Ok(EchoMeasurement {
        efficiency,
        echo_time,
        window: (center - half, center + half),
        transmitted_centroid: transmitted,
        output_energy,
    })
}

/// Closed-form first-echo efficiency.
///
/// Square teeth: `(d/F)² e^{-d/F} sinc²(π/F) e^{-d0}`.
/// Gaussian teeth: `d̃² e^{-d̃} e^{-7/F²} e^{-d0}`, `d̃ = (d/F) sqrt(π/(4 ln 2))`.
/// Lorentzian teeth: `d̃² e^{-d̃} e^{-2π/F} e^{-d0}`, `d̃ = π d/(2F)`.
pub fn analytic_efficiency(finesse: f64, depth: f64, background: f64, shape: ToothShape) -> Result<f64> {
    if !(finesse > 1.0) {
        return Err(Error::InvalidParameter(format!("finesse {finesse} must exceed 1")));
    }
    let bg = (-background).exp();
    Ok(match shape {
        ToothShape::Square => {
            let x = depth / finesse;
            let arg = PI / finesse;
            let sinc = arg.sin() / arg;
            x * x * (-x).exp() * sinc * sinc * bg
        }
        ToothShape::Gaussian => {
            let x = depth / finesse * (PI / (4.0 * LN_2)).sqrt();
            x * x * (-x).exp() * (-7.0 / (finesse * finesse)).exp() * bg
        }
        ToothShape::Lorentzian => {
            let x = PI * depth / (2.0 * finesse);
            x * x * (-x).exp() * (-2.0 * PI / finesse).exp() * bg
        }
    })
}
