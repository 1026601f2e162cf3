//! Transverse comb preparation and per-OAM-mode storage efficiency.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::comb::ToothShape;
use super::echo::analytic_efficiency;
use crate::error::{Error, Result};
use crate::numerics::adaptive_simpson;
use crate::source::{lg_intensity_unchecked, LgProfile};

const QUAD_REL_TOL: f64 = 1e-8;
const QUAD_PANELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PumpShape {
    Gaussian,
    SuperGaussian { order: u32 },
}

/// Transverse profile of the comb-preparation light.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpProfile {
    pub shape: PumpShape,
    /// Beam waist (mm).
    pub waist: f64,
    /// Peak pumping strength s0.
    pub saturation: f64,
    /// Comb depth reached under full saturation.
    pub max_depth: f64,
}

impl PumpProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.saturation >= 0.0) {
            return Err(Error::InvalidParameter(format!("saturation {} must be >= 0", self.saturation)));
        }
        if !(self.waist > 0.0) {
            return Err(Error::InvalidParameter(format!("pump waist {} must be positive", self.waist)));
        }
        if !(self.max_depth >= 0.0) {
            return Err(Error::InvalidParameter("max depth must be >= 0".into()));
        }
        if let PumpShape::SuperGaussian { order } = self.shape {
            if order < 2 {
                return Err(Error::InvalidParameter(format!("super-Gaussian order {order} < 2")));
            }
        }
        Ok(())
    }

    /// Normalized pump intensity g(r), g(0) = 1.
    pub fn shape_at(&self, r: f64) -> f64 {
        let x = r * r / (self.waist * self.waist);
        match self.shape {
            PumpShape::Gaussian => (-2.0 * x).exp(),
            PumpShape::SuperGaussian { order } => (-2.0 * x.powi(order as i32)).exp(),
        }
    }
}

/// Prepared comb depth `d(r) = d_max (1 - e^{-s0 g(r)})`.
pub fn prepared_depth_map(pump: &PumpProfile, r: f64) -> f64 {
    pump.max_depth * (1.0 - (-pump.saturation * pump.shape_at(r)).exp())
}

/// Tooth parameters shared by every transverse position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToothParams {
    pub finesse: f64,
    pub background_depth: f64,
    pub shape: ToothShape,
}

/// Intensity-weighted comb depth seen by an LG mode, `∫ I_l(r) d(r) 2πr dr`.
pub fn effective_depth(pump: &PumpProfile, lg: &LgProfile) -> Result<f64> {
    pump.validate()?;
    if lg.p != 0 {
        return Err(Error::InvalidParameter(format!("radial index p = {} unsupported", lg.p)));
    }
    if !(lg.waist > 0.0) {
        return Err(Error::InvalidParameter("mode waist must be positive".into()));
    }
    // Mode intensity beyond peak + 8 w0 is below e^-100 of its peak for l <= 25.
    let upper = lg.peak_radius() + 8.0 * lg.waist;
    adaptive_simpson(
        |r| lg_intensity_unchecked(lg.l, lg.waist, r) * prepared_depth_map(pump, r) * 2.0 * PI * r,
        0.0,
        upper,
        QUAD_REL_TOL,
        QUAD_PANELS,
    )
}

/// Storage efficiency of one OAM mode: the closed-form echo efficiency at the
/// mode's effective depth.
pub fn mode_efficiency(pump: &PumpProfile, teeth: &ToothParams, lg: &LgProfile) -> Result<f64> {
    let d_eff = effective_depth(pump, lg)?;
    analytic_efficiency(teeth.finesse, d_eff, teeth.background_depth, teeth.shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pump(shape: PumpShape, saturation: f64) -> PumpProfile {
        PumpProfile { shape, waist: 1.0, saturation, max_depth: 3.0 }
    }

    #[test]
    fn depth_map_limits() {
        let p = pump(PumpShape::Gaussian, 0.0);
        assert_eq!(prepared_depth_map(&p, 0.3), 0.0);
        let p = pump(PumpShape::Gaussian, 1e6);
        assert!((prepared_depth_map(&p, 0.5) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn super_gaussian_is_flatter() {
        let g = pump(PumpShape::Gaussian, 1.0);
        let sg = pump(PumpShape::SuperGaussian { order: 4 }, 1.0);
        let ratio = |p: &PumpProfile| prepared_depth_map(p, 0.5) / prepared_depth_map(p, 0.0);
        assert!(ratio(&sg) > ratio(&g));
        assert!(pump(PumpShape::SuperGaussian { order: 1 }, 1.0).validate().is_err());
    }

    #[test]
    fn saturated_pump_balances_modes() {
        let p = PumpProfile { shape: PumpShape::SuperGaussian { order: 4 }, waist: 1.0, saturation: 1e4, max_depth: 3.0 };
        let teeth = ToothParams { finesse: 2.0, background_depth: 0.0, shape: ToothShape::Square };
        let etas: Vec<f64> =
            (0..=25).map(|l| mode_efficiency(&p, &teeth, &LgProfile::new(l, 0.1)).unwrap()).collect();
        let (lo, hi) = etas.iter().fold((f64::MAX, f64::MIN), |(a, b), &e| (a.min(e), b.max(e)));
        assert!(hi - lo < 1e-3, "{etas:?}");
    }

    #[test]
    fn gaussian_pump_efficiency_falls_with_l() {
        let w0 = 0.1;
        let r25 = LgProfile::new(25, w0).peak_radius();
        let p = PumpProfile { shape: PumpShape::Gaussian, waist: r25, saturation: 2.0, max_depth: 3.0 };
        let teeth = ToothParams { finesse: 2.0, background_depth: 0.0, shape: ToothShape::Square };
        let etas: Vec<f64> =
            (0..=25).map(|l| mode_efficiency(&p, &teeth, &LgProfile::new(l, w0)).unwrap()).collect();
        assert!(etas[1..].windows(2).all(|w| w[1] < w[0]), "{etas:?}");
    }

    #[test]
    fn narrow_mode_sees_central_depth() {
        let p = pump(PumpShape::Gaussian, 2.0);
        let d = effective_depth(&p, &LgProfile::new(0, 1e-3)).unwrap();
        assert!((d - prepared_depth_map(&p, 0.0)).abs() < 1e-5);
    }
}
