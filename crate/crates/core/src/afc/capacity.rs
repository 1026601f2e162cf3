//! Multiplexing capacity of the comb.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guards `floor` against ratios like 1e9/12.5e6 landing a hair below 80.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeCapacity {
    pub temporal: u64,
    pub spectral: u64,
    pub spatial: u64,
    /// Larger of the temporal and spectral counts times the spatial count.
    pub total: u64,
}

fn ratio_floor(num: f64, den: f64) -> u64 {
    let r = num / den;
    (r * (1.0 + FLOOR_SLACK)).floor() as u64
}

pub fn multimode_capacity(bandwidth: f64, tooth_fwhm: f64, spectral_mode_bandwidth: f64, spatial: u64) -> Result<ModeCapacity> {
    for (name, v) in [("bandwidth", bandwidth), ("tooth FWHM", tooth_fwhm), ("spectral mode bandwidth", spectral_mode_bandwidth)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} {v} must be positive")));
        }
    }
    if spatial == 0 {
        return Err(Error::InvalidParameter("spatial mode count must be positive".into()));
    }
    let temporal = ratio_floor(bandwidth, tooth_fwhm);
    let spectral = ratio_floor(bandwidth, spectral_mode_bandwidth);
    Ok(ModeCapacity { temporal, spectral, spatial, total: temporal.max(spectral) * spatial })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_capacity() {
        let c = multimode_capacity(1e9, 25e6 / 2.0, 100e6, 51).unwrap();
        assert_eq!(c.temporal, 80);
        assert_eq!(c.spectral, 10);
        assert_eq!(c.spatial, 51);
        assert_eq!(c.total, 80 * 51);
    }

    #[test]
    fn temporal_dominates_for_narrow_teeth() {
        for (tooth, mode) in [(1e6, 1e6), (5e6, 7e6), (12.5e6, 1e8)] {
            let c = multimode_capacity(1e9, tooth, mode, 1).unwrap();
            assert!(c.temporal >= c.spectral);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(multimode_capacity(0.0, 1.0, 1.0, 1).is_err());
        assert!(multimode_capacity(1.0, 1.0, 1.0, 0).is_err());
        assert!(multimode_capacity(1.0, f64::NAN, 1.0, 1).is_err());
    }
}
