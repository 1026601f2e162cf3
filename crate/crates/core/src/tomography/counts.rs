//! Coincidence count tables and their CSV form.

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TomoMode {
    /// 81 product settings `k_i ⊗ k_j` on a qutrit pair.
    Bipartite,
    /// 9 single-qutrit settings.
    Single,
}

impl TomoMode {
    pub fn setting_count(self) -> usize {
        match self {
            Self::Bipartite => 81,
            Self::Single => 9,
        }
    }

    /// Setting indices in canonical order (`i` slow).
    pub fn settings(self) -> Vec<(usize, Option<usize>)> {
        match self {
            Self::Bipartite => (0..81).map(|s| (s / 9, Some(s % 9))).collect(),
            Self::Single => (0..9).map(|s| (s, None)).collect(),
        }
    }
}

/// One CSV row. `setting_j` is empty for single-qutrit tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub setting_i: usize,
    pub setting_j: Option<usize>,
    pub counts: u64,
    pub exposure: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub mode: TomoMode,
    pub rows: Vec<CountRow>,
    /// Mean accidental counts per setting added on top of the signal.
    #[serde(default)]
    pub background: f64,
}

impl CountTable {
    pub fn new(mode: TomoMode, rows: Vec<CountRow>, background: f64) -> Result<Self> {
        let t = Self { mode, rows, background };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.mode.settings();
        if self.rows.len() != expected.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} settings",
                self.rows.len(),
                expected.len()
            )));
        }
        for (row, (i, j)) in self.rows.iter().zip(expected) {
            if (row.setting_i, row.setting_j) != (i, j) {
                return Err(Error::Parse(format!(
                    "setting ({}, {:?}) out of order, expected ({i}, {j:?})",
                    row.setting_i, row.setting_j
                )));
            }
            if row.exposure == 0 {
                return Err(Error::InvalidParameter(format!("zero exposure at setting {i}")));
            }
            if self.background == 0.0 && row.counts > row.exposure {
                return Err(Error::InvalidParameter(format!(
                    "{} counts exceed exposure {} at setting {i}",
                    row.counts, row.exposure
                )));
            }
        }
        if !(self.background >= 0.0 && self.background.is_finite()) {
            return Err(Error::InvalidParameter(format!("background {} must be >= 0", self.background)));
        }
        Ok(())
    }

    pub fn counts(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.counts as f64).collect()
    }

    pub fn exposures(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.exposure as f64).collect()
    }

    /// Background-subtracted relative frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| (r.counts as f64 - self.background) / r.exposure as f64).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
        }
        wr.flush().map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a table; the mode follows from the row count.
    pub fn read_csv<R: Read>(r: R, background: f64) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd
            .deserialize::<CountRow>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        let mode = if rows.len() == 9 && rows.iter().all(|r| r.setting_j.is_none()) {
            TomoMode::Single
        } else {
            TomoMode::Bipartite
        };
        Self::new(mode, rows, background)
    }
}

/// Draws counts for the given outcome probabilities: the signal is binomial
/// over `exposure` trials (mean `exposure · p`), accidentals are Poisson.
pub fn sample_counts<R: Rng + ?Sized>(
    probabilities: &[f64],
    exposure: u64,
    background: f64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if exposure == 0 {
        return Err(Error::InvalidParameter("exposure must be positive".into()));
    }
    if !(background >= 0.0 && background.is_finite()) {
        return Err(Error::InvalidParameter(format!("background {background} must be >= 0")));
    }
    let accidentals = if background > 0.0 {
        Some(Poisson::new(background).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    probabilities
        .iter()
        .map(|&p| {
            let p = p.clamp(0.0, 1.0);
            let signal = Binomial::new(exposure, p).map_err(|e| Error::InvalidParameter(e.to_string()))?.sample(rng);
            let extra = accidentals.as_ref().map_or(0, |d| d.sample(rng) as u64);
            Ok(signal + extra)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn table(mode: TomoMode) -> CountTable {
        let rows = mode
            .settings()
            .into_iter()
            .enumerate()
            .map(|(k, (i, j))| CountRow { setting_i: i, setting_j: j, counts: k as u64, exposure: 100 })
            .collect();
        CountTable::new(mode, rows, 0.0).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        for mode in [TomoMode::Bipartite, TomoMode::Single] {
            let t = table(mode);
            let mut buf = Vec::new();
            t.write_csv(&mut buf).unwrap();
            let text = String::from_utf8(buf.clone()).unwrap();
            assert!(text.starts_with("setting_i,setting_j,counts,exposure\n"));
            assert_eq!(CountTable::read_csv(buf.as_slice(), 0.0).unwrap(), t);
        }
    }

    #[test]
    fn invalid_tables_rejected() {
        let mut t = table(TomoMode::Single);
        t.rows[3].counts = 101;
        assert!(t.validate().is_err());
        let mut t = table(TomoMode::Bipartite);
        t.rows.swap(0, 1);
        assert!(t.validate().is_err());
        let mut t = table(TomoMode::Single);
        t.rows.pop();
        assert!(t.validate().is_err());
        assert!(CountTable::read_csv("setting_i,setting_j,counts,exposure\nx,,1,2\n".as_bytes(), 0.0).is_err());
    }

    #[test]
    fn sampling_edge_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let c = sample_counts(&[1.0, 0.0], 1000, 0.0, &mut rng).unwrap();
        assert_eq!(c, vec![1000, 0]);
        assert!(sample_counts(&[0.5], 0, 0.0, &mut rng).is_err());
    }
}
