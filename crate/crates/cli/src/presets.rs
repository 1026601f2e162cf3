//! Shipped configurations.

use crate::config::ExperimentConfig;
use crate::error::CliResult;

pub struct Preset {
    pub name: &'static str,
    pub json: &'static str,
}

pub const PRESETS: [Preset; 6] = [
    Preset { name: "table1", json: include_str!("../presets/table1.json") },
    Preset { name: "fig2", json: include_str!("../presets/fig2.json") },
    Preset { name: "fig3b", json: include_str!("../presets/fig3b.json") },
    Preset { name: "fig3c", json: include_str!("../presets/fig3c.json") },
    Preset { name: "afc", json: include_str!("../presets/afc.json") },
    Preset { name: "capacity", json: include_str!("../presets/capacity.json") },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    pub fn config(&self) -> CliResult<ExperimentConfig> {
        ExperimentConfig::from_json(self.json)
    }

    pub fn description(&self) -> String {
        self.config().ok().and_then(|c| c.description).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_text;

    #[test]
    fn presets_validate_cleanly() {
        for p in &PRESETS {
            assert_eq!(validate_text(p.json), vec![], "{}", p.name);
            assert!(!p.description().is_empty(), "{}", p.name);
        }
    }
}
