//! Schema checks on raw config JSON, reported with JSON-pointer locations.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{ExperimentConfig, Pipeline, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub level: Level,
    /// JSON pointer into the config (`""` for the document root).
    pub path: String,
    pub message: String,
}

impl Finding {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { level: Level::Error, path: path.into(), message: message.into() }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { level: Level::Warning, path: path.into(), message: message.into() }
    }
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let level = match self.level {
            Level::Warning => "warning",
            Level::Error => "error",
        };
        let path = if self.path.is_empty() { "/" } else { &self.path };
        write!(f, "{level} at {path}: {}", self.message)
    }
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.level == Level::Error)
}

struct Checker<'a> {
    root: &'a Value,
    findings: Vec<Finding>,
}

#[derive(Clone, Copy)]
enum Range {
    /// `[lo, hi]`
    Closed(f64, f64),
    /// `(lo, hi]`
    LeftOpen(f64, f64),
    /// `(lo, inf)`
    Above(f64),
    /// `[lo, inf)`
    AtLeast(f64),
}

impl Range {
    fn contains(self, x: f64) -> bool {
        match self {
            Self::Closed(lo, hi) => (lo..=hi).contains(&x),
            Self::LeftOpen(lo, hi) => x > lo && x <= hi,
            Self::Above(lo) => x > lo && x.is_finite(),
            Self::AtLeast(lo) => x >= lo && x.is_finite(),
        }
    }

    fn describe(self) -> String {
        match self {
            Self::Closed(lo, hi) => format!("[{lo}, {hi}]"),
            Self::LeftOpen(lo, hi) => format!("({lo}, {hi}]"),
            Self::Above(lo) => format!("> {lo}"),
            Self::AtLeast(lo) => format!(">= {lo}"),
        }
    }
}

impl<'a> Checker<'a> {
    fn get(&self, pointer: &str) -> Option<&'a Value> {
        self.root.pointer(pointer).filter(|v| !v.is_null())
    }

    fn error(&mut self, path: &str, message: impl Into<String>) {
        self.findings.push(Finding::error(path, message));
    }

    fn number(&mut self, pointer: &str, range: Range) {
        let Some(v) = self.get(pointer) else { return };
        match v.as_f64() {
            Some(x) if range.contains(x) => {}
            Some(x) => self.error(pointer, format!("value {x} out of range, expected {}", range.describe())),
            None => self.error(pointer, "expected a number"),
        }
    }

    fn required_number(&mut self, pointer: &str, range: Range) {
        if self.get(pointer).is_none() {
            self.error(pointer, "required field missing");
        } else {
            self.number(pointer, range);
        }
    }

    fn integer(&mut self, pointer: &str, min: i64) {
        let Some(v) = self.get(pointer) else { return };
        match v.as_i64().or_else(|| v.as_u64().map(|_| i64::MAX)) {
            Some(x) if x >= min => {}
            Some(x) => self.error(pointer, format!("value {x} out of range, expected >= {min}")),
            None => self.error(pointer, "expected an integer"),
        }
    }
}

/// All findings for a config document. An empty list means the document
/// deserializes and every checked value is in range.
pub fn validate_value(root: &Value) -> Vec<Finding> {
    let mut c = Checker { root, findings: Vec::new() };
    if !root.is_object() {
        c.error("", "config must be a JSON object");
        return c.findings;
    }

    match c.get("/schema_version") {
        None => c.error("/schema_version", "required field missing"),
        Some(v) if v.as_u64() != Some(SCHEMA_VERSION as u64) => {
            c.error("/schema_version", format!("unsupported schema version {v}, expected {SCHEMA_VERSION}"))
        }
        _ => {}
    }
    match c.get("/seed") {
        None => c.error("/seed", "required field missing: runs must be seeded"),
        Some(v) if v.as_u64().is_none() => c.error("/seed", "seed must be an unsigned 64-bit integer"),
        _ => {}
    }
    let pipeline = match c.get("/pipeline") {
        None => {
            c.error("/pipeline", "required field missing");
            None
        }
        Some(v) => match serde_json::from_value::<Pipeline>(v.clone()) {
            Ok(p) => Some(p),
            Err(_) => {
                let names: Vec<&str> = Pipeline::ALL.iter().map(|p| p.name()).collect();
                c.error("/pipeline", format!("unknown pipeline {v}, expected one of {}", names.join(", ")));
                None
            }
        },
    };
    if let Some(p) = pipeline {
        for section in p.required_sections() {
            if c.get(&format!("/{section}")).is_none() {
                c.error(&format!("/{section}"), format!("section required by pipeline {}", p.name()));
            }
        }
    }

    c.integer("/exposure", 1);
    c.number("/background", Range::AtLeast(0.0));

    if let Some(amps) = c.get("/source/c") {
        let norm: Option<f64> = amps.as_array().filter(|a| a.len() == 3).and_then(|a| {
            a.iter()
                .map(|z| {
                    let pair = z.as_array().filter(|p| p.len() == 2)?;
                    Some(pair[0].as_f64()?.powi(2) + pair[1].as_f64()?.powi(2))
                })
                .sum()
        });
        match norm {
            None => c.error("/source/c", "expected three [re, im] amplitudes"),
            Some(n) if !(n > 0.0 && n.is_finite()) => c.error("/source/c", "amplitudes must not all vanish"),
            _ => {}
        }
    }
    c.number("/source/noise/v", Range::Closed(0.0, 1.0));
    for k in 0..3 {
        c.number(&format!("/source/noise/coherence/{k}"), Range::Closed(0.0, 1.0));
    }

    match c.get("/channel/efficiency") {
        Some(Value::Object(table)) => {
            for (key, _) in table {
                if key.parse::<i32>().is_err() {
                    c.error(&format!("/channel/efficiency/{key}"), "mode keys must be integers");
                } else {
                    c.number(&format!("/channel/efficiency/{key}"), Range::Closed(0.0, 1.0));
                }
            }
        }
        Some(_) => c.number("/channel/efficiency", Range::Closed(0.0, 1.0)),
        None => {}
    }
    c.number("/channel/phase_jitter", Range::AtLeast(0.0));
    c.number("/channel/calibrate/visibility", Range::LeftOpen(0.0, 1.0));
    c.integer("/channel/calibrate/l", 1);
    if c.get("/channel/phase_jitter").is_some() && c.get("/channel/calibrate").is_some() {
        c.error("/channel/calibrate", "give either phase_jitter or calibrate, not both");
    }

    if c.get("/comb").is_some() {
        c.required_number("/comb/spacing", Range::Above(0.0));
        c.required_number("/comb/finesse", Range::Above(1.0));
        c.required_number("/comb/peak_depth", Range::AtLeast(0.0));
        c.required_number("/comb/bandwidth", Range::Above(0.0));
        c.number("/comb/background_depth", Range::AtLeast(0.0));
        if let (Some(b), Some(s)) = (
            c.get("/comb/bandwidth").and_then(Value::as_f64),
            c.get("/comb/spacing").and_then(Value::as_f64),
        ) {
            if b < 2.0 * s {
                c.error("/comb/bandwidth", "bandwidth must span at least two teeth");
            }
        }
    }
    if c.get("/pump").is_some() {
        c.required_number("/pump/waist", Range::Above(0.0));
        c.required_number("/pump/saturation", Range::AtLeast(0.0));
        c.required_number("/pump/max_depth", Range::AtLeast(0.0));
        c.integer("/pump/shape/order", 2);
    }
    c.number("/pulse/duration", Range::Above(0.0));
    c.number("/analyzer/depolarizing", Range::Closed(0.0, 1.0));
    c.number("/analyzer/phase_jitter", Range::AtLeast(0.0));
    c.integer("/bell/restarts", 1);
    c.integer("/bell/exposure", 1);
    c.number("/scan/mode_waist", Range::Above(0.0));
    c.integer("/scan/l_min", 0);
    c.integer("/scan/l_max", 0);
    if let (Some(lo), Some(hi)) =
        (c.get("/scan/l_min").and_then(Value::as_i64), c.get("/scan/l_max").and_then(Value::as_i64))
    {
        if lo > hi {
            c.error("/scan/l_max", format!("l_max {hi} is below l_min {lo}"));
        }
    }
    if c.get("/mle").is_some() {
        c.integer("/mle/max_iterations", 1);
        c.required_number("/mle/tolerance", Range::AtLeast(0.0));
        c.required_number("/mle/initial_step", Range::Above(0.0));
    }
    c.number("/capacity/spectral_mode_bandwidth", Range::Above(0.0));
    c.integer("/capacity/spatial_modes", 1);
    if let Some(Value::Object(refs)) = c.get("/reference") {
        for key in refs.keys() {
            c.number(&format!("/reference/{key}"), Range::AtLeast(f64::MIN));
        }
    }
    c.number("/reference_tolerance", Range::Above(0.0));

    // Anything the targeted checks missed (unknown fields, wrong types)
    // surfaces as a deserialization finding.
    if !has_errors(&c.findings) {
        if let Err(e) = serde_json::from_value::<ExperimentConfig>(root.clone()) {
            c.error("", e.to_string());
        }
    }
    c.findings
}

/// Parses and validates config text.
pub fn validate_text(text: &str) -> Vec<Finding> {
    match serde_json::from_str::<Value>(text) {
        Ok(v) => validate_value(&v),
        Err(e) => vec![Finding::error("", format!("malformed JSON: {e}"))],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "schema_version": 1,
            "pipeline": "state-tomo",
            "seed": 7,
            "exposure": 1000,
            "source": {"c": [[0.57735, 0.0], [-0.57735, 0.0], [0.57735, 0.0]], "noise": {"v": 0.1}}
        })
    }

    #[test]
    fn clean_config_has_no_findings() {
        assert_eq!(validate_value(&base()), vec![]);
    }

    #[test]
    fn missing_seed_is_reported_at_seed() {
        let mut v = base();
        v.as_object_mut().unwrap().remove("seed");
        let f = validate_value(&v);
        assert!(f.iter().any(|f| f.path == "/seed" && f.level == Level::Error), "{f:?}");
    }

    #[test]
    fn noise_out_of_range() {
        let mut v = base();
        v["source"]["noise"]["v"] = json!(1.3);
        let f = validate_value(&v);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].path, "/source/noise/v");
    }

    #[test]
    fn missing_section_for_pipeline() {
        let mut v = base();
        v["pipeline"] = json!("afc-echo");
        let f = validate_value(&v);
        assert!(f.iter().any(|f| f.path == "/comb"), "{f:?}");
    }

    #[test]
    fn unknown_field_rejected() {
        let mut v = base();
        v["sede"] = json!(3);
        let f = validate_value(&v);
        assert_eq!(f.len(), 1);
        assert!(f[0].message.contains("sede"), "{}", f[0].message);
    }

    #[test]
    fn malformed_text() {
        let f = validate_text("{\"seed\": ");
        assert!(has_errors(&f));
    }

    #[test]
    fn both_jitter_sources_rejected() {
        let mut v = base();
        v["channel"] = json!({"phase_jitter": 0.01, "calibrate": {"visibility": 0.9, "l": 25}});
        assert!(validate_value(&v).iter().any(|f| f.path == "/channel/calibrate"));
    }
}
