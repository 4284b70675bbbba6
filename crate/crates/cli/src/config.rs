//! Scenario configuration: JSON documents and flag overrides.

use std::path::Path;

use serde::Deserialize;

use qelim::solvers::ScenarioKind;
use qelim::QelimError;

/// An angle given either as radians or as a `piOverN` string (`piOver8`
/// is π/8); the string form represents the special angles exactly.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Text(String),
}

pub fn parse_angle(s: &str) -> Result<f64, QelimError> {
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    if s == "pi" {
        return Ok(std::f64::consts::PI);
    }
    if let Some(rest) = s.strip_prefix("piOver") {
        let d: f64 = rest
            .parse()
            .map_err(|_| QelimError::InvalidParameter(format!("bad angle '{s}'")))?;
        if d == 0.0 {
            return Err(QelimError::InvalidParameter(
                "piOver0 is not an angle".into(),
            ));
        }
        return Ok(std::f64::consts::PI / d);
    }
    Err(QelimError::InvalidParameter(format!(
        "bad angle '{s}': expected radians or piOverN"
    )))
}

impl AngleValue {
    pub fn resolve(&self) -> Result<f64, QelimError> {
        match self {
            AngleValue::Radians(v) => Ok(*v),
            AngleValue::Text(s) => parse_angle(s),
        }
    }
}

fn default_big_n() -> usize {
    2
}

fn default_seed() -> u64 {
    7
}

fn default_shots() -> u64 {
    100_000
}

/// The JSON configuration document accepted by `--config`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default)]
    pub theta: Option<AngleValue>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_big_n")]
    pub big_n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_shots")]
    pub shots: u64,
}

/// Fully resolved run parameters after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub kind: ScenarioKind,
    pub theta: Option<f64>,
    pub n: Option<usize>,
    pub big_n: usize,
    pub seed: u64,
    pub shots: u64,
}

pub struct Overrides<'a> {
    pub scenario: Option<&'a str>,
    pub theta: Option<&'a str>,
    pub n: Option<usize>,
    pub big_n: Option<usize>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
}

/// Loads the optional config file and applies flag overrides; flags win.
pub fn resolve(config_path: Option<&Path>, ov: Overrides<'_>) -> Result<Resolved, QelimError> {
    let file: Option<ScenarioConfig> = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                QelimError::InvalidParameter(format!("cannot read {}: {e}", path.display()))
            })?;
            Some(serde_json::from_str(&text).map_err(|e| {
                QelimError::InvalidParameter(format!("bad config {}: {e}", path.display()))
            })?)
        }
        None => None,
    };
    let scenario_name = ov
        .scenario
        .map(str::to_string)
        .or_else(|| file.as_ref().map(|f| f.scenario.clone()))
        .ok_or_else(|| {
            QelimError::InvalidParameter("no scenario given (use --scenario or --config)".into())
        })?;
    let kind: ScenarioKind = scenario_name.parse()?;
    let theta = match ov.theta {
        Some(s) => Some(parse_angle(s)?),
        None => match file.as_ref().and_then(|f| f.theta.as_ref()) {
            Some(v) => Some(v.resolve()?),
            None => None,
        },
    };
    let file = file.as_ref();
    Ok(Resolved {
        kind,
        theta,
        n: ov.n.or(file.and_then(|f| f.n)),
        big_n: ov
            .big_n
            .or(file.map(|f| f.big_n))
            .unwrap_or_else(default_big_n),
        seed: ov
            .seed
            .or(file.map(|f| f.seed))
            .unwrap_or_else(default_seed),
        shots: ov
            .shots
            .or(file.map(|f| f.shots))
            .unwrap_or_else(default_shots),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_forms() {
        assert!((parse_angle("piOver8").unwrap() - std::f64::consts::PI / 8.0).abs() < 1e-16);
        assert!((parse_angle("0.5").unwrap() - 0.5).abs() < 1e-16);
        assert!((parse_angle("pi").unwrap() - std::f64::consts::PI).abs() < 1e-16);
        assert!(parse_angle("piOverX").is_err());
        assert!(parse_angle("eight").is_err());
    }

    #[test]
    fn config_json_with_string_angle() {
        let cfg: ScenarioConfig =
            serde_json::from_str(r#"{"scenario": "two_qubit", "theta": "piOver6", "seed": 3}"#)
                .unwrap();
        assert_eq!(cfg.scenario, "two_qubit");
        assert!((cfg.theta.unwrap().resolve().unwrap() - std::f64::consts::PI / 6.0).abs() < 1e-16);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.shots, 100_000);
    }
}
