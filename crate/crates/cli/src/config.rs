//! Flat `key = value` run configuration.
//!
//! The format is plain text with `#` comments, one assignment per line.
//! Unknown keys are rejected with their line number so typos cannot
//! silently fall back to defaults.

use neutron_ghz::experiment::ExperimentConfig;
use std::fmt;

/// Serializes a float with 17 significant digits, enough for bit-exact
/// round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax {
        line: usize,
        content: String,
    },
    UnknownKey {
        line: usize,
        key: String,
    },
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    OutOfRange {
        key: &'static str,
        detail: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, content } => {
                write!(f, "line {line}: expected `key = value`, got `{content}`")
            }
            ConfigError::UnknownKey { line, key } => {
                write!(f, "line {line}: unknown key `{key}`")
            }
            ConfigError::BadValue { line, key, value } => {
                write!(f, "line {line}: cannot parse `{value}` for key `{key}`")
            }
            ConfigError::OutOfRange { key, detail } => write!(f, "key `{key}`: {detail}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Splits a flat key = value document into (line number, key, value)
/// triples, skipping blank lines and `#` comments.
pub fn kv_lines(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let without_comment = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = without_comment.trim();
        if trimmed.is_empty() {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                content: trimmed.to_string(),
            });
        };
        out.push((line_no, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Run parameters shared by the `scan` and `mermin` subcommands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub visibility: f64,
    pub counts_per_point: u32,
    pub points_per_scan: u32,
    pub repeats: u32,
    pub seed: u64,
    pub rf_phase: f64,
    pub significance_k: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            visibility: 0.6395,
            counts_per_point: 250,
            points_per_scan: 32,
            repeats: 4,
            seed: 1,
            rf_phase: 0.0,
            significance_k: 3.0,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = RunConfig::default();
        for (line, key, value) in kv_lines(text)? {
            let bad = || ConfigError::BadValue {
                line,
                key: key.clone(),
                value: value.clone(),
            };
            match key.as_str() {
                "visibility" => config.visibility = value.parse().map_err(|_| bad())?,
                "counts_per_point" => config.counts_per_point = value.parse().map_err(|_| bad())?,
                "points_per_scan" => config.points_per_scan = value.parse().map_err(|_| bad())?,
                "repeats" => config.repeats = value.parse().map_err(|_| bad())?,
                "seed" => config.seed = value.parse().map_err(|_| bad())?,
                "rf_phase" => config.rf_phase = value.parse().map_err(|_| bad())?,
                "significance_k" => config.significance_k = value.parse().map_err(|_| bad())?,
                _ => return Err(ConfigError::UnknownKey { line, key }),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.visibility) || !self.visibility.is_finite() {
            return Err(ConfigError::OutOfRange {
                key: "visibility",
                detail: format!("{} outside [0, 1]", self.visibility),
            });
        }
        if self.counts_per_point == 0 {
            return Err(ConfigError::OutOfRange {
                key: "counts_per_point",
                detail: "must be positive".into(),
            });
        }
        if self.points_per_scan < 5 {
            return Err(ConfigError::OutOfRange {
                key: "points_per_scan",
                detail: format!("{} below the fit minimum of 5", self.points_per_scan),
            });
        }
        if self.repeats == 0 {
            return Err(ConfigError::OutOfRange {
                key: "repeats",
                detail: "must be positive".into(),
            });
        }
        if !self.rf_phase.is_finite() {
            return Err(ConfigError::OutOfRange {
                key: "rf_phase",
                detail: "must be finite".into(),
            });
        }
        if !self.significance_k.is_finite() || self.significance_k < 0.0 {
            return Err(ConfigError::OutOfRange {
                key: "significance_k",
                detail: "must be finite and nonnegative".into(),
            });
        }
        Ok(())
    }

    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("visibility = {}\n", fmt_f64(self.visibility)));
        out.push_str(&format!("counts_per_point = {}\n", self.counts_per_point));
        out.push_str(&format!("points_per_scan = {}\n", self.points_per_scan));
        out.push_str(&format!("repeats = {}\n", self.repeats));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("rf_phase = {}\n", fmt_f64(self.rf_phase)));
        out.push_str(&format!(
            "significance_k = {}\n",
            fmt_f64(self.significance_k)
        ));
        out
    }

    pub fn to_experiment_config(&self, noiseless: bool) -> ExperimentConfig {
        ExperimentConfig {
            visibility: self.visibility,
            counts_per_point: self.counts_per_point,
            points_per_scan: self.points_per_scan,
            repeats: self.repeats,
            seed: self.seed,
            rf_phase: self.rf_phase,
            significance_k: self.significance_k,
            noiseless,
        }
    }
}
