//! Mermin experiment report: a line-oriented `key = value` block for
//! machine parsing plus a human-readable rendering.
//!
//! The written block contains the extracted expectation values, the Mermin
//! sum with its error, both bounds, the verdict, and an echo of the run
//! configuration. It round-trips exactly: floats are written with 17
//! significant digits.

use crate::config::{fmt_f64, kv_lines, ConfigError, RunConfig};
use neutron_ghz::analysis::MerminReport;
use neutron_ghz::ghz_logic::MerminTerm;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ReportError {
    Malformed(ConfigError),
    MissingKey(&'static str),
    BadValue { key: String, value: String },
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Malformed(e) => write!(f, "malformed report: {e}"),
            ReportError::MissingKey(key) => write!(f, "report is missing key `{key}`"),
            ReportError::BadValue { key, value } => {
                write!(f, "cannot parse report value `{value}` for `{key}`")
            }
        }
    }
}

impl std::error::Error for ReportError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEntry {
    pub term: MerminTerm,
    pub value: f64,
    pub sigma: f64,
}

/// The report written by the `mermin` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Ordered as [`MerminTerm::ALL`].
    pub terms: [TermEntry; 4],
    pub m: f64,
    pub sigma_m: f64,
    pub nchv_bound: f64,
    pub quantum_bound: f64,
    pub nchv_violated: bool,
    pub significance_k: f64,
    pub config: RunConfig,
    pub noiseless: bool,
}

impl Report {
    pub fn from_mermin(mermin: &MerminReport, config: RunConfig, noiseless: bool) -> Self {
        let terms = MerminTerm::ALL.map(|term| {
            let estimate = mermin.estimate(term);
            TermEntry {
                term,
                value: estimate.value,
                sigma: estimate.sigma,
            }
        });
        Self {
            terms,
            m: mermin.m,
            sigma_m: mermin.sigma_m,
            nchv_bound: MerminReport::NCHV_BOUND,
            quantum_bound: MerminReport::QUANTUM_BOUND,
            nchv_violated: mermin.nchv_violated,
            significance_k: mermin.significance_k,
            config,
            noiseless,
        }
    }

    pub fn to_kv_string(&self) -> String {
        let mut out = String::from("# neutron-ghz mermin report\n");
        for entry in &self.terms {
            out.push_str(&format!(
                "term_{}_value = {}\n",
                entry.term.label(),
                fmt_f64(entry.value)
            ));
            out.push_str(&format!(
                "term_{}_sigma = {}\n",
                entry.term.label(),
                fmt_f64(entry.sigma)
            ));
        }
        out.push_str(&format!("m_value = {}\n", fmt_f64(self.m)));
        out.push_str(&format!("m_sigma = {}\n", fmt_f64(self.sigma_m)));
        out.push_str(&format!("nchv_bound = {}\n", fmt_f64(self.nchv_bound)));
        out.push_str(&format!(
            "quantum_bound = {}\n",
            fmt_f64(self.quantum_bound)
        ));
        out.push_str(&format!("nchv_violated = {}\n", self.nchv_violated));
        out.push_str(&format!(
            "significance_k = {}\n",
            fmt_f64(self.significance_k)
        ));
        out.push_str("# configuration echo\n");
        out.push_str(&self.config.to_kv_string());
        out.push_str(&format!("noiseless = {}\n", self.noiseless));
        out
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let mut map: HashMap<String, String> = HashMap::new();
        for (_, key, value) in kv_lines(text).map_err(ReportError::Malformed)? {
            map.insert(key, value);
        }
        let get = |key: &'static str| map.get(key).ok_or(ReportError::MissingKey(key));
        let get_f64 = |key: &'static str| -> Result<f64, ReportError> {
            let raw = get(key)?;
            raw.parse().map_err(|_| ReportError::BadValue {
                key: key.into(),
                value: raw.clone(),
            })
        };
        let get_bool = |key: &'static str| -> Result<bool, ReportError> {
            let raw = get(key)?;
            raw.parse().map_err(|_| ReportError::BadValue {
                key: key.into(),
                value: raw.clone(),
            })
        };

        let term_value = |term: MerminTerm| -> Result<TermEntry, ReportError> {
            let (value_key, sigma_key): (&'static str, &'static str) = match term {
                MerminTerm::Xxx => ("term_xxx_value", "term_xxx_sigma"),
                MerminTerm::Xyy => ("term_xyy_value", "term_xyy_sigma"),
                MerminTerm::Yxy => ("term_yxy_value", "term_yxy_sigma"),
                MerminTerm::Yyx => ("term_yyx_value", "term_yyx_sigma"),
            };
            Ok(TermEntry {
                term,
                value: get_f64(value_key)?,
                sigma: get_f64(sigma_key)?,
            })
        };

        let terms = [
            term_value(MerminTerm::Xxx)?,
            term_value(MerminTerm::Xyy)?,
            term_value(MerminTerm::Yxy)?,
            term_value(MerminTerm::Yyx)?,
        ];

        let parse_int = |key: &'static str| -> Result<u64, ReportError> {
            let raw = get(key)?;
            raw.parse().map_err(|_| ReportError::BadValue {
                key: key.into(),
                value: raw.clone(),
            })
        };

        let config = RunConfig {
            visibility: get_f64("visibility")?,
            counts_per_point: parse_int("counts_per_point")? as u32,
            points_per_scan: parse_int("points_per_scan")? as u32,
            repeats: parse_int("repeats")? as u32,
            seed: parse_int("seed")?,
            rf_phase: get_f64("rf_phase")?,
            significance_k: get_f64("significance_k")?,
        };

        Ok(Report {
            terms,
            m: get_f64("m_value")?,
            sigma_m: get_f64("m_sigma")?,
            nchv_bound: get_f64("nchv_bound")?,
            quantum_bound: get_f64("quantum_bound")?,
            nchv_violated: get_bool("nchv_violated")?,
            significance_k: get_f64("significance_k")?,
            config,
            noiseless: get_bool("noiseless")?,
        })
    }

    pub fn human_text(&self) -> String {
        let mut out = String::from("Mermin experiment report\n");
        for entry in &self.terms {
            out.push_str(&format!(
                "  E[{}] = {:+.4} ± {:.4}\n",
                entry.term.label(),
                entry.value,
                entry.sigma
            ));
        }
        out.push_str(&format!("  M = {:.4} ± {:.4}\n", self.m, self.sigma_m));
        out.push_str(&format!(
            "  noncontextual bound: {}, quantum bound: {}\n",
            self.nchv_bound, self.quantum_bound
        ));
        if self.nchv_violated {
            let excess = (self.m.abs() - self.nchv_bound) / self.sigma_m.max(f64::MIN_POSITIVE);
            out.push_str(&format!(
                "  verdict: VIOLATED — |M| exceeds the bound by {excess:.1} σ (k = {})\n",
                self.significance_k
            ));
        } else {
            out.push_str(&format!(
                "  verdict: no violation at the k = {} level\n",
                self.significance_k
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        Report {
            terms: [
                TermEntry {
                    term: MerminTerm::Xxx,
                    value: 0.659,
                    sigma: 0.002,
                },
                TermEntry {
                    term: MerminTerm::Xyy,
                    value: -0.632,
                    sigma: 0.002,
                },
                TermEntry {
                    term: MerminTerm::Yxy,
                    value: -0.603,
                    sigma: 0.002,
                },
                TermEntry {
                    term: MerminTerm::Yyx,
                    value: -0.664,
                    sigma: 0.002,
                },
            ],
            m: 2.558,
            sigma_m: 0.004,
            nchv_bound: 2.0,
            quantum_bound: 4.0,
            nchv_violated: true,
            significance_k: 3.0,
            config: RunConfig::default(),
            noiseless: false,
        }
    }

    #[test]
    fn report_round_trips_exactly() {
        let report = sample_report();
        let parsed = Report::parse(&report.to_kv_string()).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn parse_detects_missing_keys() {
        let mut text = sample_report().to_kv_string();
        text = text.replace("m_value", "m_val");
        match Report::parse(&text) {
            Err(ReportError::MissingKey("m_value")) => {}
            other => panic!("expected MissingKey(m_value), got {other:?}"),
        }
    }

    #[test]
    fn human_text_mentions_the_verdict() {
        let text = sample_report().human_text();
        assert!(text.contains("VIOLATED"));
        assert!(text.contains("M = 2.5580"));
    }
}
