//! Experiment driver: simulates the 16-setting χ-scan campaign with repeats
//! and runs the full analysis pipeline to a Mermin report.
//!
//! Every scan owns a dedicated random stream (`stream_id = scan index ×
//! repeats + repeat index`), so the sampled dataset is independent of
//! execution order. With the `parallel` feature (default) the scans and
//! Monte Carlo repetitions run on a rayon pool; the sequential fallback
//! produces bit-identical results.

use crate::analysis::{
    extract_expectation, fit_sinusoid, mermin_from_expectations_with, AnalysisError, MerminReport,
    ScanFit, ScanPoint, ScanResult, MIN_SCAN_POINTS,
};
use crate::beamline::{
    ideal_intensity_curve, prepare_neutron_ghz, BeamlineConfig, BeamlineError, ScanPlan,
};
use crate::ghz_logic::MerminTerm;
use crate::noise::{ghz_dephase, poisson_counts, NoiseError, RngStream, DEFAULT_VISIBILITY};
use crate::qcore::{densify, DensityMatrix, QcoreError};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

/// Errors surfaced by the experiment driver.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    InvalidConfig(String),
    Beamline(BeamlineError),
    Noise(NoiseError),
    Analysis(AnalysisError),
    State(QcoreError),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            ExperimentError::Beamline(e) => write!(f, "beamline: {e}"),
            ExperimentError::Noise(e) => write!(f, "noise: {e}"),
            ExperimentError::Analysis(e) => write!(f, "analysis: {e}"),
            ExperimentError::State(e) => write!(f, "state: {e}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<BeamlineError> for ExperimentError {
    fn from(e: BeamlineError) -> Self {
        ExperimentError::Beamline(e)
    }
}

impl From<NoiseError> for ExperimentError {
    fn from(e: NoiseError) -> Self {
        ExperimentError::Noise(e)
    }
}

impl From<AnalysisError> for ExperimentError {
    fn from(e: AnalysisError) -> Self {
        ExperimentError::Analysis(e)
    }
}

impl From<QcoreError> for ExperimentError {
    fn from(e: QcoreError) -> Self {
        ExperimentError::State(e)
    }
}

/// The four quadrant settings used for α and γ.
pub const SETTING_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, 2.0 * FRAC_PI_2, 3.0 * FRAC_PI_2];

/// Full configuration of one simulated Mermin experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Fringe visibility of the prepared state.
    pub visibility: f64,
    /// Mean detected counts per scan point.
    pub counts_per_point: u32,
    /// χ points per scan, equally spaced over [0, 2π).
    pub points_per_scan: u32,
    /// Repetitions of the 16-scan campaign.
    pub repeats: u32,
    pub seed: u64,
    /// Phase φ of the RF flipper field.
    pub rf_phase: f64,
    /// Significance multiplier for the bound verdict.
    pub significance_k: f64,
    /// Bypass Poisson sampling: counts equal the expected intensities.
    pub noiseless: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            visibility: DEFAULT_VISIBILITY,
            counts_per_point: 250,
            points_per_scan: 32,
            repeats: 4,
            seed: 1,
            rf_phase: 0.0,
            significance_k: 3.0,
            noiseless: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(0.0..=1.0).contains(&self.visibility) || !self.visibility.is_finite() {
            return Err(ExperimentError::InvalidConfig(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        if self.counts_per_point == 0 {
            return Err(ExperimentError::InvalidConfig(
                "counts_per_point must be positive".into(),
            ));
        }
        if (self.points_per_scan as usize) < MIN_SCAN_POINTS {
            return Err(ExperimentError::InvalidConfig(format!(
                "points_per_scan {} below the fit minimum {MIN_SCAN_POINTS}",
                self.points_per_scan
            )));
        }
        if self.repeats == 0 {
            return Err(ExperimentError::InvalidConfig(
                "repeats must be positive".into(),
            ));
        }
        if !self.rf_phase.is_finite() {
            return Err(ExperimentError::InvalidConfig(
                "rf_phase must be finite".into(),
            ));
        }
        if !self.significance_k.is_finite() || self.significance_k < 0.0 {
            return Err(ExperimentError::InvalidConfig(
                "significance_k must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// The dephased GHZ-like state this configuration prepares.
    pub fn prepared_density(&self) -> Result<DensityMatrix, ExperimentError> {
        let beamline = BeamlineConfig {
            rf_phase: self.rf_phase,
            source_rate: 8.0 * f64::from(self.counts_per_point),
            ..BeamlineConfig::default()
        };
        let psi = prepare_neutron_ghz(&beamline);
        let pure = densify(&psi)?;
        Ok(ghz_dephase(&pure, self.visibility)?)
    }

    /// The scan plan for one (α, γ) setting.
    pub fn scan_plan(&self, alpha: f64, gamma: f64) -> Result<ScanPlan, ExperimentError> {
        Ok(ScanPlan::new(
            alpha,
            gamma,
            ScanPlan::uniform_chi_grid(self.points_per_scan as usize),
            self.counts_per_point,
            self.visibility,
            self.seed,
        )?)
    }
}

/// The 16 (α, γ) scan plans in campaign order (α-major).
pub fn mermin_scan_plans(cfg: &ExperimentConfig) -> Result<Vec<ScanPlan>, ExperimentError> {
    let mut plans = Vec::with_capacity(16);
    for &alpha in &SETTING_ANGLES {
        for &gamma in &SETTING_ANGLES {
            plans.push(cfg.scan_plan(alpha, gamma)?);
        }
    }
    Ok(plans)
}

/// One simulated scan of the campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedScan {
    /// Flat campaign index; equals the scan's RNG stream id.
    pub scan_id: usize,
    /// Index into the 16 (α, γ) settings.
    pub setting_index: usize,
    pub repeat: u32,
    pub result: ScanResult,
}

/// Simulates one scan: expected intensities from the state, then one Poisson
/// draw per point on the scan's own stream (skipped in noiseless mode).
pub fn simulate_scan(
    plan: &ScanPlan,
    rho: &DensityMatrix,
    stream_id: u64,
    noiseless: bool,
) -> Result<ScanResult, ExperimentError> {
    let curve = ideal_intensity_curve(plan, rho)?;
    let mut rng = RngStream::new(plan.seed, stream_id).rng();
    let mut points = Vec::with_capacity(curve.len());
    for (chi, expected) in curve {
        let counts = if noiseless {
            expected
        } else {
            poisson_counts(expected, &mut rng)? as f64
        };
        points.push(ScanPoint::from_counts(chi, counts)?);
    }
    Ok(ScanResult::new(plan.alpha, plan.gamma, points)?)
}

fn campaign_indices(cfg: &ExperimentConfig) -> Vec<(usize, usize, u32)> {
    let repeats = cfg.repeats as usize;
    (0..16 * repeats)
        .map(|scan_id| (scan_id, scan_id / repeats, (scan_id % repeats) as u32))
        .collect()
}

fn simulate_one(
    cfg: &ExperimentConfig,
    plans: &[ScanPlan],
    rho: &DensityMatrix,
    scan_id: usize,
    setting_index: usize,
    repeat: u32,
) -> Result<SimulatedScan, ExperimentError> {
    let result = simulate_scan(&plans[setting_index], rho, scan_id as u64, cfg.noiseless)?;
    Ok(SimulatedScan {
        scan_id,
        setting_index,
        repeat,
        result,
    })
}

/// Simulates the whole campaign (16 settings × repeats) sequentially.
pub fn simulate_dataset_sequential(
    cfg: &ExperimentConfig,
) -> Result<Vec<SimulatedScan>, ExperimentError> {
    cfg.validate()?;
    let rho = cfg.prepared_density()?;
    let plans = mermin_scan_plans(cfg)?;
    campaign_indices(cfg)
        .into_iter()
        .map(|(id, setting, repeat)| simulate_one(cfg, &plans, &rho, id, setting, repeat))
        .collect()
}

/// Simulates the whole campaign on the rayon pool. Scan order and sampled
/// counts are identical to the sequential path.
#[cfg(feature = "parallel")]
pub fn simulate_dataset_parallel(
    cfg: &ExperimentConfig,
) -> Result<Vec<SimulatedScan>, ExperimentError> {
    cfg.validate()?;
    let rho = cfg.prepared_density()?;
    let plans = mermin_scan_plans(cfg)?;
    campaign_indices(cfg)
        .into_par_iter()
        .map(|(id, setting, repeat)| simulate_one(cfg, &plans, &rho, id, setting, repeat))
        .collect()
}

/// Simulates the whole campaign, parallel when the feature is enabled.
pub fn simulate_dataset(cfg: &ExperimentConfig) -> Result<Vec<SimulatedScan>, ExperimentError> {
    #[cfg(feature = "parallel")]
    {
        simulate_dataset_parallel(cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        simulate_dataset_sequential(cfg)
    }
}

/// Fits every scan of a simulated dataset.
pub fn fit_dataset(scans: &[SimulatedScan]) -> Result<Vec<ScanFit>, ExperimentError> {
    scans
        .iter()
        .map(|scan| {
            let fit = fit_sinusoid(&scan.result)?;
            Ok(ScanFit {
                scan_id: scan.scan_id,
                alpha: scan.result.alpha,
                gamma: scan.result.gamma,
                fit,
            })
        })
        .collect()
}

/// Everything produced by one full experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: MerminReport,
    pub fits: Vec<ScanFit>,
    pub scans: Vec<SimulatedScan>,
}

/// Runs the full pipeline: simulate, fit, extract the four expectation
/// values, and assemble the Mermin report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    let scans = simulate_dataset(cfg)?;
    let fits = fit_dataset(&scans)?;
    let estimates = MerminTerm::ALL
        .iter()
        .map(|&term| extract_expectation(&fits, term))
        .collect::<Result<Vec<_>, _>>()?;
    let report = mermin_from_expectations_with(&estimates, cfg.significance_k)?;
    Ok(ExperimentOutcome {
        report,
        fits,
        scans,
    })
}

fn run_with_seed(cfg: &ExperimentConfig, offset: u64) -> Result<MerminReport, ExperimentError> {
    let run_cfg = ExperimentConfig {
        seed: cfg.seed.wrapping_add(offset),
        ..*cfg
    };
    Ok(run_experiment(&run_cfg)?.report)
}

/// Repeats the experiment `runs` times with consecutive seeds, sequentially.
pub fn monte_carlo_mermin_sequential(
    cfg: &ExperimentConfig,
    runs: u32,
) -> Result<Vec<MerminReport>, ExperimentError> {
    (0..u64::from(runs))
        .map(|r| run_with_seed(cfg, r))
        .collect()
}

/// As [`monte_carlo_mermin_sequential`] on the rayon pool; the per-run seeds
/// make the result identical.
#[cfg(feature = "parallel")]
pub fn monte_carlo_mermin_parallel(
    cfg: &ExperimentConfig,
    runs: u32,
) -> Result<Vec<MerminReport>, ExperimentError> {
    (0..u64::from(runs))
        .into_par_iter()
        .map(|r| run_with_seed(cfg, r))
        .collect()
}

/// Monte Carlo repetition of the full experiment, parallel when enabled.
pub fn monte_carlo_mermin(
    cfg: &ExperimentConfig,
    runs: u32,
) -> Result<Vec<MerminReport>, ExperimentError> {
    #[cfg(feature = "parallel")]
    {
        monte_carlo_mermin_parallel(cfg, runs)
    }
    #[cfg(not(feature = "parallel"))]
    {
        monte_carlo_mermin_sequential(cfg, runs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz_logic::mermin_value;

    fn noiseless_config(visibility: f64, rf_phase: f64) -> ExperimentConfig {
        ExperimentConfig {
            visibility,
            rf_phase,
            noiseless: true,
            repeats: 1,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn noiseless_pipeline_reproduces_headline_m() {
        let outcome = run_experiment(&noiseless_config(0.6395, 0.0)).unwrap();
        assert!((outcome.report.m - 2.558).abs() < 1e-3);
        assert!(outcome.report.nchv_violated);
    }

    #[test]
    fn noiseless_unit_visibility_reaches_quantum_bound() {
        let outcome = run_experiment(&noiseless_config(1.0, 0.0)).unwrap();
        assert!((outcome.report.m - 4.0).abs() < 1e-6);
    }

    #[test]
    fn pipeline_matches_exact_mermin_value_across_settings() {
        for (v, phi) in [(0.3, 0.0), (0.8, 0.6), (1.0, -1.2), (0.0, 2.0), (0.55, 3.9)] {
            let cfg = noiseless_config(v, phi);
            let outcome = run_experiment(&cfg).unwrap();
            let exact = mermin_value(&cfg.prepared_density().unwrap()).unwrap();
            assert!(
                (outcome.report.m - exact).abs() < 1e-6,
                "V = {v}, φ = {phi}: pipeline {} vs exact {exact}",
                outcome.report.m
            );
        }
    }

    #[test]
    fn campaign_covers_every_setting_with_repeats() {
        let cfg = ExperimentConfig {
            repeats: 3,
            points_per_scan: 8,
            ..Default::default()
        };
        let scans = simulate_dataset(&cfg).unwrap();
        assert_eq!(scans.len(), 48);
        for (i, scan) in scans.iter().enumerate() {
            assert_eq!(scan.scan_id, i);
            assert_eq!(scan.setting_index, i / 3);
            assert_eq!(scan.repeat as usize, i % 3);
        }
    }

    #[test]
    fn dataset_is_reproducible_and_seed_sensitive() {
        let cfg = ExperimentConfig {
            points_per_scan: 8,
            repeats: 1,
            ..Default::default()
        };
        let a = simulate_dataset(&cfg).unwrap();
        let b = simulate_dataset(&cfg).unwrap();
        assert_eq!(a, b);
        let other = ExperimentConfig { seed: 2, ..cfg };
        assert_ne!(a, simulate_dataset(&other).unwrap());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_datasets_are_identical() {
        let cfg = ExperimentConfig {
            points_per_scan: 16,
            ..Default::default()
        };
        let seq = simulate_dataset_sequential(&cfg).unwrap();
        let par = simulate_dataset_parallel(&cfg).unwrap();
        assert_eq!(seq, par);

        let mc_seq = monte_carlo_mermin_sequential(&cfg, 6).unwrap();
        let mc_par = monte_carlo_mermin_parallel(&cfg, 6).unwrap();
        for (a, b) in mc_seq.iter().zip(mc_par.iter()) {
            assert_eq!(a.m, b.m);
            assert_eq!(a.sigma_m, b.sigma_m);
        }
    }

    #[test]
    fn noisy_run_lands_near_the_dephased_prediction() {
        let cfg = ExperimentConfig::default();
        let outcome = run_experiment(&cfg).unwrap();
        let expected = 4.0 * cfg.visibility;
        assert!(
            (outcome.report.m - expected).abs() < 5.0 * outcome.report.sigma_m,
            "M = {} ± {}, expected {expected}",
            outcome.report.m,
            outcome.report.sigma_m
        );
        assert!(outcome.report.nchv_violated);
        assert_eq!(outcome.scans.len(), 64);
        assert_eq!(outcome.fits.len(), 64);
        for estimate in &outcome.report.estimates {
            assert_eq!(estimate.provenance.len(), 16);
        }
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let bad = ExperimentConfig {
            visibility: 1.2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            points_per_scan: 3,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            repeats: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            significance_k: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
