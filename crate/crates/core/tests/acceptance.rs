//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them all).

use neutron_ghz::analysis::{
    fit_sinusoid, mermin_from_expectations, ExpectationEstimate, ScanPoint, ScanResult,
};
use neutron_ghz::experiment::{monte_carlo_mermin, run_experiment, ExperimentConfig};
use neutron_ghz::ghz_logic::{
    check_eigenrelations, enumerate_nchv, ghz_density, ghz_state, mermin_operator, mermin_value,
    GhzSign, MerminTerm,
};
use neutron_ghz::noise::{poisson_counts, RngStream};
use neutron_ghz::qcore::expectation;
use rand::RngExt;
use std::f64::consts::TAU;
use std::time::Instant;

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
fn acceptance_1_ghz_eigenrelations() {
    let report = check_eigenrelations(&ghz_state(GhzSign::Minus), GhzSign::Minus);
    for rel in &report.relations {
        let expected = if rel.term == MerminTerm::Xxx {
            -1.0
        } else {
            1.0
        };
        assert_eq!(rel.expected_eigenvalue, expected);
        assert!(
            rel.residual < 1e-12,
            "relation {} residual {}",
            rel.term,
            rel.residual
        );
    }
    println!(
        "acceptance 1 (GHZ eigenrelations): PASS — max residual {:.3e}",
        report.max_residual()
    );
}

#[test]
fn acceptance_2_nchv_impossibility() {
    let report = enumerate_nchv();
    assert_eq!(report.assignments_total, 64);
    assert_eq!(
        report.satisfying_count, 0,
        "satisfying assignments must be 0"
    );
    assert!(
        report.lhs_product_always_one,
        "LHS product must be +1 for every assignment"
    );
    assert_eq!(
        report.max_abs_mermin_sum, 2,
        "classical max |M| must be exactly 2"
    );
    println!(
        "acceptance 2 (NCHV impossibility): PASS — {}/64 satisfying, classical max |M| = {}",
        report.satisfying_count, report.max_abs_mermin_sum
    );
}

#[test]
fn acceptance_3_quantum_bound() {
    let spectrum = mermin_operator().hermitian_eigenvalues().unwrap();
    let top = spectrum[7];
    assert!((top - 4.0).abs() < 1e-9, "largest eigenvalue {top}");
    let on_plus = mermin_value(&ghz_density(GhzSign::Plus)).unwrap();
    assert!((on_plus - 4.0).abs() < 1e-9, "plus-state value {on_plus}");
    println!(
        "acceptance 3 (quantum bound): PASS — top eigenvalue {top:.12}, reached by the plus GHZ state ({on_plus:.12})"
    );
}

#[test]
fn acceptance_4_headline_mermin_value() {
    let headline = run_experiment(&noiseless_config(0.6395, 0.0)).unwrap();
    assert!(
        (headline.report.m - 2.558).abs() < 1e-3,
        "M = {} at V = 0.6395",
        headline.report.m
    );
    let ideal = run_experiment(&noiseless_config(1.0, 0.0)).unwrap();
    assert!(
        (ideal.report.m - 4.0).abs() < 1e-6,
        "M = {} at V = 1",
        ideal.report.m
    );
    println!(
        "acceptance 4 (headline value): PASS — noiseless pipeline M(V=0.6395) = {:.6}, M(V=1) = {:.9}",
        headline.report.m, ideal.report.m
    );
}

#[test]
fn acceptance_5_expectation_arithmetic() {
    let estimates = [
        ExpectationEstimate::new(0.659, 0.002, MerminTerm::Xxx).unwrap(),
        ExpectationEstimate::new(-0.632, 0.002, MerminTerm::Xyy).unwrap(),
        ExpectationEstimate::new(-0.603, 0.002, MerminTerm::Yxy).unwrap(),
        ExpectationEstimate::new(-0.664, 0.002, MerminTerm::Yyx).unwrap(),
    ];
    let report = mermin_from_expectations(&estimates).unwrap();
    assert!((report.m - 2.558).abs() < 1e-12, "M = {}", report.m);
    assert!(
        (report.sigma_m - 0.004).abs() < 1e-12,
        "σ_M = {}",
        report.sigma_m
    );
    assert!(report.nchv_violated);
    println!(
        "acceptance 5 (expectation arithmetic): PASS — M = {:.15}, σ_M = {:.15}",
        report.m, report.sigma_m
    );
}

#[test]
fn acceptance_6_oracle_equivalence() {
    let mut rng = RngStream::new(2024, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let visibility: f64 = rng.random();
        let rf_phase: f64 = (rng.random::<f64>() - 0.5) * TAU;
        let cfg = noiseless_config(visibility, rf_phase);
        let outcome = run_experiment(&cfg).unwrap();
        let rho = cfg.prepared_density().unwrap();
        for term in MerminTerm::ALL {
            let exact = expectation(&rho, &term.operator()).unwrap();
            let extracted = outcome.report.estimate(term).value;
            let err = (extracted - exact).abs();
            worst = worst.max(err);
            assert!(
                err < 1e-6,
                "V = {visibility}, φ = {rf_phase}, term {term}: {extracted} vs {exact}"
            );
        }
        let exact_m = mermin_value(&rho).unwrap();
        assert!((outcome.report.m - exact_m).abs() < 1e-6);
    }
    println!(
        "acceptance 6 (oracle equivalence): PASS — 20 random (V, φ) pairs, worst per-term error {worst:.3e}"
    );
}

#[test]
fn acceptance_7_statistical_calibration() {
    let start = Instant::now();

    // 200 Monte Carlo repetitions at the default counts_per_point = 250
    let cfg = ExperimentConfig::default();
    let reports = monte_carlo_mermin(&cfg, 200).unwrap();
    let n = reports.len() as f64;
    let mean_m = reports.iter().map(|r| r.m).sum::<f64>() / n;
    let std_m = (reports.iter().map(|r| (r.m - mean_m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mean_sigma = reports.iter().map(|r| r.sigma_m).sum::<f64>() / n;
    let ratio = std_m / mean_sigma;
    assert!(
        (ratio - 1.0).abs() <= 0.25,
        "empirical std(M) = {std_m:.5}, reported σ_M = {mean_sigma:.5}, ratio {ratio:.3}"
    );

    // σ_M scaling over a 16× counts range
    let counts_levels = [250u32, 1000, 4000];
    let mut log_counts = Vec::new();
    let mut log_sigma = Vec::new();
    for &counts in &counts_levels {
        let level_cfg = ExperimentConfig {
            counts_per_point: counts,
            seed: 777,
            ..cfg
        };
        let level_reports = monte_carlo_mermin(&level_cfg, 24).unwrap();
        let sigma = level_reports.iter().map(|r| r.sigma_m).sum::<f64>() / 24.0;
        log_counts.push((counts as f64).ln());
        log_sigma.push(sigma.ln());
    }
    let mean_x = log_counts.iter().sum::<f64>() / 3.0;
    let mean_y = log_sigma.iter().sum::<f64>() / 3.0;
    let slope = log_counts
        .iter()
        .zip(&log_sigma)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>()
        / log_counts.iter().map(|x| (x - mean_x).powi(2)).sum::<f64>();
    assert!(
        (slope + 0.5).abs() <= 0.05,
        "log-log slope of σ_M vs counts: {slope:.4}"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "calibration took {elapsed:?}");
    println!(
        "acceptance 7 (statistical calibration): PASS — std(M)/σ_M = {ratio:.3}, σ_M slope {slope:.3}, {elapsed:.2?}"
    );
}

#[test]
fn acceptance_8_fit_recovery() {
    // noiseless recovery to 1e−9
    let (a0, a1, phi) = (250.0, 160.0, 0.7);
    let grid: Vec<f64> = (0..32).map(|k| k as f64 * TAU / 32.0).collect();
    let points: Vec<ScanPoint> = grid
        .iter()
        .map(|&chi| ScanPoint::from_counts(chi, a0 + a1 * (chi + phi).cos()).unwrap())
        .collect();
    let fit = fit_sinusoid(&ScanResult::new(0.0, 0.0, points).unwrap()).unwrap();
    assert!((fit.offset - a0).abs() < 1e-9);
    assert!((fit.amplitude - a1).abs() < 1e-9);
    assert!((fit.phase - phi).abs() < 1e-9);

    // Poisson pulls over 500 trials: mean pull within 2 standard errors
    let trials = 500;
    let mut rng = RngStream::new(23, 0).rng();
    let mut pulls = [
        Vec::with_capacity(trials),
        Vec::with_capacity(trials),
        Vec::with_capacity(trials),
    ];
    for _ in 0..trials {
        let points: Vec<ScanPoint> = grid
            .iter()
            .map(|&chi| {
                let mean = a0 + a1 * (chi + phi).cos();
                let counts = poisson_counts(mean, &mut rng).unwrap() as f64;
                ScanPoint::from_counts(chi, counts).unwrap()
            })
            .collect();
        let fit = fit_sinusoid(&ScanResult::new(0.0, 0.0, points).unwrap()).unwrap();
        pulls[0].push((fit.offset - a0) / fit.sigma_offset());
        pulls[1].push((fit.amplitude - a1) / fit.sigma_amplitude());
        let mut dphi = (fit.phase - phi).rem_euclid(TAU);
        if dphi > TAU / 2.0 {
            dphi -= TAU;
        }
        pulls[2].push(dphi / fit.sigma_phase());
    }
    let mut detail = String::new();
    for (name, series) in ["offset", "amplitude", "phase"].iter().zip(&pulls) {
        let mean = series.iter().sum::<f64>() / trials as f64;
        let var =
            series.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (trials as f64 - 1.0);
        let stderr = (var / trials as f64).sqrt();
        assert!(
            mean.abs() <= 2.0 * stderr,
            "{name} pull mean {mean:.4} vs 2·SE {:.4}",
            2.0 * stderr
        );
        detail.push_str(&format!("{name} {mean:+.3}±{stderr:.3} "));
    }
    println!("acceptance 8 (fit recovery): PASS — noiseless exact, pull means {detail}");
}
