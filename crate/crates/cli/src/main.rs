//! Command-line front end for the neutron GHZ interferometry simulator.
//!
//! Subcommands:
//! * `ghz-check` — exact logical checks: GHZ eigenrelations, the 64-assignment
//!   hidden-variable enumeration, and the classical/quantum Mermin bounds.
//! * `scan` — simulate one path-phase scan and write it as CSV.
//! * `mermin` — simulate the full 16-scan campaign with repeats, run the
//!   fitting/extraction pipeline, and write the Mermin report.
//!
//! Exit codes: 0 success, 1 check or pipeline failure, 2 invalid
//! configuration or arguments, 3 I/O error.

use clap::{Parser, Subcommand};
use neutron_ghz::analysis::ScanResult;
use neutron_ghz::experiment::{run_experiment, simulate_scan, ExperimentError};
use neutron_ghz::ghz_logic::{
    check_eigenrelations, enumerate_nchv, ghz_density, ghz_state, mermin_operator, mermin_value,
    EigenrelationReport, GhzSign,
};
use neutron_ghz_cli::config::{fmt_f64, ConfigError, RunConfig};
use neutron_ghz_cli::report::Report;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "neutron-ghz",
    version,
    about = "Single-neutron GHZ interferometry simulator and Mermin-inequality analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact logical checks and print a verdict per check
    GhzCheck {
        /// Optional run configuration (validated, but the checks are exact)
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
    /// Simulate one path-phase scan at fixed (alpha, gamma) and write CSV
    Scan {
        /// Spin phase α in radians
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Energy phase γ in radians
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        /// Bypass Poisson sampling; counts equal expected intensities
        #[arg(long)]
        noiseless: bool,
        /// Output CSV path
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
    /// Simulate the 16-scan campaign and write the Mermin report
    Mermin {
        /// Bypass Poisson sampling; counts equal expected intensities
        #[arg(long)]
        noiseless: bool,
        /// Override the configured fringe visibility
        #[arg(long)]
        visibility: Option<f64>,
        /// Override the configured seed
        #[arg(long)]
        seed: Option<u64>,
        /// Output report path
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Config(ConfigError),
    Experiment(ExperimentError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration: {e}"),
            CliError::Experiment(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Experiment(ExperimentError::InvalidConfig(_))
            | CliError::Experiment(ExperimentError::Beamline(_)) => ExitCode::from(2),
            CliError::Experiment(_) => ExitCode::from(1),
            CliError::Io { .. } => ExitCode::from(3),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        CliError::Experiment(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::GhzCheck { config } => {
            load_config(config.as_deref())?;
            let (text, all_passed) = ghz_check_text()?;
            print!("{text}");
            Ok(if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Scan {
            alpha,
            gamma,
            noiseless,
            output,
            config,
        } => {
            let run_config = load_config(config.as_deref())?;
            cmd_scan(alpha, gamma, noiseless, &output, &run_config)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mermin {
            noiseless,
            visibility,
            seed,
            output,
            config,
        } => {
            let mut run_config = load_config(config.as_deref())?;
            if let Some(v) = visibility {
                run_config.visibility = v;
            }
            if let Some(s) = seed {
                run_config.seed = s;
            }
            run_config.validate()?;
            cmd_mermin(noiseless, &output, &run_config)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Ok(RunConfig::parse(&text)?)
        }
    }
}

fn relation_lines(label: &str, report: &EigenrelationReport, out: &mut String) {
    out.push_str(&format!("eigenrelations ({label} state):\n"));
    for rel in &report.relations {
        out.push_str(&format!(
            "  {}: expected {:+}, residual {:.3e} [{}]\n",
            rel.term,
            rel.expected_eigenvalue,
            rel.residual,
            if rel.holds { "ok" } else { "FAIL" }
        ));
    }
}

fn ghz_check_text() -> Result<(String, bool), CliError> {
    let minus = check_eigenrelations(&ghz_state(GhzSign::Minus), GhzSign::Minus);
    let plus = check_eigenrelations(&ghz_state(GhzSign::Plus), GhzSign::Plus);
    let nchv = enumerate_nchv();
    let spectrum = mermin_operator()
        .hermitian_eigenvalues()
        .map_err(|e| CliError::Experiment(ExperimentError::State(e)))?;
    let quantum_max = spectrum[7];
    let m_plus = mermin_value(&ghz_density(GhzSign::Plus))
        .map_err(|e| CliError::Experiment(ExperimentError::State(e)))?;

    let mut out = String::new();
    relation_lines("minus", &minus, &mut out);
    relation_lines("plus", &plus, &mut out);
    out.push_str(&format!(
        "satisfying assignments: {}/{}\n",
        nchv.satisfying_count, nchv.assignments_total
    ));
    out.push_str(&format!(
        "left-hand-side product: {}\n",
        if nchv.lhs_product_always_one {
            "+1 for every assignment"
        } else {
            "FAIL"
        }
    ));
    out.push_str(&format!(
        "classical max |M| = {}\n",
        nchv.max_abs_mermin_sum
    ));
    out.push_str(&format!("quantum max = {quantum_max:.9}\n"));
    out.push_str(&format!("mermin value on plus GHZ state = {m_plus:.9}\n"));

    let all_passed = minus.all_hold()
        && plus.all_hold()
        && nchv.satisfying_count == 0
        && nchv.lhs_product_always_one
        && nchv.max_abs_mermin_sum == 2
        && (quantum_max - 4.0).abs() < 1e-9
        && (m_plus - 4.0).abs() < 1e-9;
    out.push_str(if all_passed {
        "all checks passed\n"
    } else {
        "CHECKS FAILED\n"
    });
    Ok((out, all_passed))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn scan_csv(curve: &[(f64, f64)], result: &ScanResult) -> String {
    let mut out = String::from("chi_rad,expected_intensity,counts,count_error\n");
    for ((chi, expected), point) in curve.iter().zip(result.points.iter()) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(*chi),
            fmt_f64(*expected),
            fmt_f64(point.counts),
            fmt_f64(point.count_error)
        ));
    }
    out
}

fn cmd_scan(
    alpha: f64,
    gamma: f64,
    noiseless: bool,
    output: &Path,
    run_config: &RunConfig,
) -> Result<(), CliError> {
    let cfg = run_config.to_experiment_config(noiseless);
    cfg.validate()?;
    let plan = cfg.scan_plan(alpha, gamma)?;
    let rho = cfg.prepared_density()?;
    let curve = neutron_ghz::beamline::ideal_intensity_curve(&plan, &rho)
        .map_err(ExperimentError::State)?;
    let result = simulate_scan(&plan, &rho, 0, noiseless)?;
    write_file(output, &scan_csv(&curve, &result))?;
    println!(
        "wrote {} scan points (alpha = {alpha}, gamma = {gamma}) to {}",
        result.points.len(),
        output.display()
    );
    Ok(())
}

fn cmd_mermin(noiseless: bool, output: &Path, run_config: &RunConfig) -> Result<(), CliError> {
    let cfg = run_config.to_experiment_config(noiseless);
    let outcome = run_experiment(&cfg)?;
    let report = Report::from_mermin(&outcome.report, *run_config, noiseless);
    write_file(output, &report.to_kv_string())?;
    print!("{}", report.human_text());
    println!("report written to {}", output.display());
    Ok(())
}
