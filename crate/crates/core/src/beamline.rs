//! Model of the interferometer beamline as a sequence of unitaries and a
//! joint projection.
//!
//! The polarized neutron enters as |↑⟩⊗|I⟩⊗|E₀⟩; the first interferometer
//! plate splits the path into (|I⟩+|II⟩)/√2 and a resonance flipper in path
//! II exchanges |↑, E₀⟩ ↦ e^{iφ}|↓, E₀−ħω⟩, leaving the GHZ-like state. The
//! downstream flipper/analyzer chain that selects the in-plane outcomes is
//! collapsed into the single joint projection P₊(α) ⊗ P₊(χ) ⊗ P₊(γ), which
//! is its net effect on the three two-level subsystems.

use crate::qcore::{
    c64, embed, expectation, plus_projector, tensor3, DensityMatrix, DofIndex, PureState,
    QcoreError, SingleQubitOp, TripleOp, DIM, INV_SQRT_2, TOL_DERIVED,
};
use std::f64::consts::TAU;
use std::fmt;

/// Errors raised while validating beamline configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum BeamlineError {
    /// rf_half_frequency must equal rf_frequency / 2.
    FrequencyMismatch { rf: f64, half: f64 },
    /// A phase or rate field is NaN or infinite.
    NonFiniteField(&'static str),
    /// χ grid empty or not strictly increasing.
    BadChiGrid,
    /// Visibility outside [0, 1].
    BadVisibility(f64),
    /// counts_per_point must be positive.
    BadCounts,
}

impl fmt::Display for BeamlineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeamlineError::FrequencyMismatch { rf, half } => {
                write!(
                    f,
                    "rf_half_frequency {half} is not rf_frequency/2 = {}",
                    rf / 2.0
                )
            }
            BeamlineError::NonFiniteField(name) => write!(f, "field `{name}` must be finite"),
            BeamlineError::BadChiGrid => {
                write!(f, "chi grid must be non-empty and strictly increasing")
            }
            BeamlineError::BadVisibility(v) => write!(f, "visibility {v} outside [0, 1]"),
            BeamlineError::BadCounts => write!(f, "counts_per_point must be positive"),
        }
    }
}

impl std::error::Error for BeamlineError {}

/// Static beamline parameters.
///
/// The RF frequencies are configuration metadata (the effective unitary does
/// not depend on them); `rf_phase` is the free phase φ of the oscillating
/// field and `source_rate` normalizes detected intensity per scan point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamlineConfig {
    pub rf_frequency: f64,
    pub rf_half_frequency: f64,
    pub rf_phase: f64,
    pub source_rate: f64,
}

impl BeamlineConfig {
    pub fn new(
        rf_frequency: f64,
        rf_half_frequency: f64,
        rf_phase: f64,
        source_rate: f64,
    ) -> Result<Self, BeamlineError> {
        if !rf_phase.is_finite() {
            return Err(BeamlineError::NonFiniteField("rf_phase"));
        }
        if !source_rate.is_finite() || source_rate < 0.0 {
            return Err(BeamlineError::NonFiniteField("source_rate"));
        }
        let half = rf_frequency / 2.0;
        if (rf_half_frequency - half).abs() > 1e-9 * half.abs().max(1.0) {
            return Err(BeamlineError::FrequencyMismatch {
                rf: rf_frequency,
                half: rf_half_frequency,
            });
        }
        Ok(Self {
            rf_frequency,
            rf_half_frequency,
            rf_phase,
            source_rate,
        })
    }

    /// Same configuration with a different flipper phase.
    pub fn with_rf_phase(mut self, rf_phase: f64) -> Self {
        self.rf_phase = rf_phase;
        self
    }
}

impl Default for BeamlineConfig {
    fn default() -> Self {
        Self {
            rf_frequency: 58_000.0,
            rf_half_frequency: 29_000.0,
            rf_phase: 0.0,
            source_rate: 2_000.0,
        }
    }
}

/// The three tunable phases of one measurement setting: α on the spin,
/// χ on the path, γ on the energy degree of freedom.
///
/// Values are stored unreduced; comparisons go through
/// [`congruent_mod_2pi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSettings {
    pub alpha: f64,
    pub chi: f64,
    pub gamma: f64,
}

impl PhaseSettings {
    pub fn new(alpha: f64, chi: f64, gamma: f64) -> Result<Self, BeamlineError> {
        for (value, name) in [(alpha, "alpha"), (chi, "chi"), (gamma, "gamma")] {
            if !value.is_finite() {
                return Err(BeamlineError::NonFiniteField(name));
            }
        }
        Ok(Self { alpha, chi, gamma })
    }
}

/// Whether two angles agree modulo 2π within `tol`.
pub fn congruent_mod_2pi(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d <= tol || (TAU - d) <= tol
}

/// Description of one path-phase scan at fixed (α, γ).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPlan {
    pub alpha: f64,
    pub gamma: f64,
    /// Strictly increasing χ sample points.
    pub chi_grid: Vec<f64>,
    /// Expected counts per scan point at mean intensity.
    pub counts_per_point: u32,
    pub visibility: f64,
    pub seed: u64,
}

impl ScanPlan {
    pub fn new(
        alpha: f64,
        gamma: f64,
        chi_grid: Vec<f64>,
        counts_per_point: u32,
        visibility: f64,
        seed: u64,
    ) -> Result<Self, BeamlineError> {
        for (value, name) in [(alpha, "alpha"), (gamma, "gamma")] {
            if !value.is_finite() {
                return Err(BeamlineError::NonFiniteField(name));
            }
        }
        if chi_grid.is_empty() || chi_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BeamlineError::BadChiGrid);
        }
        if !(0.0..=1.0).contains(&visibility) || !visibility.is_finite() {
            return Err(BeamlineError::BadVisibility(visibility));
        }
        if counts_per_point == 0 {
            return Err(BeamlineError::BadCounts);
        }
        Ok(Self {
            alpha,
            gamma,
            chi_grid,
            counts_per_point,
            visibility,
            seed,
        })
    }

    /// `n` equally spaced χ points over [0, 2π).
    pub fn uniform_chi_grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64 * TAU / n as f64).collect()
    }

    /// Intensity normalization: the mean detection probability over a fringe
    /// is 1/8, so a source rate of 8 × counts_per_point makes the fitted
    /// offset equal counts_per_point.
    pub fn source_rate(&self) -> f64 {
        8.0 * f64::from(self.counts_per_point)
    }
}

/// Prepares the GHZ-like state: beam splitter on the path, then the RF
/// flipper acting on the path-II component only.
///
/// With φ = `config.rf_phase` the output is (|000⟩ + e^{iφ}|111⟩)/√2, which
/// for φ = 0 is the plus-sign GHZ state.
pub fn prepare_neutron_ghz(config: &BeamlineConfig) -> PureState {
    let splitter = path_beam_splitter();
    let flipper = rf_flip_on_path_two(config.rf_phase);
    let entered = PureState::basis(0);
    let split = splitter.apply(&entered).expect("beam splitter is unitary");
    flipper.apply(&split).expect("RF flipper is unitary")
}

/// 50/50 beam splitter on the path: |I⟩ ↦ (|I⟩+|II⟩)/√2.
pub fn path_beam_splitter() -> TripleOp {
    let h = SingleQubitOp::unitary([
        [c64(INV_SQRT_2, 0.0), c64(INV_SQRT_2, 0.0)],
        [c64(INV_SQRT_2, 0.0), c64(-INV_SQRT_2, 0.0)],
    ])
    .expect("Hadamard is unitary");
    embed(DofIndex::Path, &h)
}

/// RF flipper inserted in path II: |↑,E₀⟩ ↦ e^{iφ}|↓,E₀−ħω⟩ on the path-II
/// component, identity on path I.
pub fn rf_flip_on_path_two(phi: f64) -> TripleOp {
    let mut entries = [[c64(0.0, 0.0); DIM]; DIM];
    // basis index b = 4s + 2p + e; the flip exchanges (s,e) = (0,0) ↔ (1,1)
    // within p = 1, i.e. indices 2 and 7
    for (b, row) in entries.iter_mut().enumerate() {
        if b != 2 && b != 7 {
            row[b] = c64(1.0, 0.0);
        }
    }
    entries[7][2] = c64(phi.cos(), phi.sin());
    entries[2][7] = c64(phi.cos(), -phi.sin());
    TripleOp::unitary(entries).expect("RF flip is unitary")
}

/// Relative-phase unitary diag(1, e^{iθ}) on the chosen degree of freedom.
pub fn phase_unitary(dof: DofIndex, theta: f64) -> TripleOp {
    assert!(theta.is_finite(), "phase angle must be finite");
    let u = SingleQubitOp::unitary([
        [c64(1.0, 0.0), c64(0.0, 0.0)],
        [c64(0.0, 0.0), c64(theta.cos(), theta.sin())],
    ])
    .expect("relative phase is unitary");
    embed(dof, &u)
}

/// Joint projector onto the +1 outcomes of the three in-plane observables
/// at angles (α, χ, γ).
pub fn joint_plus_projector(settings: &PhaseSettings) -> TripleOp {
    tensor3(
        &plus_projector(settings.alpha),
        &plus_projector(settings.chi),
        &plus_projector(settings.gamma),
    )
}

/// Probability of detecting the joint + outcome at the given phase settings.
///
/// For the dephased plus-sign GHZ state this is (1 + V·cos(α+χ+γ))/8.
pub fn detection_probability(
    rho: &DensityMatrix,
    settings: &PhaseSettings,
) -> Result<f64, QcoreError> {
    let p = expectation(rho, &joint_plus_projector(settings))?;
    // the trace is in [0, 1] up to rounding; snap excursions within the
    // derived tolerance back to the boundary so exact fringe nodes stay
    // nonnegative
    if (-TOL_DERIVED..0.0).contains(&p) {
        return Ok(0.0);
    }
    if (1.0..1.0 + TOL_DERIVED).contains(&p) {
        return Ok(1.0);
    }
    Ok(p)
}

/// Noise-free expected intensity over the scan's χ grid.
///
/// Each point is `source_rate × detection probability`; for the V-dephased
/// GHZ family the curve is `source_rate·(1 + V·cos(α+χ+γ))/8`.
pub fn ideal_intensity_curve(
    plan: &ScanPlan,
    rho: &DensityMatrix,
) -> Result<Vec<(f64, f64)>, QcoreError> {
    let rate = plan.source_rate();
    plan.chi_grid
        .iter()
        .map(|&chi| {
            let settings = PhaseSettings {
                alpha: plan.alpha,
                chi,
                gamma: plan.gamma,
            };
            detection_probability(rho, &settings).map(|p| (chi, rate * p))
        })
        .collect()
}
