//! The data-analysis pipeline: weighted least-squares sinusoid fits of the
//! χ scans, extraction of product-observable expectation values at the four
//! χ lines, inverse-variance averaging, and the Mermin verdict.
//!
//! The fit model is `I(χ) = a₀ + a₁·cos(χ + φ₀)`, handled through the linear
//! reparametrization `a₀ + b·cos χ + c·sin χ` so the normal equations are
//! closed-form and globally optimal; `a₁ = √(b² + c²)`, `φ₀ = atan2(−c, b)`,
//! and the covariance is propagated through the reparametrization.
//!
//! Expectation values are read from the fitted curve, not the raw points:
//! for path axis x, `e = [Î(0) − Î(π)] / [Î(0) + Î(π)] = b/a₀`, and for
//! path axis y the lines χ = π/2, 3π/2 give `c/a₀`. Scans taken at the
//! π-shifted spin or energy settings determine the same observable with an
//! outcome sign flip and all redundant determinations are combined by
//! inverse-variance weighting.

use crate::beamline::congruent_mod_2pi;
use crate::ghz_logic::{InPlaneAxis, MerminTerm};
use std::f64::consts::{PI, TAU};
use std::fmt;

/// Minimum number of points for an identifiable three-parameter fit.
pub const MIN_SCAN_POINTS: usize = 5;

/// Tolerance when matching scan settings to the quadrant angles.
const ANGLE_TOL: f64 = 1e-9;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisError {
    TooFewPoints {
        got: usize,
    },
    /// χ points do not cover a full fringe period at their own resolution.
    ChiSpanTooSmall {
        span: f64,
        required: f64,
    },
    NonIncreasingChi,
    BadCounts {
        counts: f64,
    },
    /// The normal-equation matrix is numerically singular, e.g. all χ equal
    /// modulo 2π.
    DegenerateDesign,
    NonPositiveOffset {
        offset: f64,
    },
    /// Fitted contrast exceeds 1 beyond statistical overshoot.
    ContrastOutOfRange {
        contrast: f64,
        sigma: f64,
    },
    /// No scan in the collection matches the settings this term requires.
    MissingSetting {
        term: MerminTerm,
    },
    /// Î(β) + Î(β+π) vanished — a corrupt fit.
    ZeroDenominator {
        scan_id: usize,
    },
    EmptyInput,
    MismatchedLengths {
        values: usize,
        sigmas: usize,
    },
    NonPositiveSigma {
        sigma: f64,
    },
    EstimateOutOfRange {
        value: f64,
        sigma: f64,
    },
    DuplicateTerm {
        term: MerminTerm,
    },
    MissingTerm {
        term: MerminTerm,
    },
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::TooFewPoints { got } => {
                write!(f, "scan has {got} points, need at least {MIN_SCAN_POINTS}")
            }
            AnalysisError::ChiSpanTooSmall { span, required } => {
                write!(
                    f,
                    "chi span {span:.4} rad covers less than the required {required:.4} rad"
                )
            }
            AnalysisError::NonIncreasingChi => write!(f, "chi points must be strictly increasing"),
            AnalysisError::BadCounts { counts } => {
                write!(f, "counts {counts} must be finite and nonnegative")
            }
            AnalysisError::DegenerateDesign => {
                write!(
                    f,
                    "degenerate design matrix (chi points indistinguishable modulo 2π)"
                )
            }
            AnalysisError::NonPositiveOffset { offset } => {
                write!(f, "fitted offset {offset} is not positive")
            }
            AnalysisError::ContrastOutOfRange { contrast, sigma } => {
                write!(
                    f,
                    "fitted contrast {contrast:.4} exceeds 1 + 3σ (σ = {sigma:.4})"
                )
            }
            AnalysisError::MissingSetting { term } => {
                write!(
                    f,
                    "no scan provides the (α, γ) settings required by term {term}"
                )
            }
            AnalysisError::ZeroDenominator { scan_id } => {
                write!(f, "scan {scan_id}: fitted line intensities sum to zero")
            }
            AnalysisError::EmptyInput => write!(f, "empty input"),
            AnalysisError::MismatchedLengths { values, sigmas } => {
                write!(f, "{values} values but {sigmas} sigmas")
            }
            AnalysisError::NonPositiveSigma { sigma } => {
                write!(f, "sigma {sigma} must be positive")
            }
            AnalysisError::EstimateOutOfRange { value, sigma } => {
                write!(
                    f,
                    "estimate {value:.4} ± {sigma:.4} outside the physical range"
                )
            }
            AnalysisError::DuplicateTerm { term } => {
                write!(f, "duplicate estimate for term {term}")
            }
            AnalysisError::MissingTerm { term } => write!(f, "missing estimate for term {term}"),
        }
    }
}

impl std::error::Error for AnalysisError {}

/// One sampled scan point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub chi: f64,
    /// Detected counts; integer-valued when Poisson-sampled, the raw
    /// expected intensity in noiseless mode.
    pub counts: f64,
    /// Counting error √max(counts, 1).
    pub count_error: f64,
}

impl ScanPoint {
    pub fn from_counts(chi: f64, counts: f64) -> Result<Self, AnalysisError> {
        if !counts.is_finite() || counts < 0.0 {
            return Err(AnalysisError::BadCounts { counts });
        }
        Ok(Self {
            chi,
            counts,
            count_error: counts.max(1.0).sqrt(),
        })
    }
}

/// One recorded χ scan at fixed (α, γ).
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub alpha: f64,
    pub gamma: f64,
    pub points: Vec<ScanPoint>,
}

impl ScanResult {
    /// Validates the fit-identifiability invariants: at least
    /// [`MIN_SCAN_POINTS`] strictly increasing points covering a full 2π
    /// period at the grid's own resolution.
    pub fn new(alpha: f64, gamma: f64, points: Vec<ScanPoint>) -> Result<Self, AnalysisError> {
        let n = points.len();
        if n < MIN_SCAN_POINTS {
            return Err(AnalysisError::TooFewPoints { got: n });
        }
        if points.windows(2).any(|w| w[0].chi >= w[1].chi) {
            return Err(AnalysisError::NonIncreasingChi);
        }
        let span = points[n - 1].chi - points[0].chi;
        let required = TAU * (n as f64 - 1.0) / n as f64;
        if span < required - 1e-9 {
            return Err(AnalysisError::ChiSpanTooSmall { span, required });
        }
        Ok(Self {
            alpha,
            gamma,
            points,
        })
    }
}

/// Result of fitting `I(χ) = a₀ + a₁·cos(χ + φ₀)` to one scan.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Mean intensity a₀ (counts).
    pub offset: f64,
    /// Fringe amplitude a₁ ≥ 0 (counts).
    pub amplitude: f64,
    /// Phase φ₀ in radians.
    pub phase: f64,
    /// Covariance of (a₀, a₁, φ₀).
    pub covariance: [[f64; 3]; 3],
    /// Contrast C = a₁/a₀.
    pub contrast: f64,
    /// Weighted residual χ² per degree of freedom.
    pub chi2_per_dof: f64,
    /// False when a₁ is consistent with zero (within 3σ).
    pub amplitude_identifiable: bool,
}

impl FitResult {
    /// Fitted intensity at an arbitrary χ.
    pub fn intensity(&self, chi: f64) -> f64 {
        self.offset + self.amplitude * (chi + self.phase).cos()
    }

    pub fn sigma_offset(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }

    pub fn sigma_amplitude(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }

    pub fn sigma_phase(&self) -> f64 {
        self.covariance[2][2].max(0.0).sqrt()
    }
}

/// Inverse of a symmetric 3×3 matrix by cofactors, `None` when numerically
/// singular relative to its row scale.
fn invert_sym3(s: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let (a, b, c) = (s[0][0], s[0][1], s[0][2]);
    let (d, e, f) = (s[1][1], s[1][2], s[2][2]);
    let c00 = d * f - e * e;
    let c01 = c * e - b * f;
    let c02 = b * e - c * d;
    let det = a * c00 + b * c01 + c * c02;
    let row0 = a.abs() + b.abs() + c.abs();
    let row1 = b.abs() + d.abs() + e.abs();
    let row2 = c.abs() + e.abs() + f.abs();
    let bound = (row0 * row1 * row2).max(f64::MIN_POSITIVE);
    if !det.is_finite() || det.abs() <= 1e-12 * bound {
        return None;
    }
    let inv = [
        [c00 / det, c01 / det, c02 / det],
        [c01 / det, (a * f - c * c) / det, (b * c - a * e) / det],
        [c02 / det, (b * c - a * e) / det, (a * d - b * b) / det],
    ];
    Some(inv)
}

/// One weighted least-squares pass for (a₀, b, c); returns the solution and
/// its covariance (XᵀWX)⁻¹.
#[allow(clippy::needless_range_loop)]
fn wls_pass(
    points: &[ScanPoint],
    weights: &[f64],
) -> Result<([f64; 3], [[f64; 3]; 3]), AnalysisError> {
    let mut s = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (p, &w) in points.iter().zip(weights.iter()) {
        let x = [1.0, p.chi.cos(), p.chi.sin()];
        for i in 0..3 {
            rhs[i] += w * p.counts * x[i];
            for j in i..3 {
                s[i][j] += w * x[i] * x[j];
            }
        }
    }
    for i in 0..3 {
        for j in 0..i {
            s[i][j] = s[j][i];
        }
    }
    let cov = invert_sym3(&s).ok_or(AnalysisError::DegenerateDesign)?;
    let mut theta = [0.0f64; 3];
    for i in 0..3 {
        for j in 0..3 {
            theta[i] += cov[i][j] * rhs[j];
        }
    }
    Ok((theta, cov))
}

/// Weighted least-squares sinusoid fit of one scan.
///
/// A first pass seeded with the recorded counting errors is refined by one
/// pass with model-based Poisson weights 1/max(Î, 1); weights taken from the
/// observed counts alone correlate with the noise and bias the offset low by
/// about one count.
pub fn fit_sinusoid(scan: &ScanResult) -> Result<FitResult, AnalysisError> {
    let n = scan.points.len();
    let w_observed: Vec<f64> = scan
        .points
        .iter()
        .map(|p| 1.0 / (p.count_error * p.count_error))
        .collect();
    let (seed, _) = wls_pass(&scan.points, &w_observed)?;

    let w_model: Vec<f64> = scan
        .points
        .iter()
        .map(|p| {
            let predicted = seed[0] + seed[1] * p.chi.cos() + seed[2] * p.chi.sin();
            1.0 / predicted.max(1.0)
        })
        .collect();
    let ([a0, b, c], cov_lin) = wls_pass(&scan.points, &w_model)?;

    if a0 <= 0.0 {
        return Err(AnalysisError::NonPositiveOffset { offset: a0 });
    }

    let amplitude = b.hypot(c);
    let phase = if amplitude > 0.0 { (-c).atan2(b) } else { 0.0 };

    // covariance of (a₀, a₁, φ₀) via the Jacobian of the reparametrization
    let cov = if amplitude > 1e-12 * a0.max(1.0) {
        let j = [
            [1.0, 0.0, 0.0],
            [0.0, b / amplitude, c / amplitude],
            [
                0.0,
                c / (amplitude * amplitude),
                -b / (amplitude * amplitude),
            ],
        ];
        congruence(&j, &cov_lin)
    } else {
        // a₁ consistent with zero: the amplitude error is the in-plane
        // coefficient spread, the phase is unconstrained
        let mut cov = [[0.0f64; 3]; 3];
        cov[0][0] = cov_lin[0][0];
        cov[1][1] = cov_lin[1][1].max(cov_lin[2][2]);
        cov[2][2] = PI * PI / 3.0;
        cov
    };

    let mut chi2 = 0.0;
    for (p, &w) in scan.points.iter().zip(w_model.iter()) {
        let fitted = a0 + b * p.chi.cos() + c * p.chi.sin();
        chi2 += w * (p.counts - fitted) * (p.counts - fitted);
    }
    let chi2_per_dof = chi2 / (n as f64 - 3.0);

    let contrast = amplitude / a0;
    let sigma_contrast = {
        let g = [-amplitude / (a0 * a0), 1.0 / a0, 0.0];
        quad_form(&g, &cov).max(0.0).sqrt()
    };
    if contrast > 1.0 + 3.0 * sigma_contrast + 1e-9 {
        return Err(AnalysisError::ContrastOutOfRange {
            contrast,
            sigma: sigma_contrast,
        });
    }

    let sigma_amplitude = cov[1][1].max(0.0).sqrt();
    Ok(FitResult {
        offset: a0,
        amplitude,
        phase,
        covariance: cov,
        contrast,
        chi2_per_dof,
        amplitude_identifiable: amplitude > 3.0 * sigma_amplitude,
    })
}

fn congruence(j: &[[f64; 3]; 3], c: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut jc = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                jc[i][k] += j[i][l] * c[l][k];
            }
        }
    }
    let mut out = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                out[i][k] += jc[i][l] * j[k][l];
            }
        }
    }
    out
}

fn quad_form(g: &[f64; 3], c: &[[f64; 3]; 3]) -> f64 {
    let mut sum = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            sum += g[i] * c[i][j] * g[j];
        }
    }
    sum
}

/// A fitted scan tagged with its settings, the unit the extraction consumes.
#[derive(Debug, Clone)]
pub struct ScanFit {
    pub scan_id: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub fit: FitResult,
}

/// Pointer to a scan that contributed to an estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRef {
    pub scan_id: usize,
    pub alpha: f64,
    pub gamma: f64,
}

/// One extracted product-observable expectation value with its error.
#[derive(Debug, Clone)]
pub struct ExpectationEstimate {
    pub value: f64,
    pub sigma: f64,
    pub term: MerminTerm,
    pub provenance: Vec<ScanRef>,
}

impl ExpectationEstimate {
    pub fn new(value: f64, sigma: f64, term: MerminTerm) -> Result<Self, AnalysisError> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(AnalysisError::NonPositiveSigma { sigma });
        }
        if !value.is_finite() || value.abs() > 1.0 + 3.0 * sigma + 1e-9 {
            return Err(AnalysisError::EstimateOutOfRange { value, sigma });
        }
        Ok(Self {
            value,
            sigma,
            term,
            provenance: Vec::new(),
        })
    }
}

/// Sign carried by a π-shifted setting relative to its base quadrant, or
/// `None` when the angle selects a different axis.
fn setting_sign(angle: f64, axis: InPlaneAxis) -> Option<f64> {
    let base = axis.angle();
    if congruent_mod_2pi(angle, base, ANGLE_TOL) {
        Some(1.0)
    } else if congruent_mod_2pi(angle, base + PI, ANGLE_TOL) {
        Some(-1.0)
    } else {
        None
    }
}

/// Extracts one expectation value from every fitted scan whose (α, γ)
/// setting determines the given term, combining the redundant
/// determinations by inverse-variance weighting.
pub fn extract_expectation(
    fits: &[ScanFit],
    term: MerminTerm,
) -> Result<ExpectationEstimate, AnalysisError> {
    let [spin_axis, path_axis, energy_axis] = term.axes();
    let beta = path_axis.angle();

    let mut values = Vec::new();
    let mut sigmas = Vec::new();
    let mut provenance = Vec::new();
    for sf in fits {
        let (Some(sign_alpha), Some(sign_gamma)) = (
            setting_sign(sf.alpha, spin_axis),
            setting_sign(sf.gamma, energy_axis),
        ) else {
            continue;
        };
        let fit = &sf.fit;
        let line_sum = fit.intensity(beta) + fit.intensity(beta + PI);
        if line_sum <= 0.0 {
            return Err(AnalysisError::ZeroDenominator {
                scan_id: sf.scan_id,
            });
        }
        // [Î(β) − Î(β+π)] / [Î(β) + Î(β+π)] = (a₁/a₀)·cos(β + φ₀)
        let cos_line = (beta + fit.phase).cos();
        let sin_line = (beta + fit.phase).sin();
        let raw = fit.amplitude / fit.offset * cos_line;
        let g = [
            -fit.amplitude * cos_line / (fit.offset * fit.offset),
            cos_line / fit.offset,
            -fit.amplitude / fit.offset * sin_line,
        ];
        let variance = quad_form(&g, &fit.covariance);
        values.push(sign_alpha * sign_gamma * raw);
        sigmas.push(variance.max(1e-30).sqrt());
        provenance.push(ScanRef {
            scan_id: sf.scan_id,
            alpha: sf.alpha,
            gamma: sf.gamma,
        });
    }

    if values.is_empty() {
        return Err(AnalysisError::MissingSetting { term });
    }
    let (value, sigma) = weighted_average(&values, &sigmas)?;
    let mut estimate = ExpectationEstimate::new(value, sigma, term)?;
    estimate.provenance = provenance;
    Ok(estimate)
}

/// Inverse-variance weighted mean and its error 1/√(Σ 1/σᵢ²).
pub fn weighted_average(values: &[f64], sigmas: &[f64]) -> Result<(f64, f64), AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if values.len() != sigmas.len() {
        return Err(AnalysisError::MismatchedLengths {
            values: values.len(),
            sigmas: sigmas.len(),
        });
    }
    let mut weight_sum = 0.0;
    let mut weighted_value = 0.0;
    for (&v, &s) in values.iter().zip(sigmas.iter()) {
        if !s.is_finite() || s <= 0.0 {
            return Err(AnalysisError::NonPositiveSigma { sigma: s });
        }
        let w = 1.0 / (s * s);
        weight_sum += w;
        weighted_value += w * v;
    }
    Ok((weighted_value / weight_sum, 1.0 / weight_sum.sqrt()))
}

/// The Mermin report: the four estimates, the signed sum, its error, and
/// the bound verdict.
#[derive(Debug, Clone)]
pub struct MerminReport {
    /// Ordered as [`MerminTerm::ALL`].
    pub estimates: [ExpectationEstimate; 4],
    pub m: f64,
    pub sigma_m: f64,
    pub significance_k: f64,
    /// |M| > 2 + k·σ_M.
    pub nchv_violated: bool,
}

impl MerminReport {
    pub const NCHV_BOUND: f64 = 2.0;
    pub const QUANTUM_BOUND: f64 = 4.0;

    pub fn estimate(&self, term: MerminTerm) -> &ExpectationEstimate {
        &self.estimates[MerminTerm::ALL.iter().position(|&t| t == term).unwrap()]
    }
}

/// Default significance multiplier for the bound verdict.
pub const DEFAULT_SIGNIFICANCE_K: f64 = 3.0;

/// Combines the four expectation estimates into the Mermin sum
/// `M = E[xxx] − E[xyy] − E[yxy] − E[yyx]` with errors in quadrature,
/// using the default significance multiplier.
pub fn mermin_from_expectations(
    estimates: &[ExpectationEstimate],
) -> Result<MerminReport, AnalysisError> {
    mermin_from_expectations_with(estimates, DEFAULT_SIGNIFICANCE_K)
}

/// As [`mermin_from_expectations`] with an explicit significance multiplier.
pub fn mermin_from_expectations_with(
    estimates: &[ExpectationEstimate],
    significance_k: f64,
) -> Result<MerminReport, AnalysisError> {
    let mut ordered: [Option<ExpectationEstimate>; 4] = [None, None, None, None];
    for estimate in estimates {
        let slot = MerminTerm::ALL
            .iter()
            .position(|&t| t == estimate.term)
            .expect("MerminTerm::ALL is exhaustive");
        if ordered[slot].is_some() {
            return Err(AnalysisError::DuplicateTerm {
                term: estimate.term,
            });
        }
        ordered[slot] = Some(estimate.clone());
    }
    for (slot, term) in MerminTerm::ALL.iter().enumerate() {
        if ordered[slot].is_none() {
            return Err(AnalysisError::MissingTerm { term: *term });
        }
    }
    let estimates = ordered.map(|e| e.expect("checked above"));
    let m: f64 = estimates.iter().map(|e| e.term.sign() * e.value).sum();
    let sigma_m = estimates
        .iter()
        .map(|e| e.sigma * e.sigma)
        .sum::<f64>()
        .sqrt();
    let nchv_violated = m.abs() > MerminReport::NCHV_BOUND + significance_k * sigma_m;
    Ok(MerminReport {
        estimates,
        m,
        sigma_m,
        significance_k,
        nchv_violated,
    })
}
