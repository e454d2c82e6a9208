//! Noise channels and counting statistics for the Monte Carlo simulation.
//!
//! Contrast loss is modeled as GHZ-coherence dephasing: every off-diagonal
//! entry connecting basis states that differ in all three labels is scaled
//! by the fringe visibility V. On the GHZ family this reproduces the
//! experiment's phenomenology exactly — sinusoids with contrast V and a
//! Mermin sum of 4V. A depolarizing channel is provided for comparison
//! studies, and neutron detection is sampled as a Poisson process on
//! reproducible per-scan random streams.

use crate::qcore::{c64, DensityMatrix, QcoreError, DIM};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use std::fmt;

/// Errors raised by the noise channels and samplers.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseError {
    /// Visibility outside [0, 1].
    InvalidVisibility(f64),
    /// Depolarizing weight outside [0, 1].
    InvalidMixing(f64),
    /// Poisson mean negative or non-finite.
    InvalidMean(f64),
    /// Channel output failed density-matrix validation.
    InvalidState(QcoreError),
}

impl fmt::Display for NoiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseError::InvalidVisibility(v) => {
                write!(f, "visibility {v} outside [0, 1]")
            }
            NoiseError::InvalidMixing(l) => {
                write!(f, "depolarizing weight {l} outside [0, 1]")
            }
            NoiseError::InvalidMean(m) => {
                write!(f, "Poisson mean {m} must be finite and nonnegative")
            }
            NoiseError::InvalidState(e) => write!(f, "channel produced an invalid state: {e}"),
        }
    }
}

impl std::error::Error for NoiseError {}

impl From<QcoreError> for NoiseError {
    fn from(e: QcoreError) -> Self {
        NoiseError::InvalidState(e)
    }
}

/// Fringe visibility (contrast) of the interferograms, in [0, 1].
///
/// The default is derived from the reported Mermin sum through the
/// linearity M = 4V of the dephased-GHZ family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityModel {
    v: f64,
}

/// Visibility reproducing the experiment's headline Mermin sum (M/4).
pub const DEFAULT_VISIBILITY: f64 = 0.6395;

impl VisibilityModel {
    pub fn new(v: f64) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&v) || !v.is_finite() {
            return Err(NoiseError::InvalidVisibility(v));
        }
        Ok(Self { v })
    }

    pub fn value(self) -> f64 {
        self.v
    }

    /// Applies the GHZ-dephasing channel at this visibility.
    pub fn apply(self, rho: &DensityMatrix) -> Result<DensityMatrix, NoiseError> {
        dephase_entries(rho, self.v)
    }
}

impl Default for VisibilityModel {
    fn default() -> Self {
        Self {
            v: DEFAULT_VISIBILITY,
        }
    }
}

fn dephase_entries(rho: &DensityMatrix, v: f64) -> Result<DensityMatrix, NoiseError> {
    let mut entries = *rho.entries();
    for (i, row) in entries.iter_mut().enumerate() {
        // basis states differing in all three labels sit at antipodal
        // indices j = 7 − i; the diagonal is untouched
        let j = (DIM - 1) - i;
        if i != j {
            row[j] *= c64(v, 0.0);
        }
    }
    Ok(DensityMatrix::try_new(entries)?)
}

/// Scales the coherences between basis states that differ in all three
/// labels (spin, path and energy) by the visibility `v`.
///
/// Identity at V = 1; at V = 0 the GHZ state collapses to the classical
/// mixture (|000⟩⟨000| + |111⟩⟨111|)/2.
pub fn ghz_dephase(rho: &DensityMatrix, v: f64) -> Result<DensityMatrix, NoiseError> {
    VisibilityModel::new(v)?.apply(rho)
}

/// Depolarizing channel `(1−λ)·ρ + λ·I/8`.
pub fn depolarize(rho: &DensityMatrix, lambda: f64) -> Result<DensityMatrix, NoiseError> {
    if !(0.0..=1.0).contains(&lambda) || !lambda.is_finite() {
        return Err(NoiseError::InvalidMixing(lambda));
    }
    let mut entries = *rho.entries();
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry *= c64(1.0 - lambda, 0.0);
            if i == j {
                *entry += c64(lambda / DIM as f64, 0.0);
            }
        }
    }
    Ok(DensityMatrix::try_new(entries)?)
}

/// Identity of a reproducible random stream: the same (seed, stream) pair
/// yields the same draw sequence on every run and build.
///
/// Concurrent tasks must each own a distinct stream; no RNG state is shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Instantiates the generator positioned at the start of the stream.
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One Poisson draw with the given mean.
///
/// A zero mean yields zero counts deterministically.
pub fn poisson_counts<R: Rng + ?Sized>(expected: f64, rng: &mut R) -> Result<u64, NoiseError> {
    if !expected.is_finite() || expected < 0.0 {
        return Err(NoiseError::InvalidMean(expected));
    }
    if expected == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(expected).map_err(|_| NoiseError::InvalidMean(expected))?;
    let draw: f64 = dist.sample(rng);
    Ok(draw as u64)
}
