//! Simulator and analysis toolkit for the single-neutron tripartite
//! (spin ⊗ path ⊗ energy) GHZ experiment.
//!
//! The crate has two halves:
//!
//! * an exact logical core ([`qcore`], [`ghz_logic`]) for the 8-dimensional
//!   quantum model — GHZ states, Pauli product observables, the Mermin
//!   operator, and the exhaustive noncontextual hidden-variable check;
//! * an experiment model ([`beamline`], [`noise`], [`analysis`],
//!   [`experiment`]) that simulates interferometer path-phase scans under a
//!   visibility/counting-noise model and runs the fitting-and-extraction
//!   pipeline to the final Mermin sum.
//!
//! The `parallel` feature (on by default) runs independent scans and Monte
//! Carlo repetitions on a rayon pool; disabling it yields a sequential build
//! with bit-identical output.
//!
//! ```
//! use neutron_ghz::{densify, ghz_dephase, ghz_state, mermin_value, GhzSign};
//! use neutron_ghz::{run_experiment, ExperimentConfig};
//!
//! // the ideal GHZ state saturates the quantum bound of 4
//! let ghz = densify(&ghz_state(GhzSign::Plus)).unwrap();
//! assert!((mermin_value(&ghz).unwrap() - 4.0).abs() < 1e-12);
//!
//! // dephasing to visibility V scales the Mermin sum to 4V, and the full
//! // noiseless scan-and-fit pipeline recovers the same number
//! let dephased = ghz_dephase(&ghz, 0.6395).unwrap();
//! assert!((mermin_value(&dephased).unwrap() - 2.558).abs() < 1e-3);
//! let cfg = ExperimentConfig { noiseless: true, ..ExperimentConfig::default() };
//! let outcome = run_experiment(&cfg).unwrap();
//! assert!((outcome.report.m - 2.558).abs() < 1e-3);
//! assert!(outcome.report.nchv_violated);
//! ```

pub mod analysis;
pub mod beamline;
pub mod experiment;
pub mod ghz_logic;
pub mod noise;
pub mod qcore;

pub use analysis::{
    fit_sinusoid, mermin_from_expectations, weighted_average, ExpectationEstimate, FitResult,
    MerminReport, ScanFit, ScanPoint, ScanResult,
};
pub use beamline::{
    detection_probability, ideal_intensity_curve, phase_unitary, prepare_neutron_ghz,
    BeamlineConfig, PhaseSettings, ScanPlan,
};
pub use experiment::{run_experiment, simulate_dataset, ExperimentConfig, SimulatedScan};
pub use ghz_logic::{
    check_eigenrelations, enumerate_nchv, ghz_state, mermin_operator, mermin_value, GhzSign,
    InPlaneAxis, MerminTerm, NchvAssignment,
};
pub use noise::{depolarize, ghz_dephase, poisson_counts, RngStream, VisibilityModel};
pub use qcore::{
    densify, expectation, in_plane_observable, pauli, tensor3, DensityMatrix, DofIndex, PauliAxis,
    PureState, SingleQubitOp, TripleOp,
};
