//! Exact complex linear algebra for three two-level subsystems.
//!
//! Everything lives in the fixed 8-dimensional product space spin ⊗ path ⊗
//! energy with basis index `b = 4s + 2p + e` (spin-major). The label
//! conventions are `s = 0 ↔ |↑⟩`, `p = 0 ↔ |I⟩`, `e = 0 ↔ |E₀⟩` and
//! `s = 1 ↔ |↓⟩`, `p = 1 ↔ |II⟩`, `e = 1 ↔ |E₀−ħω⟩`.
//!
//! The problem size is constant and tiny, so matrices are plain dense
//! `[[Complex64; N]; N]` arrays and the Hermitian eigensolver is a cyclic
//! Jacobi iteration on the 16×16 real symmetric embedding.

// index loops over both dimensions of small fixed matrices read better
// than iterator chains here
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

/// Dimension of the full spin ⊗ path ⊗ energy space.
pub const DIM: usize = 8;

/// Tolerance for construction invariants (unitarity, hermiticity, norm, trace).
pub const TOL_CONSTRUCT: f64 = 1e-12;

/// Tolerance for derived checks (positivity, idempotency, realness of traces).
pub const TOL_DERIVED: f64 = 1e-10;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One of the three two-level degrees of freedom of a single neutron.
///
/// The tensor ordering is fixed: spin is the most significant basis bit,
/// energy the least significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DofIndex {
    Spin,
    Path,
    Energy,
}

impl DofIndex {
    pub const ALL: [DofIndex; 3] = [DofIndex::Spin, DofIndex::Path, DofIndex::Energy];

    /// Tensor slot of this degree of freedom (0 = most significant bit).
    pub fn slot(self) -> usize {
        match self {
            DofIndex::Spin => 0,
            DofIndex::Path => 1,
            DofIndex::Energy => 2,
        }
    }
}

impl fmt::Display for DofIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DofIndex::Spin => "spin",
            DofIndex::Path => "path",
            DofIndex::Energy => "energy",
        };
        write!(f, "{name}")
    }
}

/// Axis selector for the standard Pauli matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Structural tag carried by operator values.
///
/// `Unitary` and `Observable` are validated at construction (`U†U = I`
/// resp. `O = O†` within [`TOL_CONSTRUCT`]); `General` makes no claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Unitary,
    Observable,
    General,
}

/// Errors raised by state and operator validation.
#[derive(Debug, Clone, PartialEq)]
pub enum QcoreError {
    /// `U†U` deviates from the identity by more than the tolerance.
    NotUnitary { deviation: f64 },
    /// The matrix deviates from its conjugate transpose.
    NotHermitian { deviation: f64 },
    /// State vector norm deviates from 1.
    NotNormalized { deviation: f64 },
    /// Density matrix trace deviates from 1.
    BadTrace { deviation: f64 },
    /// Density matrix has an eigenvalue below the positivity floor.
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for QcoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QcoreError::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary (|U†U − I| = {deviation:.3e})")
            }
            QcoreError::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (|O − O†| = {deviation:.3e})")
            }
            QcoreError::NotNormalized { deviation } => {
                write!(f, "state is not normalized (|⟨ψ|ψ⟩ − 1| = {deviation:.3e})")
            }
            QcoreError::BadTrace { deviation } => {
                write!(f, "density matrix trace deviates from 1 by {deviation:.3e}")
            }
            QcoreError::NotPositive { min_eigenvalue } => {
                write!(
                    f,
                    "density matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})"
                )
            }
        }
    }
}

impl std::error::Error for QcoreError {}

// ── 2×2 operators ────────────────────────────────────────────────────────────

/// A 2×2 complex operator acting on one degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitOp {
    entries: [[Complex64; 2]; 2],
    kind: OpKind,
}

impl SingleQubitOp {
    /// Builds an operator tagged unitary, validating `U†U = I`.
    pub fn unitary(entries: [[Complex64; 2]; 2]) -> Result<Self, QcoreError> {
        let dev = unitary_deviation_2(&entries);
        if dev > TOL_CONSTRUCT {
            return Err(QcoreError::NotUnitary { deviation: dev });
        }
        Ok(Self {
            entries,
            kind: OpKind::Unitary,
        })
    }

    /// Builds an operator tagged observable, validating hermiticity.
    pub fn observable(entries: [[Complex64; 2]; 2]) -> Result<Self, QcoreError> {
        let dev = hermitian_deviation_2(&entries);
        if dev > TOL_CONSTRUCT {
            return Err(QcoreError::NotHermitian { deviation: dev });
        }
        Ok(Self {
            entries,
            kind: OpKind::Observable,
        })
    }

    /// Builds an untagged operator without validation.
    pub fn general(entries: [[Complex64; 2]; 2]) -> Self {
        Self {
            entries,
            kind: OpKind::General,
        }
    }

    pub fn identity() -> Self {
        Self {
            entries: [
                [c64(1.0, 0.0), c64(0.0, 0.0)],
                [c64(0.0, 0.0), c64(1.0, 0.0)],
            ],
            kind: OpKind::Unitary,
        }
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self {
            entries: [
                [e[0][0].conj(), e[1][0].conj()],
                [e[0][1].conj(), e[1][1].conj()],
            ],
            kind: self.kind,
        }
    }

    /// Matrix product `self · rhs`. Unitarity survives products, hermiticity
    /// does not, so the result is tagged `General` unless both are unitary.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[c64(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry =
                    self.entries[i][0] * rhs.entries[0][j] + self.entries[i][1] * rhs.entries[1][j];
            }
        }
        let kind = match (self.kind, rhs.kind) {
            (OpKind::Unitary, OpKind::Unitary) => OpKind::Unitary,
            _ => OpKind::General,
        };
        Self { entries: out, kind }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = [[c64(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.entries[i][j] - rhs.entries[i][j];
            }
        }
        let kind = match (self.kind, rhs.kind) {
            (OpKind::Observable, OpKind::Observable) => OpKind::Observable,
            _ => OpKind::General,
        };
        Self { entries: out, kind }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.entries;
        for row in out.iter_mut() {
            for entry in row.iter_mut() {
                *entry *= factor;
            }
        }
        let kind = if factor.im == 0.0 && self.kind == OpKind::Observable {
            OpKind::Observable
        } else {
            OpKind::General
        };
        Self { entries: out, kind }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn is_unitary(&self) -> bool {
        unitary_deviation_2(&self.entries) <= TOL_CONSTRUCT
    }

    pub fn is_hermitian(&self) -> bool {
        hermitian_deviation_2(&self.entries) <= TOL_CONSTRUCT
    }

    /// Eigenvalues of a Hermitian 2×2 operator, ascending (closed form).
    pub fn hermitian_eigenvalues(&self) -> Result<[f64; 2], QcoreError> {
        let dev = hermitian_deviation_2(&self.entries);
        if dev > TOL_CONSTRUCT {
            return Err(QcoreError::NotHermitian { deviation: dev });
        }
        let a = self.entries[0][0].re;
        let d = self.entries[1][1].re;
        let mid = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + self.entries[0][1].norm_sqr()).sqrt();
        Ok([mid - radius, mid + radius])
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

fn hermitian_deviation_2(m: &[[Complex64; 2]; 2]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            dev = dev.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    dev
}

fn unitary_deviation_2(m: &[[Complex64; 2]; 2]) -> f64 {
    // (U†U)_{ij} = Σ_k conj(U_{ki}) U_{kj}
    let mut dev: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut sum = c64(0.0, 0.0);
            for row in m.iter() {
                sum += row[i].conj() * row[j];
            }
            let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            dev = dev.max((sum - target).norm());
        }
    }
    dev
}

/// The standard Pauli matrix on one two-level system.
///
/// Hermitian, unitary, traceless, eigenvalues ±1.
pub fn pauli(axis: PauliAxis) -> SingleQubitOp {
    let z = c64(0.0, 0.0);
    let entries = match axis {
        PauliAxis::X => [[z, c64(1.0, 0.0)], [c64(1.0, 0.0), z]],
        PauliAxis::Y => [[z, c64(0.0, -1.0)], [c64(0.0, 1.0), z]],
        PauliAxis::Z => [[c64(1.0, 0.0), z], [z, c64(-1.0, 0.0)]],
    };
    SingleQubitOp {
        entries,
        kind: OpKind::Observable,
    }
}

/// In-plane measurement observable `cos(θ)·σ_x + sin(θ)·σ_y`.
///
/// Hermitian with eigenvalues ±1 for every finite θ; θ = 0 selects σ_x and
/// θ = π/2 selects σ_y.
pub fn in_plane_observable(theta: f64) -> SingleQubitOp {
    assert!(theta.is_finite(), "in-plane angle must be finite");
    let z = c64(0.0, 0.0);
    // Entry (1,0) is e^{iθ}; the conjugate sits at (0,1).
    let phase = c64(theta.cos(), theta.sin());
    SingleQubitOp {
        entries: [[z, phase.conj()], [phase, z]],
        kind: OpKind::Observable,
    }
}

/// Projector onto the +1 eigenstate of [`in_plane_observable`]`(θ)`.
pub fn plus_projector(theta: f64) -> SingleQubitOp {
    assert!(theta.is_finite(), "in-plane angle must be finite");
    let half = c64(0.5, 0.0);
    let phase = c64(theta.cos(), theta.sin());
    SingleQubitOp {
        entries: [[half, half * phase.conj()], [half * phase, half]],
        kind: OpKind::Observable,
    }
}

// ── 8×8 operators ────────────────────────────────────────────────────────────

/// An 8×8 complex operator on the full spin ⊗ path ⊗ energy space.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleOp {
    entries: [[Complex64; DIM]; DIM],
    kind: OpKind,
}

impl TripleOp {
    pub fn unitary(entries: [[Complex64; DIM]; DIM]) -> Result<Self, QcoreError> {
        let dev = unitary_deviation_8(&entries);
        if dev > TOL_CONSTRUCT {
            return Err(QcoreError::NotUnitary { deviation: dev });
        }
        Ok(Self {
            entries,
            kind: OpKind::Unitary,
        })
    }

    pub fn observable(entries: [[Complex64; DIM]; DIM]) -> Result<Self, QcoreError> {
        let dev = hermitian_deviation_8(&entries);
        if dev > TOL_CONSTRUCT {
            return Err(QcoreError::NotHermitian { deviation: dev });
        }
        Ok(Self {
            entries,
            kind: OpKind::Observable,
        })
    }

    pub fn general(entries: [[Complex64; DIM]; DIM]) -> Self {
        Self {
            entries,
            kind: OpKind::General,
        }
    }

    pub fn identity() -> Self {
        let mut entries = [[c64(0.0, 0.0); DIM]; DIM];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = c64(1.0, 0.0);
        }
        Self {
            entries,
            kind: OpKind::Unitary,
        }
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[Complex64; DIM]; DIM] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut out = [[c64(0.0, 0.0); DIM]; DIM];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.entries[j][i].conj();
            }
        }
        Self {
            entries: out,
            kind: self.kind,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[c64(0.0, 0.0); DIM]; DIM];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let mut sum = c64(0.0, 0.0);
                for k in 0..DIM {
                    sum += self.entries[i][k] * rhs.entries[k][j];
                }
                *entry = sum;
            }
        }
        let kind = match (self.kind, rhs.kind) {
            (OpKind::Unitary, OpKind::Unitary) => OpKind::Unitary,
            _ => OpKind::General,
        };
        Self { entries: out, kind }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, 1.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, -1.0)
    }

    fn combine(&self, rhs: &Self, sign: f64) -> Self {
        let mut out = [[c64(0.0, 0.0); DIM]; DIM];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.entries[i][j] + rhs.entries[i][j] * sign;
            }
        }
        let kind = match (self.kind, rhs.kind) {
            (OpKind::Observable, OpKind::Observable) => OpKind::Observable,
            _ => OpKind::General,
        };
        Self { entries: out, kind }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.entries;
        for row in out.iter_mut() {
            for entry in row.iter_mut() {
                *entry *= factor;
            }
        }
        let kind = if factor.im == 0.0 && self.kind == OpKind::Observable {
            OpKind::Observable
        } else {
            OpKind::General
        };
        Self { entries: out, kind }
    }

    pub fn trace(&self) -> Complex64 {
        (0..DIM).map(|i| self.entries[i][i]).sum()
    }

    pub fn is_unitary(&self) -> bool {
        unitary_deviation_8(&self.entries) <= TOL_CONSTRUCT
    }

    pub fn is_hermitian(&self) -> bool {
        hermitian_deviation_8(&self.entries) <= TOL_CONSTRUCT
    }

    /// `self · state` as a raw amplitude vector (no normalization implied).
    pub fn apply_vec(&self, amplitudes: &[Complex64; DIM]) -> [Complex64; DIM] {
        let mut out = [c64(0.0, 0.0); DIM];
        for (i, entry) in out.iter_mut().enumerate() {
            let mut sum = c64(0.0, 0.0);
            for j in 0..DIM {
                sum += self.entries[i][j] * amplitudes[j];
            }
            *entry = sum;
        }
        out
    }

    /// Applies the operator to a normalized state, revalidating the norm.
    /// Succeeds for norm-preserving (unitary) operators.
    pub fn apply(&self, state: &PureState) -> Result<PureState, QcoreError> {
        PureState::new(self.apply_vec(state.amplitudes()))
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<[f64; 8], QcoreError> {
        let dev = hermitian_deviation_8(&self.entries);
        if dev > TOL_CONSTRUCT {
            return Err(QcoreError::NotHermitian { deviation: dev });
        }
        Ok(hermitian_eigenvalues_8(&self.entries))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn hermitian_deviation_8(m: &[[Complex64; DIM]; DIM]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            dev = dev.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    dev
}

fn unitary_deviation_8(m: &[[Complex64; DIM]; DIM]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            let mut sum = c64(0.0, 0.0);
            for row in m.iter() {
                sum += row[i].conj() * row[j];
            }
            let target = if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            dev = dev.max((sum - target).norm());
        }
    }
    dev
}

/// Kronecker product `a ⊗ b ⊗ c` in the fixed order spin ⊗ path ⊗ energy.
///
/// Multiplicative: `(A⊗B⊗C)(A'⊗B'⊗C') = AA'⊗BB'⊗CC'`, and the trace is the
/// product of the factor traces.
pub fn tensor3(a: &SingleQubitOp, b: &SingleQubitOp, c: &SingleQubitOp) -> TripleOp {
    let mut entries = [[c64(0.0, 0.0); DIM]; DIM];
    for (i, row) in entries.iter_mut().enumerate() {
        let (is, ip, ie) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
        for (j, entry) in row.iter_mut().enumerate() {
            let (js, jp, je) = ((j >> 2) & 1, (j >> 1) & 1, j & 1);
            *entry = a.entries[is][js] * b.entries[ip][jp] * c.entries[ie][je];
        }
    }
    let kind = match (a.kind, b.kind, c.kind) {
        (OpKind::Unitary, OpKind::Unitary, OpKind::Unitary) => OpKind::Unitary,
        (OpKind::Observable, OpKind::Observable, OpKind::Observable) => OpKind::Observable,
        _ => OpKind::General,
    };
    TripleOp { entries, kind }
}

/// Embeds a single-DOF operator into the full space, identity elsewhere.
pub fn embed(dof: DofIndex, op: &SingleQubitOp) -> TripleOp {
    let id = SingleQubitOp::identity();
    match dof {
        DofIndex::Spin => tensor3(op, &id, &id),
        DofIndex::Path => tensor3(&id, op, &id),
        DofIndex::Energy => tensor3(&id, &id, op),
    }
}

// ── states ───────────────────────────────────────────────────────────────────

/// A normalized pure state of one neutron: 8 complex amplitudes over the
/// spin ⊗ path ⊗ energy basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: [Complex64; DIM],
}

impl PureState {
    /// Validates Σ|aᵦ|² = 1 within [`TOL_CONSTRUCT`].
    pub fn new(amplitudes: [Complex64; DIM]) -> Result<Self, QcoreError> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sqr - 1.0).abs();
        if deviation > TOL_CONSTRUCT {
            return Err(QcoreError::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    /// The computational basis state with index `b = 4s + 2p + e`.
    pub fn basis(b: usize) -> Self {
        assert!(b < DIM);
        let mut amplitudes = [c64(0.0, 0.0); DIM];
        amplitudes[b] = c64(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64; DIM] {
        &self.amplitudes
    }

    pub fn amplitude(&self, b: usize) -> Complex64 {
        self.amplitudes[b]
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Overlap probability |⟨self|other⟩|².
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Euclidean norm of a raw amplitude vector.
pub fn vec_norm(amplitudes: &[Complex64; DIM]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// A mixed state: 8×8 Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: [[Complex64; DIM]; DIM],
}

impl DensityMatrix {
    /// Validates hermiticity and unit trace within [`TOL_CONSTRUCT`] and
    /// positivity within `-`[`TOL_DERIVED`] on the spectrum.
    pub fn try_new(entries: [[Complex64; DIM]; DIM]) -> Result<Self, QcoreError> {
        let herm = hermitian_deviation_8(&entries);
        if herm > TOL_CONSTRUCT {
            return Err(QcoreError::NotHermitian { deviation: herm });
        }
        let trace: Complex64 = (0..DIM).map(|i| entries[i][i]).sum();
        let trace_dev = (trace - c64(1.0, 0.0)).norm();
        if trace_dev > TOL_CONSTRUCT {
            return Err(QcoreError::BadTrace {
                deviation: trace_dev,
            });
        }
        let eigs = hermitian_eigenvalues_8(&entries);
        if eigs[0] < -TOL_DERIVED {
            return Err(QcoreError::NotPositive {
                min_eigenvalue: eigs[0],
            });
        }
        Ok(Self { entries })
    }

    /// The maximally mixed state I/8.
    pub fn maximally_mixed() -> Self {
        let mut entries = [[c64(0.0, 0.0); DIM]; DIM];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = c64(0.125, 0.0);
        }
        Self { entries }
    }

    /// Convex mixture `λ·a + (1−λ)·b`.
    pub fn mix(a: &Self, b: &Self, lambda: f64) -> Result<Self, QcoreError> {
        assert!(
            (0.0..=1.0).contains(&lambda),
            "mixing weight must be in [0, 1]"
        );
        let mut entries = [[c64(0.0, 0.0); DIM]; DIM];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a.entries[i][j] * lambda + b.entries[i][j] * (1.0 - lambda);
            }
        }
        Self::try_new(entries)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[Complex64; DIM]; DIM] {
        &self.entries
    }

    /// trace(ρ²), equals 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        let mut sum = c64(0.0, 0.0);
        for i in 0..DIM {
            for j in 0..DIM {
                sum += self.entries[i][j] * self.entries[j][i];
            }
        }
        sum.re
    }

    /// Spectrum in ascending order.
    pub fn eigenvalues(&self) -> [f64; 8] {
        hermitian_eigenvalues_8(&self.entries)
    }

    /// Conjugation `U ρ U†` by a unitary, e.g. a phase manipulation.
    pub fn conjugate_by(&self, u: &TripleOp) -> Result<Self, QcoreError> {
        let rho = TripleOp::general(self.entries);
        let out = u.mul(&rho).mul(&u.adjoint());
        Self::try_new(*out.entries())
    }
}

/// Rank-1 projector |ψ⟩⟨ψ| of a normalized pure state.
///
/// Rejects inputs whose norm deviates from 1 by more than 1e−8.
pub fn densify(psi: &PureState) -> Result<DensityMatrix, QcoreError> {
    let norm_sqr: f64 = psi.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let deviation = (norm_sqr - 1.0).abs();
    if deviation > 1e-8 {
        return Err(QcoreError::NotNormalized { deviation });
    }
    let mut entries = [[c64(0.0, 0.0); DIM]; DIM];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = psi.amplitudes[i] * psi.amplitudes[j].conj();
        }
    }
    DensityMatrix::try_new(entries)
}

/// Expectation value trace(ρ·O) of a Hermitian observable.
///
/// The trace of a product of Hermitian matrices is real; the imaginary
/// residue is discarded after the hermiticity check.
pub fn expectation(rho: &DensityMatrix, obs: &TripleOp) -> Result<f64, QcoreError> {
    let dev = hermitian_deviation_8(obs.entries());
    if dev > TOL_CONSTRUCT {
        return Err(QcoreError::NotHermitian { deviation: dev });
    }
    let mut sum = c64(0.0, 0.0);
    for i in 0..DIM {
        for j in 0..DIM {
            sum += rho.entries[i][j] * obs.entries()[j][i];
        }
    }
    Ok(sum.re)
}

// ── Hermitian eigensolver ────────────────────────────────────────────────────

/// Eigenvalues of an 8×8 Hermitian matrix, ascending.
///
/// Uses a cyclic Jacobi iteration on the real symmetric embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is that of the Hermitian input
/// with every eigenvalue doubled; adjacent sorted pairs are averaged.
pub(crate) fn hermitian_eigenvalues_8(m: &[[Complex64; DIM]; DIM]) -> [f64; 8] {
    const N: usize = 16;
    let mut a = [[0.0f64; N]; N];
    for i in 0..DIM {
        for j in 0..DIM {
            a[i][j] = m[i][j].re;
            a[i][j + DIM] = -m[i][j].im;
            a[i + DIM][j] = m[i][j].im;
            a[i + DIM][j + DIM] = m[i][j].re;
        }
    }

    let frobenius: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = 1e-15 * frobenius.max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..N {
            for j in (i + 1)..N {
                off += 2.0 * a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..N - 1 {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let sign = if theta < 0.0 { -1.0 } else { 1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut diag = [0.0f64; N];
    for (i, d) in diag.iter_mut().enumerate() {
        *d = a[i][i];
    }
    diag.sort_by(f64::total_cmp);
    let mut out = [0.0f64; 8];
    for (k, value) in out.iter_mut().enumerate() {
        *value = 0.5 * (diag[2 * k] + diag[2 * k + 1]);
    }
    out
}

/// 1/√2 amplitude shared by the GHZ constructions.
pub const INV_SQRT_2: f64 = FRAC_1_SQRT_2;
