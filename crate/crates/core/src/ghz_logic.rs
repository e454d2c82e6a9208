//! GHZ states, the Mermin operator, eigenrelation checks, and the exhaustive
//! noncontextual-hidden-variable enumeration.
//!
//! The logical contradiction is the heart of the experiment: the three
//! product observables xyy, yxy, yyx and the fourth xxx have eigenvalue
//! patterns on a GHZ state that no assignment of predefined ±1 outcomes can
//! reproduce. All 64 candidate assignments are checked by brute force, and
//! the same term/sign table drives both the classical sum and the quantum
//! Mermin operator so the two paths cannot drift apart.

use crate::qcore::{
    c64, densify, expectation, pauli, tensor3, vec_norm, DensityMatrix, DofIndex, PauliAxis,
    PureState, QcoreError, TripleOp, DIM, INV_SQRT_2,
};
use std::f64::consts::FRAC_PI_2;
use std::fmt;

/// Relative sign between the |000⟩ and |111⟩ amplitudes of a GHZ state.
///
/// `Plus` is the state the beamline prepares,
/// (|↑,I,E₀⟩ + |↓,II,E₀−ħω⟩)/√2; `Minus` is the textbook three-spin form
/// (|↑↑↑⟩ − |↓↓↓⟩)/√2. Sign errors here flip every downstream number, so
/// both conventions are first-class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhzSign {
    Plus,
    Minus,
}

impl GhzSign {
    pub fn factor(self) -> f64 {
        match self {
            GhzSign::Plus => 1.0,
            GhzSign::Minus => -1.0,
        }
    }
}

/// The GHZ state (|000⟩ ± |111⟩)/√2 in the spin ⊗ path ⊗ energy basis.
pub fn ghz_state(sign: GhzSign) -> PureState {
    let mut amplitudes = [c64(0.0, 0.0); DIM];
    amplitudes[0] = c64(INV_SQRT_2, 0.0);
    amplitudes[7] = c64(sign.factor() * INV_SQRT_2, 0.0);
    PureState::new(amplitudes).expect("GHZ amplitudes are normalized by construction")
}

/// In-plane measurement axis: σ_x or σ_y on one degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InPlaneAxis {
    X,
    Y,
}

impl InPlaneAxis {
    /// Phase angle implementing this axis (0 for σ_x, π/2 for σ_y).
    pub fn angle(self) -> f64 {
        match self {
            InPlaneAxis::X => 0.0,
            InPlaneAxis::Y => FRAC_PI_2,
        }
    }

    pub fn pauli_axis(self) -> PauliAxis {
        match self {
            InPlaneAxis::X => PauliAxis::X,
            InPlaneAxis::Y => PauliAxis::Y,
        }
    }

    pub fn label(self) -> char {
        match self {
            InPlaneAxis::X => 'x',
            InPlaneAxis::Y => 'y',
        }
    }
}

/// One of the four product-observable terms of the Mermin sum
/// `M = E[xxx] − E[xyy] − E[yxy] − E[yyx]`.
///
/// The variants are the only four terms; axes are ordered
/// (spin, path, energy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MerminTerm {
    Xxx,
    Xyy,
    Yxy,
    Yyx,
}

impl MerminTerm {
    pub const ALL: [MerminTerm; 4] = [
        MerminTerm::Xxx,
        MerminTerm::Xyy,
        MerminTerm::Yxy,
        MerminTerm::Yyx,
    ];

    /// Measurement axes per degree of freedom, in (spin, path, energy) order.
    pub fn axes(self) -> [InPlaneAxis; 3] {
        use InPlaneAxis::{X, Y};
        match self {
            MerminTerm::Xxx => [X, X, X],
            MerminTerm::Xyy => [X, Y, Y],
            MerminTerm::Yxy => [Y, X, Y],
            MerminTerm::Yyx => [Y, Y, X],
        }
    }

    pub fn axis(self, dof: DofIndex) -> InPlaneAxis {
        self.axes()[dof.slot()]
    }

    /// Coefficient of this term in the Mermin sum: +1 for xxx, −1 otherwise.
    pub fn sign(self) -> f64 {
        match self {
            MerminTerm::Xxx => 1.0,
            _ => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MerminTerm::Xxx => "xxx",
            MerminTerm::Xyy => "xyy",
            MerminTerm::Yxy => "yxy",
            MerminTerm::Yyx => "yyx",
        }
    }

    /// The 8×8 product observable σ ⊗ σ ⊗ σ for this term.
    pub fn operator(self) -> TripleOp {
        let [a, b, c] = self.axes();
        tensor3(
            &pauli(a.pauli_axis()),
            &pauli(b.pauli_axis()),
            &pauli(c.pauli_axis()),
        )
    }

    /// Eigenvalue of this term's observable on the GHZ state of the given
    /// sign: for `Minus` the xyy/yxy/yyx terms give +1 and xxx gives −1;
    /// for `Plus` all four flip.
    pub fn ghz_eigenvalue(self, sign: GhzSign) -> f64 {
        match sign {
            GhzSign::Minus => -self.sign(),
            GhzSign::Plus => self.sign(),
        }
    }
}

impl fmt::Display for MerminTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Outcome of checking one eigenvalue relation `O|ψ⟩ = λ|ψ⟩`.
#[derive(Debug, Clone, Copy)]
pub struct RelationCheck {
    pub term: MerminTerm,
    pub expected_eigenvalue: f64,
    /// Norm of `O|ψ⟩ − λ|ψ⟩`.
    pub residual: f64,
    pub holds: bool,
}

/// Report from [`check_eigenrelations`]: one entry per Mermin term.
#[derive(Debug, Clone)]
pub struct EigenrelationReport {
    pub relations: [RelationCheck; 4],
}

impl EigenrelationReport {
    pub fn all_hold(&self) -> bool {
        self.relations.iter().all(|r| r.holds)
    }

    pub fn max_residual(&self) -> f64 {
        self.relations
            .iter()
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }
}

/// Residual tolerance for the eigenrelation checks.
pub const EIGENRELATION_TOL: f64 = 1e-12;

/// Verifies the four GHZ eigenvalue relations for the given sign convention
/// and reports the residual norm of each.
///
/// A failed relation is reported, not an error: feeding a product state like
/// |000⟩ yields residuals of order 1.
pub fn check_eigenrelations(state: &PureState, sign: GhzSign) -> EigenrelationReport {
    let relations = MerminTerm::ALL.map(|term| {
        let lambda = term.ghz_eigenvalue(sign);
        let applied = term.operator().apply_vec(state.amplitudes());
        let mut diff = applied;
        for (d, a) in diff.iter_mut().zip(state.amplitudes().iter()) {
            *d -= a * lambda;
        }
        let residual = vec_norm(&diff);
        RelationCheck {
            term,
            expected_eigenvalue: lambda,
            residual,
            holds: residual < EIGENRELATION_TOL,
        }
    });
    EigenrelationReport { relations }
}

/// A noncontextual assignment of predefined ±1 outcomes to the six in-plane
/// measurements (x and y on each degree of freedom).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NchvAssignment {
    /// Indexed `[dof][axis]`, every value ±1.
    outcomes: [[i8; 2]; 3],
}

impl NchvAssignment {
    /// Decodes one of the 64 assignments from a 6-bit index.
    pub fn from_index(index: u8) -> Self {
        assert!(index < 64);
        let mut outcomes = [[1i8; 2]; 3];
        for (slot, dof_outcomes) in outcomes.iter_mut().enumerate() {
            for (axis, value) in dof_outcomes.iter_mut().enumerate() {
                let bit = (index >> (2 * slot + axis)) & 1;
                *value = if bit == 0 { 1 } else { -1 };
            }
        }
        Self { outcomes }
    }

    pub fn all() -> impl Iterator<Item = NchvAssignment> {
        (0u8..64).map(NchvAssignment::from_index)
    }

    pub fn outcome(&self, dof: DofIndex, axis: InPlaneAxis) -> i8 {
        let axis_idx = match axis {
            InPlaneAxis::X => 0,
            InPlaneAxis::Y => 1,
        };
        self.outcomes[dof.slot()][axis_idx]
    }

    /// Product of the three predefined outcomes selected by a Mermin term.
    pub fn term_product(&self, term: MerminTerm) -> i32 {
        DofIndex::ALL
            .iter()
            .map(|&dof| i32::from(self.outcome(dof, term.axis(dof))))
            .product()
    }

    /// The Mermin sum evaluated on this assignment with the shared sign
    /// table.
    pub fn mermin_sum(&self) -> i32 {
        MerminTerm::ALL
            .iter()
            .map(|&t| t.sign() as i32 * self.term_product(t))
            .sum()
    }

    /// Whether the assignment satisfies all four GHZ relations
    /// (xyy = yxy = yyx = +1 and xxx = −1).
    pub fn satisfies_ghz_relations(&self) -> bool {
        MerminTerm::ALL
            .iter()
            .all(|&t| self.term_product(t) == t.ghz_eigenvalue(GhzSign::Minus) as i32)
    }
}

/// Result of enumerating all 64 noncontextual assignments.
#[derive(Debug, Clone, Copy)]
pub struct NchvReport {
    pub assignments_total: usize,
    /// Assignments satisfying all four GHZ relations — provably zero.
    pub satisfying_count: usize,
    /// Whether the product of the four term values is +1 for every
    /// assignment (each outcome enters twice).
    pub lhs_product_always_one: bool,
    /// max |M| over all assignments; the noncontextual bound, 2.
    pub max_abs_mermin_sum: i32,
}

/// Exhaustively enumerates the 64 predefined-outcome assignments.
pub fn enumerate_nchv() -> NchvReport {
    let mut satisfying = 0usize;
    let mut product_ok = true;
    let mut max_abs = 0i32;
    for assignment in NchvAssignment::all() {
        if assignment.satisfies_ghz_relations() {
            satisfying += 1;
        }
        let product: i32 = MerminTerm::ALL
            .iter()
            .map(|&t| assignment.term_product(t))
            .product();
        if product != 1 {
            product_ok = false;
        }
        max_abs = max_abs.max(assignment.mermin_sum().abs());
    }
    NchvReport {
        assignments_total: 64,
        satisfying_count: satisfying,
        lhs_product_always_one: product_ok,
        max_abs_mermin_sum: max_abs,
    }
}

/// The Mermin operator `σxσxσx − σxσyσy − σyσxσy − σyσyσx` as a single
/// Hermitian 8×8 observable. Its largest eigenvalue is 4, reached by the
/// plus-sign GHZ state; noncontextual models are bounded by 2.
pub fn mermin_operator() -> TripleOp {
    let first = MerminTerm::ALL[0];
    let mut sum = first.operator().scale(c64(first.sign(), 0.0));
    for term in &MerminTerm::ALL[1..] {
        sum = sum.add(&term.operator().scale(c64(term.sign(), 0.0)));
    }
    sum
}

/// The Mermin sum `trace(ρ·M)` of a state.
pub fn mermin_value(rho: &DensityMatrix) -> Result<f64, QcoreError> {
    expectation(rho, &mermin_operator())
}

/// The three commuting operators A₁ = σxσyσy, A₂ = σyσxσy, A₃ = σyσyσx.
pub fn stabilizer_ops() -> [TripleOp; 3] {
    [
        MerminTerm::Xyy.operator(),
        MerminTerm::Yxy.operator(),
        MerminTerm::Yyx.operator(),
    ]
}

/// Density matrix of a GHZ state, for callers that need the mixed-state form.
pub fn ghz_density(sign: GhzSign) -> DensityMatrix {
    densify(&ghz_state(sign)).expect("GHZ state is normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::ghz_dephase;
    use crate::qcore::{expectation, DensityMatrix, OpKind};
    use num_complex::Complex64;

    // Independent matrix-element oracle: ⟨i|σ_{a}⊗σ_{b}⊗σ_{c}|j⟩ from bit
    // patterns, with σx flipping a bit (weight 1) and σy flipping with ±i.
    fn pauli_triple_element(axes: [InPlaneAxis; 3], i: usize, j: usize) -> Complex64 {
        let mut value = Complex64::new(1.0, 0.0);
        for (slot, axis) in axes.iter().enumerate() {
            let bi = (i >> (2 - slot)) & 1;
            let bj = (j >> (2 - slot)) & 1;
            if bi == bj {
                return Complex64::new(0.0, 0.0);
            }
            value *= match axis {
                InPlaneAxis::X => Complex64::new(1.0, 0.0),
                // ⟨1|σy|0⟩ = i, ⟨0|σy|1⟩ = −i
                InPlaneAxis::Y => {
                    if bi == 1 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    }
                }
            };
        }
        value
    }

    fn oracle_expectation(state: &PureState, axes: [InPlaneAxis; 3]) -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..DIM {
            for j in 0..DIM {
                sum += state.amplitude(i).conj()
                    * pauli_triple_element(axes, i, j)
                    * state.amplitude(j);
            }
        }
        assert!(sum.im.abs() < 1e-12);
        sum.re
    }

    #[test]
    fn ghz_amplitudes_match_conventions() {
        let plus = ghz_state(GhzSign::Plus);
        assert!((plus.amplitude(0) - c64(INV_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((plus.amplitude(7) - c64(INV_SQRT_2, 0.0)).norm() < 1e-15);
        let minus = ghz_state(GhzSign::Minus);
        assert!((minus.amplitude(0) - c64(INV_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((minus.amplitude(7) + c64(INV_SQRT_2, 0.0)).norm() < 1e-15);
        for b in 1..7 {
            assert_eq!(plus.amplitude(b), c64(0.0, 0.0));
            assert_eq!(minus.amplitude(b), c64(0.0, 0.0));
        }
    }

    #[test]
    fn ghz_signs_are_orthogonal() {
        let overlap = ghz_state(GhzSign::Plus).inner(&ghz_state(GhzSign::Minus));
        assert!(overlap.norm() < 1e-15);
    }

    #[test]
    fn densified_ghz_has_half_weight_corners() {
        let rho = ghz_density(GhzSign::Plus);
        for i in 0..DIM {
            for j in 0..DIM {
                let corner = (i == 0 || i == 7) && (j == 0 || j == 7);
                let want = if corner { 0.5 } else { 0.0 };
                assert!((rho.entry(i, j) - c64(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn minus_state_satisfies_ghz_eigenrelations() {
        let report = check_eigenrelations(&ghz_state(GhzSign::Minus), GhzSign::Minus);
        assert!(report.all_hold(), "residuals: {:?}", report);
        assert!(report.max_residual() < 1e-12);
        // expected eigenvalues: +1 for the mixed terms, −1 for xxx
        for rel in &report.relations {
            let want = if rel.term == MerminTerm::Xxx {
                -1.0
            } else {
                1.0
            };
            assert_eq!(rel.expected_eigenvalue, want);
        }
    }

    #[test]
    fn plus_state_satisfies_flipped_eigenrelations() {
        let report = check_eigenrelations(&ghz_state(GhzSign::Plus), GhzSign::Plus);
        assert!(report.all_hold());
        for rel in &report.relations {
            let want = if rel.term == MerminTerm::Xxx {
                1.0
            } else {
                -1.0
            };
            assert_eq!(rel.expected_eigenvalue, want);
        }
    }

    #[test]
    fn product_state_fails_eigenrelations() {
        let report = check_eigenrelations(&PureState::basis(0), GhzSign::Minus);
        assert!(!report.all_hold());
        assert!(report.max_residual() > 0.5);
    }

    #[test]
    fn expectation_of_xxx_on_ghz_states() {
        // oracle: direct amplitude computation, independent of tensor3
        let plus = ghz_state(GhzSign::Plus);
        let minus = ghz_state(GhzSign::Minus);
        use InPlaneAxis::{X, Y};
        assert!((oracle_expectation(&plus, [X, X, X]) - 1.0).abs() < 1e-12);
        assert!((oracle_expectation(&minus, [X, X, X]) + 1.0).abs() < 1e-12);

        let xxx = MerminTerm::Xxx.operator();
        let rho_plus = ghz_density(GhzSign::Plus);
        let rho_minus = ghz_density(GhzSign::Minus);
        assert!((expectation(&rho_plus, &xxx).unwrap() - 1.0).abs() < 1e-12);
        assert!((expectation(&rho_minus, &xxx).unwrap() + 1.0).abs() < 1e-12);
        // and the mixed terms match the oracle too
        assert!(
            (expectation(&rho_plus, &MerminTerm::Xyy.operator()).unwrap()
                - oracle_expectation(&plus, [X, Y, Y]))
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn tensor3_xyy_eigenrelation_on_minus_state() {
        let minus = ghz_state(GhzSign::Minus);
        let applied = MerminTerm::Xyy.operator().apply_vec(minus.amplitudes());
        for (got, want) in applied.iter().zip(minus.amplitudes().iter()) {
            assert!((got - want).norm() < 1e-15);
        }
    }

    #[test]
    fn stabilizers_commute_and_compose_to_minus_xxx() {
        let [a1, a2, a3] = stabilizer_ops();
        let xxx = MerminTerm::Xxx.operator();
        for (left, right) in [
            (&a1, &a2),
            (&a1, &a3),
            (&a2, &a3),
            (&a1, &xxx),
            (&a2, &xxx),
            (&a3, &xxx),
        ] {
            let comm = left.mul(right).sub(&right.mul(left));
            let zero = TripleOp::general([[c64(0.0, 0.0); DIM]; DIM]);
            assert!(comm.max_deviation(&zero) < 1e-12);
        }
        // σxσxσx = −A₁·A₂·A₃
        let product = a1.mul(&a2).mul(&a3).scale(c64(-1.0, 0.0));
        assert!(product.max_deviation(&xxx) < 1e-12);
    }

    #[test]
    fn nchv_enumeration_finds_the_contradiction() {
        // Independent oracle: six literal nested loops over ±1 outcomes.
        let mut satisfying = 0;
        let mut max_abs = 0i32;
        let vals = [1i32, -1];
        for sx in vals {
            for sy in vals {
                for px in vals {
                    for py in vals {
                        for ex in vals {
                            for ey in vals {
                                let xyy = sx * py * ey;
                                let yxy = sy * px * ey;
                                let yyx = sy * py * ex;
                                let xxx = sx * px * ex;
                                if xyy == 1 && yxy == 1 && yyx == 1 && xxx == -1 {
                                    satisfying += 1;
                                }
                                max_abs = max_abs.max((xxx - xyy - yxy - yyx).abs());
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(satisfying, 0);
        assert_eq!(max_abs, 2);

        let report = enumerate_nchv();
        assert_eq!(report.assignments_total, 64);
        assert_eq!(report.satisfying_count, 0);
        assert!(report.lhs_product_always_one);
        assert_eq!(report.max_abs_mermin_sum, 2);
    }

    #[test]
    fn mermin_operator_is_hermitian_with_top_eigenvalue_four() {
        let m = mermin_operator();
        assert_eq!(m.kind(), OpKind::Observable);
        let eigs = m.hermitian_eigenvalues().unwrap();
        assert!((eigs[7] - 4.0).abs() < 1e-9, "spectrum: {eigs:?}");
        assert!((eigs[0] + 4.0).abs() < 1e-9);
        // the remaining six eigenvalues vanish
        for e in &eigs[1..7] {
            assert!(e.abs() < 1e-9);
        }
    }

    #[test]
    fn mermin_value_on_reference_states() {
        assert!((mermin_value(&ghz_density(GhzSign::Plus)).unwrap() - 4.0).abs() < 1e-12);
        assert!((mermin_value(&ghz_density(GhzSign::Minus)).unwrap() + 4.0).abs() < 1e-12);
        let product = densify(&PureState::basis(0)).unwrap();
        assert!(mermin_value(&product).unwrap().abs() < 1e-15);
        assert!(
            mermin_value(&DensityMatrix::maximally_mixed())
                .unwrap()
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn mermin_value_at_default_visibility() {
        let dephased = ghz_dephase(&ghz_density(GhzSign::Plus), 0.6395).unwrap();
        let m = mermin_value(&dephased).unwrap();
        assert!((m - 2.558).abs() < 1e-3);
    }

    #[test]
    fn mermin_value_is_linear_in_the_state() {
        let rho_a = ghz_density(GhzSign::Plus);
        let rho_b = DensityMatrix::maximally_mixed();
        for &lambda in &[0.0, 0.25, 0.6, 1.0] {
            let mixed = DensityMatrix::mix(&rho_a, &rho_b, lambda).unwrap();
            let lhs = mermin_value(&mixed).unwrap();
            let rhs = lambda * mermin_value(&rho_a).unwrap()
                + (1.0 - lambda) * mermin_value(&rho_b).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_bound_is_tight_against_term_table() {
        // the enumeration max must equal the max of the shared-sign-table sum
        let max_table = NchvAssignment::all()
            .map(|a| a.mermin_sum().abs())
            .max()
            .unwrap();
        assert_eq!(enumerate_nchv().max_abs_mermin_sum, max_table);
        assert_eq!(max_table, 2);
    }
}
