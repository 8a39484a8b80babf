//! Bell-type basis, the four Bell projectors and the Pauli corrections.
//!
//! The projectors are the same 4×4 numbers whether they act on `A ⊗ B`
//! (unprimed) or on `C ⊗ A` (primed); [`Placement`] only records which pair
//! of factors is meant.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::linalg::{
    check_statistical_operator, embed_into, hermitian_spectrum, partial_transpose, ComplexMatrix,
    LinalgError, Subsystem, SubsystemLayout, C64,
};
use crate::tol;

/// Index of a Bell projector: 1, 2 are `|Ψ_e^±⟩`, 3, 4 are `|Ψ_o^±⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellIndex(u8);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("Bell index must be in 1..=4, got {0}")]
pub struct BellIndexError(pub i64);

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [BellIndex(1), BellIndex(2), BellIndex(3), BellIndex(4)];

    pub fn new(value: u8) -> Result<Self, BellIndexError> {
        if (1..=4).contains(&value) {
            Ok(Self(value))
        } else {
            Err(BellIndexError(value.into()))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn parity(self) -> Parity {
        if self.0 <= 2 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self) -> Sign {
        if self.0 % 2 == 1 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl TryFrom<i64> for BellIndex {
    type Error = BellIndexError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        u8::try_from(v)
            .ok()
            .and_then(|b| BellIndex::new(b).ok())
            .ok_or(BellIndexError(v))
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Even pairs |11⟩,|22⟩; odd pairs |12⟩,|21⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Which pair of factors a Bell projector acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Unprimed operators on `A ⊗ B`.
    AB,
    /// Primed operators on `C ⊗ A`.
    CA,
}

impl Placement {
    pub fn layout(self) -> SubsystemLayout {
        match self {
            Self::AB => SubsystemLayout::pair_ab(),
            Self::CA => SubsystemLayout::pair_ca(),
        }
    }
}

/// Components of `|Ψ⟩` in the product basis `|11⟩, |12⟩, |21⟩, |22⟩`.
pub fn bell_vector(parity: Parity, sign: Sign) -> [C64; 4] {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let s = match sign {
        Sign::Plus => h,
        Sign::Minus => -h,
    };
    match parity {
        Parity::Even => [h, z, z, s],
        Parity::Odd => [z, h, s, z],
    }
}

/// Projector onto the `i`-th Bell vector, with entries exactly `0` or `±½`.
///
/// The placement does not change the numbers; see [`Placement::layout`] for
/// the factors it refers to.
pub fn bell_rho(i: BellIndex, _placement: Placement) -> ComplexMatrix {
    let (a, b) = match i.parity() {
        Parity::Even => (0, 3),
        Parity::Odd => (1, 2),
    };
    let off = match i.sign() {
        Sign::Plus => 0.5,
        Sign::Minus => -0.5,
    };
    let mut m = ComplexMatrix::zeros(4);
    m[(a, a)] = C64::new(0.5, 0.0);
    m[(b, b)] = C64::new(0.5, 0.0);
    m[(a, b)] = C64::new(off, 0.0);
    m[(b, a)] = C64::new(off, 0.0);
    m
}

/// `|x_row⟩⟨x_col|` on one factor, with 1-based row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixUnit {
    pub subsystem: Subsystem,
    pub row: u8,
    pub col: u8,
}

impl MatrixUnit {
    pub fn new(subsystem: Subsystem, row: u8, col: u8) -> Self {
        assert!((1..=2).contains(&row) && (1..=2).contains(&col), "matrix unit index out of range");
        Self { subsystem, row, col }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let (r, c) = (usize::from(self.row - 1), usize::from(self.col - 1));
        ComplexMatrix::from_fn(2, |i, j| {
            if i == r && j == c {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Product of two units on the same factor: `E_ij E_lq = δ_jl E_iq`.
    pub fn compose(self, other: MatrixUnit) -> Option<MatrixUnit> {
        assert_eq!(self.subsystem, other.subsystem, "composing units on different factors");
        (self.col == other.row).then(|| MatrixUnit::new(self.subsystem, self.row, other.col))
    }
}

/// The two Pauli matrices the corrections need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    Sigma1,
    Sigma3,
}

pub fn pauli(k: Pauli) -> ComplexMatrix {
    match k {
        Pauli::Sigma1 => ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]),
        Pauli::Sigma3 => ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]]),
    }
}

/// Lifts a two-factor operator to the total space `C ⊗ A ⊗ B`.
pub fn embed(op: &ComplexMatrix, layout: &SubsystemLayout) -> Result<ComplexMatrix, LinalgError> {
    if layout.len() != 2 {
        return Err(LinalgError::LayoutMismatch {
            matrix: op.dim(),
            layout: layout.clone(),
            layout_dim: layout.dim(),
        });
    }
    embed_into(op, layout, &SubsystemLayout::total())
}

/// Smallest eigenvalue of the partial transpose over the last factor of a
/// two-factor layout.
pub fn min_partial_transpose_eigenvalue(
    op: &ComplexMatrix,
    layout: &SubsystemLayout,
) -> Result<f64, LinalgError> {
    let last = *layout.factors().last().ok_or_else(|| LinalgError::LayoutMismatch {
        matrix: op.dim(),
        layout: layout.clone(),
        layout_dim: layout.dim(),
    })?;
    let pt = partial_transpose(op, layout, last)?;
    Ok(*hermitian_spectrum(&pt)?.last().unwrap())
}

/// Peres–Horodecki test for a two-factor statistical operator: entangled
/// iff the partial transpose has an eigenvalue below `-1e-10`.
pub fn ppt_entangled(op: &ComplexMatrix, layout: &SubsystemLayout) -> Result<bool, LinalgError> {
    if layout.len() != 2 || op.dim() != 4 {
        return Err(LinalgError::LayoutMismatch {
            matrix: op.dim(),
            layout: layout.clone(),
            layout_dim: layout.dim(),
        });
    }
    check_statistical_operator(op)?;
    Ok(min_partial_transpose_eigenvalue(op, layout)? < -tol::PPT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StatisticalOperatorViolation;

    fn unit(s: Subsystem, r: u8, c: u8) -> ComplexMatrix {
        MatrixUnit::new(s, r, c).matrix()
    }

    fn ab(ar: u8, ac: u8, br: u8, bc: u8) -> ComplexMatrix {
        unit(Subsystem::A, ar, ac).tensor(&unit(Subsystem::B, br, bc)).unwrap()
    }

    #[test]
    fn bell_vectors_match_definitions() {
        let h = FRAC_1_SQRT_2;
        let ep = bell_vector(Parity::Even, Sign::Plus);
        assert_eq!(ep.map(|z| z.re), [h, 0.0, 0.0, h]);
        let om = bell_vector(Parity::Odd, Sign::Minus);
        assert_eq!(om.map(|z| z.re), [0.0, h, -h, 0.0]);
        for i in BellIndex::ALL {
            let v = bell_vector(i.parity(), i.sign());
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn projectors_are_outer_products_of_bell_vectors() {
        for i in BellIndex::ALL {
            let outer = ComplexMatrix::outer(&bell_vector(i.parity(), i.sign()));
            assert!(bell_rho(i, Placement::AB).max_abs_diff(&outer) < 1e-15);
        }
    }

    #[test]
    fn rho4_matches_matrix_unit_expansion() {
        let want = &(&(&ab(1, 1, 2, 2) - &ab(1, 2, 2, 1)) - &ab(2, 1, 1, 2)) + &ab(2, 2, 1, 1);
        let got = bell_rho(BellIndex::new(4).unwrap(), Placement::AB);
        assert!(got.max_abs_diff(&want.scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn rho1_to_rho3_match_expansions() {
        let e = |s: f64| {
            let off = &ab(1, 2, 1, 2) + &ab(2, 1, 2, 1);
            (&(&ab(1, 1, 1, 1) + &ab(2, 2, 2, 2)) + &off.scale_real(s)).scale_real(0.5)
        };
        let o = |s: f64| {
            let off = &ab(1, 2, 2, 1) + &ab(2, 1, 1, 2);
            (&(&ab(1, 1, 2, 2) + &ab(2, 2, 1, 1)) + &off.scale_real(s)).scale_real(0.5)
        };
        let idx = |k| BellIndex::new(k).unwrap();
        assert!(bell_rho(idx(1), Placement::AB).max_abs_diff(&e(1.0)) < 1e-15);
        assert!(bell_rho(idx(2), Placement::AB).max_abs_diff(&e(-1.0)) < 1e-15);
        assert!(bell_rho(idx(3), Placement::AB).max_abs_diff(&o(1.0)) < 1e-15);
        assert!(bell_rho(idx(4), Placement::AB).max_abs_diff(&o(-1.0)) < 1e-15);
    }

    #[test]
    fn idempotent_orthogonal_complete() {
        let mut sum = ComplexMatrix::zeros(4);
        for i in BellIndex::ALL {
            let ri = bell_rho(i, Placement::AB);
            assert!((&ri * &ri).max_abs_diff(&ri) < 1e-12);
            assert!((ri.trace().re - 1.0).abs() < 1e-12);
            for j in BellIndex::ALL.into_iter().filter(|&j| j != i) {
                assert!((&ri * &bell_rho(j, Placement::AB)).max_abs() < 1e-12);
            }
            sum = &sum + &ri;
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn primed_and_unprimed_share_numbers() {
        for i in BellIndex::ALL {
            assert_eq!(bell_rho(i, Placement::AB), bell_rho(i, Placement::CA));
        }
        assert_eq!(Placement::CA.layout(), SubsystemLayout::pair_ca());
    }

    #[test]
    fn matrix_unit_composition() {
        let a12 = MatrixUnit::new(Subsystem::A, 1, 2);
        let a21 = MatrixUnit::new(Subsystem::A, 2, 1);
        assert_eq!(a12.compose(a21), Some(MatrixUnit::new(Subsystem::A, 1, 1)));
        assert_eq!(a12.compose(a12), None);
        assert_eq!(&a12.matrix() * &a21.matrix(), MatrixUnit::new(Subsystem::A, 1, 1).matrix());
    }

    #[test]
    fn pauli_squares() {
        for k in [Pauli::Sigma1, Pauli::Sigma3] {
            let p = pauli(k);
            assert_eq!(&p * &p, ComplexMatrix::identity(2));
        }
    }

    #[test]
    fn embed_identity_and_trace() {
        let ca = SubsystemLayout::pair_ca();
        assert_eq!(embed(&ComplexMatrix::identity(4), &ca).unwrap(), ComplexMatrix::identity(8));
        let r = bell_rho(BellIndex::new(2).unwrap(), Placement::CA);
        let e = embed(&r, &ca).unwrap();
        assert!((e.trace() - r.trace() * 2.0).norm() < 1e-15);
        assert!(embed(&ComplexMatrix::identity(2), &SubsystemLayout::single(Subsystem::B)).is_err());
    }

    #[test]
    fn embed_on_ab_matches_kron() {
        let r = bell_rho(BellIndex::new(3).unwrap(), Placement::AB);
        let e = embed(&r, &SubsystemLayout::pair_ab()).unwrap();
        assert_eq!(e, ComplexMatrix::identity(2).tensor(&r).unwrap());
    }

    #[test]
    fn bell_states_are_entangled() {
        for i in BellIndex::ALL {
            let layout = SubsystemLayout::pair_ab();
            assert!(ppt_entangled(&bell_rho(i, Placement::AB), &layout).unwrap());
            let min = min_partial_transpose_eigenvalue(&bell_rho(i, Placement::AB), &layout).unwrap();
            assert!((min + 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn classical_mixture_is_separable() {
        let sep = (&ab(1, 1, 1, 1) + &ab(2, 2, 2, 2)).scale_real(0.5);
        let layout = SubsystemLayout::pair_ab();
        assert!(!ppt_entangled(&sep, &layout).unwrap());
        let pt = partial_transpose(&sep, &layout, Subsystem::B).unwrap();
        assert!(*hermitian_spectrum(&pt).unwrap().last().unwrap() >= -1e-12);
    }

    #[test]
    fn werner_state_below_threshold_is_separable() {
        // p ρ1 + (1-p) I/4 has PT eigenvalue (1 - 3p)/4, negative iff p > 1/3.
        let werner = |p: f64| {
            &bell_rho(BellIndex::new(1).unwrap(), Placement::AB).scale_real(p)
                + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0)
        };
        let layout = SubsystemLayout::pair_ab();
        assert!(!ppt_entangled(&werner(0.25), &layout).unwrap());
        assert!(ppt_entangled(&werner(0.4), &layout).unwrap());
        let min = min_partial_transpose_eigenvalue(&werner(0.25), &layout).unwrap();
        assert!((min - (1.0 - 0.75) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn ppt_rejects_invalid_operator() {
        let err = ppt_entangled(&ComplexMatrix::identity(4), &SubsystemLayout::pair_ab()).unwrap_err();
        assert!(matches!(
            err,
            LinalgError::InvalidStatisticalOperator(StatisticalOperatorViolation::TraceNotOne { .. })
        ));
    }

    #[test]
    fn bell_index_bounds() {
        assert!(BellIndex::new(0).is_err());
        assert!(BellIndex::new(5).is_err());
        assert_eq!(BellIndex::try_from(3i64).unwrap().get(), 3);
        assert!(BellIndex::try_from(-1i64).is_err());
    }
}
