//! The teleportation protocol on statistical operators.
//!
//! The incoming ensemble `C` is in the state `ρ_C = Σ c_kl C_kl`; the pair
//! `A ⊗ B` is in the Bell projector `ρ_4`. Alice applies an operator `P` on
//! `C ⊗ A` and Bob's ensemble is left in `Tr_{C,A}((P ⊗ 1_B) ρ_total)`,
//! which is then renormalized and optionally corrected.
//!
//! Two-dimensional operators on `B` are also handled as 4-vectors of their
//! coordinates against `(B11, B12, B21, B22)`; see [`to_b_coords`].

use std::fmt;

use thiserror::Error;

use crate::bell::{bell_rho, embed, pauli, BellIndex, MatrixUnit, Pauli, Placement};
use crate::error::{Error, Result};
use crate::fidelity::fidelity_trace;
use crate::linalg::{partial_trace, ComplexMatrix, Subsystem, SubsystemLayout, C64};
use crate::tol;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoefficientError {
    #[error("coefficient {name} is not finite")]
    NonFinite { name: &'static str },
    #[error("c11 + c22 = {sum}, expected 1")]
    TraceNotOne { sum: f64 },
    #[error("populations must be nonnegative (c11 = {c11}, c22 = {c22})")]
    NegativePopulation { c11: f64, c22: f64 },
    #[error("c21 = {c21} is not the conjugate of c12 = {c12}")]
    NotHermitian { c12: C64, c21: C64 },
    #[error("|c12|^2 = {coherence} exceeds c11*c22 = {populations}")]
    NotPositive { coherence: f64, populations: f64 },
}

/// Coefficients `(c11, c12, c21, c22)` of `ρ_C`; `c21` is always `conj(c12)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientVector {
    c11: f64,
    c12: C64,
    c22: f64,
}

impl CoefficientVector {
    /// Builds the vector from `c11` and `c12`; `c22 = 1 − c11`.
    pub fn new(c11: f64, c12: C64) -> std::result::Result<Self, CoefficientError> {
        Self::checked(c11, c12, 1.0 - c11)
    }

    /// Validates a raw 4-tuple against every invariant.
    pub fn from_components(
        c11: C64,
        c12: C64,
        c21: C64,
        c22: C64,
    ) -> std::result::Result<Self, CoefficientError> {
        for (name, z) in [("c11", c11), ("c12", c12), ("c21", c21), ("c22", c22)] {
            if !z.is_finite() {
                return Err(CoefficientError::NonFinite { name });
            }
        }
        if c11.im.abs() > tol::COEFFICIENT
            || c22.im.abs() > tol::COEFFICIENT
            || (c21 - c12.conj()).norm() > tol::COEFFICIENT
        {
            return Err(CoefficientError::NotHermitian { c12, c21 });
        }
        Self::checked(c11.re, c12, c22.re)
    }

    /// State with Bloch vector `(x, y, z)`, `|r| ≤ 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> std::result::Result<Self, CoefficientError> {
        Self::new(0.5 * (1.0 + z), C64::new(0.5 * x, -0.5 * y))
    }

    /// `|ψ⟩⟨ψ|` for `ψ = a|γ1⟩ + b|γ2⟩`, normalized first.
    pub fn from_amplitudes(a: C64, b: C64) -> std::result::Result<Self, CoefficientError> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        Self::new(a.norm_sqr(), a * b.conj())
    }

    fn checked(c11: f64, c12: C64, c22: f64) -> std::result::Result<Self, CoefficientError> {
        if !c11.is_finite() {
            return Err(CoefficientError::NonFinite { name: "c11" });
        }
        if !c12.is_finite() {
            return Err(CoefficientError::NonFinite { name: "c12" });
        }
        if !c22.is_finite() {
            return Err(CoefficientError::NonFinite { name: "c22" });
        }
        if (c11 + c22 - 1.0).abs() > tol::COEFFICIENT {
            return Err(CoefficientError::TraceNotOne { sum: c11 + c22 });
        }
        if c11 < -tol::COEFFICIENT || c22 < -tol::COEFFICIENT {
            return Err(CoefficientError::NegativePopulation { c11, c22 });
        }
        let coherence = c12.norm_sqr();
        let populations = c11 * c22;
        if coherence > populations + tol::COEFFICIENT {
            return Err(CoefficientError::NotPositive {
                coherence,
                populations,
            });
        }
        Ok(Self { c11, c12, c22 })
    }

    pub fn c11(&self) -> f64 {
        self.c11
    }

    pub fn c12(&self) -> C64 {
        self.c12
    }

    pub fn c21(&self) -> C64 {
        self.c12.conj()
    }

    pub fn c22(&self) -> f64 {
        self.c22
    }

    /// `(c11, c12, c21, c22)`.
    pub fn components(&self) -> [C64; 4] {
        [C64::new(self.c11, 0.0), self.c12, self.c21(), C64::new(self.c22, 0.0)]
    }

    /// `c11 c22 − |c12|²`, zero for pure states.
    pub fn purity_gap(&self) -> f64 {
        self.c11 * self.c22 - self.c12.norm_sqr()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.purity_gap().abs() <= tol
    }
}

impl fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(c11={}, c12={}{:+}i, c22={})",
            self.c11, self.c12.re, self.c12.im, self.c22
        )
    }
}

/// Coordinates of a 2×2 operator against `(B11, B12, B21, B22)`.
pub fn to_b_coords(m: &ComplexMatrix) -> [C64; 4] {
    assert_eq!(m.dim(), 2, "B coordinates need a 2×2 operator");
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// Inverse of [`to_b_coords`].
pub fn from_b_coords(v: &[C64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_rows([[v[0], v[1]], [v[2], v[3]]])
}

/// `ρ_C = Σ c_kl C_kl`.
pub fn rho_c(c: &CoefficientVector) -> ComplexMatrix {
    from_b_coords(&c.components())
}

/// `ρ_B = Σ c_kl B_kl`: the same numbers as `ρ_C`, read on Bob's factor.
pub fn rho_b(c: &CoefficientVector) -> ComplexMatrix {
    rho_c(c)
}

/// `ρ_total = ρ_C ⊗ ρ_4` on `C ⊗ A ⊗ B`.
pub fn rho_total(c: &CoefficientVector) -> ComplexMatrix {
    let rho4 = bell_rho(BellIndex::new(4).unwrap(), Placement::AB);
    rho_c(c).tensor(&rho4).expect("2 × 4 fits the total space")
}

/// Terms of the rearrangement `2 ρ_total = Σ_i ρ'_i ⊗ X_i + Σ_kl F_kl`.
#[derive(Debug, Clone)]
pub struct TotalDecomposition {
    /// `X_i`, the operator on `B` paired with `ρ'_i`.
    pub b_factors: [ComplexMatrix; 4],
    /// `ρ'_i ⊗ X_i` on the total space.
    pub bell_terms: [ComplexMatrix; 4],
    /// `F11, F12, F21, F22` on the total space.
    pub residuals: [ComplexMatrix; 4],
}

impl TotalDecomposition {
    pub fn sum(&self) -> ComplexMatrix {
        self.bell_terms
            .iter()
            .chain(&self.residuals)
            .fold(ComplexMatrix::zeros(8), |acc, t| &acc + t)
    }
}

fn unit(s: Subsystem, r: u8, c: u8) -> ComplexMatrix {
    MatrixUnit::new(s, r, c).matrix()
}

/// `C_kl ⊗ A_mn ⊗ B_pq`.
fn cab_unit(k: u8, l: u8, m: u8, n: u8, p: u8, q: u8) -> ComplexMatrix {
    unit(Subsystem::C, k, l)
        .tensor(&unit(Subsystem::A, m, n))
        .and_then(|x| x.tensor(&unit(Subsystem::B, p, q)))
        .unwrap()
}

fn combine(terms: &[(C64, ComplexMatrix)]) -> ComplexMatrix {
    let dim = terms[0].1.dim();
    terms
        .iter()
        .fold(ComplexMatrix::zeros(dim), |acc, (w, m)| &acc + &m.scale(*w))
}

/// Splits `2 ρ_total` into the four primed Bell components and the residual
/// operators `F_kl`, each written out from its closed form in the
/// coefficients. Summing everything gives back `2 ρ_total`.
pub fn decompose_total(c: &CoefficientVector) -> TotalDecomposition {
    let [c11, c12, c21, c22] = c.components();
    let b = |r, col| unit(Subsystem::B, r, col);

    let b_factors = [
        combine(&[(c11, b(2, 2)), (-c12, b(2, 1)), (-c21, b(1, 2)), (c22, b(1, 1))]),
        combine(&[(c11, b(2, 2)), (c12, b(2, 1)), (c21, b(1, 2)), (c22, b(1, 1))]),
        combine(&[(c11, b(1, 1)), (-c12, b(1, 2)), (-c21, b(2, 1)), (c22, b(2, 2))]),
        combine(&[(c11, b(1, 1)), (c12, b(1, 2)), (c21, b(2, 1)), (c22, b(2, 2))]),
    ];
    let bell_terms = std::array::from_fn(|k| {
        bell_rho(BellIndex::ALL[k], Placement::CA)
            .tensor(&b_factors[k])
            .unwrap()
    });

    // F_kl = (±)(coefficients · A_mn ⊗ B_pq) ⊗ C_kl, reordered to C ⊗ A ⊗ B.
    let f11 = combine(&[
        (c22, cab_unit(1, 1, 1, 1, 1, 1)),
        (c11, cab_unit(1, 1, 1, 2, 2, 1)),
        (c11, cab_unit(1, 1, 2, 1, 1, 2)),
        (c22, cab_unit(1, 1, 2, 2, 2, 2)),
    ])
    .scale(-ONE);
    let f12 = combine(&[
        (c12, cab_unit(1, 2, 1, 1, 2, 2)),
        (c21, cab_unit(1, 2, 1, 2, 1, 2)),
        (c21, cab_unit(1, 2, 2, 1, 2, 1)),
        (c12, cab_unit(1, 2, 2, 2, 1, 1)),
    ]);
    let f21 = combine(&[
        (c21, cab_unit(2, 1, 1, 1, 2, 2)),
        (c12, cab_unit(2, 1, 1, 2, 1, 2)),
        (c12, cab_unit(2, 1, 2, 1, 2, 1)),
        (c21, cab_unit(2, 1, 2, 2, 1, 1)),
    ]);
    let f22 = combine(&[
        (c11, cab_unit(2, 2, 1, 1, 1, 1)),
        (c22, cab_unit(2, 2, 1, 2, 2, 1)),
        (c22, cab_unit(2, 2, 2, 1, 1, 2)),
        (c11, cab_unit(2, 2, 2, 2, 2, 2)),
    ])
    .scale(-ONE);

    TotalDecomposition {
        b_factors,
        bell_terms,
        residuals: [f11, f12, f21, f22],
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreparationError {
    #[error("diagonal entries must sum to 1, got {0}")]
    DiagonalSum(C64),
    #[error("diagonal entry u{k}{k}{m}{m} = {value} is not real and nonnegative")]
    NegativeDiagonal { k: u8, m: u8, value: C64 },
    #[error("coefficient u{k}{l}{m}{n} is not finite")]
    NonFinite { k: u8, l: u8, m: u8, n: u8 },
    #[error("expected a 4×4 operator on C⊗A, got dimension {0}")]
    WrongDimension(usize),
}

/// Alice's operator `P = Σ u_klmn C_kl ⊗ A_mn`.
///
/// `normalized` records whether the tensor satisfies `Σ_{k,m} u_kkmm = 1`
/// with real nonnegative diagonal. Constructors that skip the check have to
/// say so explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationTensor {
    u: [C64; 16],
    normalized: bool,
}

fn slot(k: u8, l: u8, m: u8, n: u8) -> usize {
    debug_assert!([k, l, m, n].iter().all(|x| (1..=2).contains(x)));
    usize::from(k - 1) * 8 + usize::from(l - 1) * 4 + usize::from(m - 1) * 2 + usize::from(n - 1)
}

fn indices() -> impl Iterator<Item = (u8, u8, u8, u8)> {
    (0..16u8).map(|s| ((s >> 3) + 1, ((s >> 2) & 1) + 1, ((s >> 1) & 1) + 1, (s & 1) + 1))
}

impl PreparationTensor {
    /// Checks the normalization constraint and sets the flag.
    pub fn normalized(u: [C64; 16]) -> std::result::Result<Self, PreparationError> {
        Self::check_finite(&u)?;
        let mut sum = ZERO;
        for k in 1..=2 {
            for m in 1..=2 {
                let d = u[slot(k, k, m, m)];
                if d.im.abs() > tol::COEFFICIENT || d.re < -tol::COEFFICIENT {
                    return Err(PreparationError::NegativeDiagonal { k, m, value: d });
                }
                sum += d;
            }
        }
        if (sum - ONE).norm() > tol::COEFFICIENT {
            return Err(PreparationError::DiagonalSum(sum));
        }
        Ok(Self { u, normalized: true })
    }

    /// Accepts the tensor without the normalization constraint.
    pub fn unnormalized(u: [C64; 16]) -> std::result::Result<Self, PreparationError> {
        Self::check_finite(&u)?;
        Ok(Self { u, normalized: false })
    }

    /// Reads `u_klmn` off a 4×4 operator on `C ⊗ A`: row `(k, m)`, column `(l, n)`.
    pub fn from_operator(
        op: &ComplexMatrix,
        normalized: bool,
    ) -> std::result::Result<Self, PreparationError> {
        if op.dim() != 4 {
            return Err(PreparationError::WrongDimension(op.dim()));
        }
        let mut u = [ZERO; 16];
        for (k, l, m, n) in indices() {
            let r = usize::from(2 * (k - 1) + (m - 1));
            let c = usize::from(2 * (l - 1) + (n - 1));
            u[slot(k, l, m, n)] = op[(r, c)];
        }
        if normalized {
            Self::normalized(u)
        } else {
            Self::unnormalized(u)
        }
    }

    fn check_finite(u: &[C64; 16]) -> std::result::Result<(), PreparationError> {
        for (k, l, m, n) in indices() {
            if !u[slot(k, l, m, n)].is_finite() {
                return Err(PreparationError::NonFinite { k, l, m, n });
            }
        }
        Ok(())
    }

    /// `u_klmn` with 1-based indices.
    pub fn get(&self, k: u8, l: u8, m: u8, n: u8) -> C64 {
        self.u[slot(k, l, m, n)]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `Σ_{k,m} u_kkmm`.
    pub fn diagonal_sum(&self) -> C64 {
        let mut s = ZERO;
        for k in 1..=2 {
            for m in 1..=2 {
                s += self.get(k, k, m, m);
            }
        }
        s
    }

    /// `Σ u_klmn C_kl ⊗ A_mn` as a 4×4 matrix on `C ⊗ A`.
    pub fn operator(&self) -> ComplexMatrix {
        indices().fold(ComplexMatrix::zeros(4), |acc, (k, l, m, n)| {
            let w = self.get(k, l, m, n);
            if w == ZERO {
                return acc;
            }
            let term = unit(Subsystem::C, k, l)
                .tensor(&unit(Subsystem::A, m, n))
                .unwrap()
                .scale(w);
            &acc + &term
        })
    }
}

/// Projection onto the `i`-th primed Bell operator.
pub fn preparation_from_bell(i: BellIndex) -> PreparationTensor {
    PreparationTensor::from_operator(&bell_rho(i, Placement::CA), true)
        .expect("Bell projectors satisfy the normalization constraint")
}

/// `P_aut = C11⊗A22 − C21⊗A12 − C12⊗A21 + C22⊗A11`, the operator with `T = 1`.
/// Its diagonal sums to 2, so it is flagged as unnormalized.
pub fn p_aut() -> PreparationTensor {
    let mut u = [ZERO; 16];
    u[slot(1, 1, 2, 2)] = ONE;
    u[slot(2, 1, 1, 2)] = -ONE;
    u[slot(1, 2, 2, 1)] = -ONE;
    u[slot(2, 2, 1, 1)] = ONE;
    PreparationTensor::unnormalized(u).unwrap()
}

/// 4×4 map from `c⃗` to twice Bob's raw state in `B` coordinates.
///
/// Rows are `(B11, B12, B21, B22)`, columns `(c11, c12, c21, c22)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformationMatrix {
    t: [[C64; 4]; 4],
}

impl TransformationMatrix {
    pub fn new(t: [[C64; 4]; 4]) -> Self {
        Self { t }
    }

    pub fn identity() -> Self {
        Self::new(std::array::from_fn(|r| {
            std::array::from_fn(|c| if r == c { ONE } else { ZERO })
        }))
    }

    pub fn from_real(t: [[f64; 4]; 4]) -> Self {
        Self::new(t.map(|row| row.map(|x| C64::new(x, 0.0))))
    }

    pub fn entries(&self) -> &[[C64; 4]; 4] {
        &self.t
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        std::array::from_fn(|r| (0..4).map(|c| self.t[r][c] * v[c]).sum())
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(std::array::from_fn(|r| {
            std::array::from_fn(|c| (0..4).map(|k| self.t[r][k] * other.t[k][c]).sum())
        }))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.t.map(|row| row.map(|x| x * s)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((self.t[r][c] - other.t[r][c]).norm());
            }
        }
        worst
    }

    /// Gauss–Jordan inverse with partial pivoting; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let mut a = self.t;
        let mut inv = Self::identity().t;
        let scale = a
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for col in 0..4 {
            let pivot = (col..4).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))?;
            if a[pivot][col].norm() <= 1e-12 * scale {
                return None;
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            for k in 0..4 {
                a[col][k] /= p;
                inv[col][k] /= p;
            }
            for r in 0..4 {
                if r != col {
                    let f = a[r][col];
                    for k in 0..4 {
                        a[r][k] -= f * a[col][k];
                        inv[r][k] -= f * inv[col][k];
                    }
                }
            }
        }
        Some(Self::new(inv))
    }
}

impl fmt::Display for TransformationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.t {
            let cells: Vec<String> = row
                .iter()
                .map(|z| {
                    if z.im == 0.0 {
                        format!("{:+.4}", z.re)
                    } else {
                        format!("{:+.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Builds `T` from `u`:
///
/// ```text
///  u1122  u2122  u1222  u2222
/// -u1112 -u2112 -u1212 -u2212
/// -u1121 -u2121 -u1221 -u2221
///  u1111  u2111  u1211  u2211
/// ```
pub fn transformation_matrix(u: &PreparationTensor) -> TransformationMatrix {
    // Column order (c11, c12, c21, c22) pairs with u_{i p ..} for c_{p i}.
    const COLS: [(u8, u8); 4] = [(1, 1), (2, 1), (1, 2), (2, 2)];
    const ROWS: [(f64, u8, u8); 4] = [(1.0, 2, 2), (-1.0, 1, 2), (-1.0, 2, 1), (1.0, 1, 1)];
    TransformationMatrix::new(std::array::from_fn(|r| {
        let (sign, m, n) = ROWS[r];
        std::array::from_fn(|c| {
            let (i, p) = COLS[c];
            u.get(i, p, m, n) * sign
        })
    }))
}

/// Bob's raw state `Tr_{C,A}((P ⊗ 1_B) ρ_total)`, computed on the full
/// 8-dimensional space. Its trace is generally below 1.
pub fn alice_prepare(u: &PreparationTensor, c: &CoefficientVector) -> ComplexMatrix {
    let lifted = embed(&u.operator(), &SubsystemLayout::pair_ca()).unwrap();
    let product = &lifted * &rho_total(c);
    partial_trace(&product, &SubsystemLayout::total(), &[Subsystem::C, Subsystem::A]).unwrap()
}

/// The same raw state from the index sum
/// `½ Σ_{i,p} c_pi (u_ip11 B22 − u_ip12 B12 − u_ip21 B21 + u_ip22 B11)`.
pub fn alice_prepare_closed_form(u: &PreparationTensor, c: &CoefficientVector) -> ComplexMatrix {
    let comps = c.components();
    let coeff = |p: u8, i: u8| comps[usize::from(2 * (p - 1) + (i - 1))];
    let mut v = [ZERO; 4];
    for i in 1..=2 {
        for p in 1..=2 {
            let w = coeff(p, i) * 0.5;
            v[3] += w * u.get(i, p, 1, 1);
            v[1] -= w * u.get(i, p, 1, 2);
            v[2] -= w * u.get(i, p, 2, 1);
            v[0] += w * u.get(i, p, 2, 2);
        }
    }
    from_b_coords(&v)
}

/// Divides by the trace; fails when the trace is not a positive real above
/// the annihilation threshold.
pub fn renormalize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let tr = m.trace();
    if tr.re <= tol::ANNIHILATION || tr.im.abs() > tol::HERMITICITY {
        return Err(Error::Annihilated { trace: tr });
    }
    Ok(m.scale_real(1.0 / tr.re))
}

/// Unitary `U` with `bob_correct(i, m) = U m U†`; it undoes the Pauli
/// factor attached to `ρ'_i` in the rearranged total state.
pub fn correction_unitary(i: BellIndex) -> ComplexMatrix {
    let s1 = pauli(Pauli::Sigma1);
    let s3 = pauli(Pauli::Sigma3);
    match i.get() {
        1 => &s1 * &s3,
        2 => s1,
        3 => s3,
        _ => ComplexMatrix::identity(2),
    }
}

pub fn bob_correct(i: BellIndex, m: &ComplexMatrix) -> ComplexMatrix {
    let u = correction_unitary(i);
    &(&u * m) * &u.adjoint()
}

/// The map `X ↦ U X U†` written in `B` coordinates.
pub fn conjugation_map(u: &ComplexMatrix) -> TransformationMatrix {
    TransformationMatrix::new(std::array::from_fn(|row| {
        let (i, j) = (row / 2, row % 2);
        std::array::from_fn(|col| {
            let (k, l) = (col / 2, col % 2);
            u[(i, k)] * u[(j, l)].conj()
        })
    }))
}

/// What Alice sends after preparing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalMessage {
    /// Which Bell projection was applied.
    TwoBits(BellIndex),
    /// "Done"; the preparation was agreed on beforehand.
    OneBitPing,
    /// Preparation and timing agreed beforehand; nothing is sent.
    PreAgreed,
}

impl ClassicalMessage {
    pub fn bits(self) -> u8 {
        match self {
            Self::TwoBits(_) => 2,
            Self::OneBitPing => 1,
            Self::PreAgreed => 0,
        }
    }
}

/// The operation Alice applies on `C ⊗ A`.
#[derive(Debug, Clone, PartialEq)]
pub enum Preparation {
    Bell(BellIndex),
    Automatic,
    Custom(Box<PreparationTensor>),
}

impl Preparation {
    pub fn tensor(&self) -> PreparationTensor {
        match self {
            Self::Bell(i) => preparation_from_bell(*i),
            Self::Automatic => p_aut(),
            Self::Custom(u) => (**u).clone(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Bell(i) => format!("bell{i}"),
            Self::Automatic => "paut".to_owned(),
            Self::Custom(_) => "custom".to_owned(),
        }
    }
}

/// Outcome of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionRecord {
    /// Bob's final, trace-one state.
    pub bob_state: ComplexMatrix,
    /// `Tr(ρ_C ρ_Bob)`.
    pub fidelity: f64,
    pub bits_sent: u8,
    /// Trace of the raw state before renormalization.
    pub raw_trace: f64,
    /// Map from `c⃗` to Bob's final (unnormalized) coordinates, including
    /// his correction when he acts.
    pub effective_transformation: TransformationMatrix,
}

/// Assemble, prepare, renormalize, optionally correct, and score.
pub fn run_session(
    c: &CoefficientVector,
    prep: &Preparation,
    message: ClassicalMessage,
    bob_acts: bool,
) -> Result<SessionRecord> {
    if let ClassicalMessage::TwoBits(i) = message {
        if *prep != Preparation::Bell(i) {
            return Err(Error::MessageMismatch {
                message,
                preparation: prep.label(),
            });
        }
    }

    let u = prep.tensor();
    let t = transformation_matrix(&u);
    let raw = alice_prepare(&u, c);
    let raw_trace = raw.trace().re;
    let state = renormalize(&raw)?;

    let (bob_state, effective_transformation) = if bob_acts {
        match prep {
            Preparation::Bell(i) => {
                let map = conjugation_map(&correction_unitary(*i));
                (bob_correct(*i, &state), map.compose(&t))
            }
            Preparation::Automatic => (state, t),
            Preparation::Custom(_) => {
                let inv = t.inverse().ok_or(Error::SingularTransformation)?;
                let undone = from_b_coords(&inv.apply(&to_b_coords(&state)));
                (renormalize(&undone)?, inv.compose(&t))
            }
        }
    } else {
        (state, t)
    };

    let fidelity = fidelity_trace(c, &bob_state)?;
    Ok(SessionRecord {
        bob_state,
        fidelity,
        bits_sent: message.bits(),
        raw_trace,
        effective_transformation,
    })
}
