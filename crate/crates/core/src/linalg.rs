//! Dense complex matrices sized for one, two and three qubit-like factors.
//!
//! Every operator in the crate is a [`ComplexMatrix`] of dimension 2, 4 or 8.
//! Composite index spaces are described by a [`SubsystemLayout`]: an ordered
//! list of two-level factors where the last factor varies fastest. For the
//! three-factor layout `C ⊗ A ⊗ B` the basis is `|γ_i α_j β_k⟩` with `k`
//! fastest, so row index `4i + 2j + k` (zero based).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::tol;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Largest matrix dimension any operation here will produce.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("dimension {dim} exceeds the supported maximum of {MAX_DIM}")]
    DimensionTooLarge { dim: usize },
    #[error("expected {expected} entries for a square matrix, got {got}")]
    BadEntryCount { expected: usize, got: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("subsystem {0} is not part of layout {1}")]
    UnknownSubsystem(Subsystem, SubsystemLayout),
    #[error("subsystem {0} appears more than once in a layout")]
    DuplicateSubsystem(Subsystem),
    #[error("matrix of dimension {matrix} does not fit layout {layout} (dimension {layout_dim})")]
    LayoutMismatch {
        matrix: usize,
        layout: SubsystemLayout,
        layout_dim: usize,
    },
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("not a statistical operator: {0}")]
    InvalidStatisticalOperator(StatisticalOperatorViolation),
}

/// Which defining property of a statistical operator failed.
#[derive(Debug, Clone, PartialEq)]
pub enum StatisticalOperatorViolation {
    NotHermitian { max_asymmetry: f64 },
    TraceNotOne { trace: C64 },
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for StatisticalOperatorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotHermitian { max_asymmetry } => {
                write!(f, "not self-adjoint (max asymmetry {max_asymmetry:e})")
            }
            Self::TraceNotOne { trace } => write!(f, "trace is {trace}, expected 1"),
            Self::NotPositive { min_eigenvalue } => {
                write!(f, "negative eigenvalue {min_eigenvalue:e}")
            }
        }
    }
}

/// A two-level tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    /// The incoming ensemble whose state is teleported.
    C,
    /// Alice's half of the correlated pair.
    A,
    /// Bob's half of the correlated pair.
    B,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::C => "C",
            Self::A => "A",
            Self::B => "B",
        };
        f.write_str(s)
    }
}

/// Ordered list of two-dimensional factors; the last factor varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    factors: Vec<Subsystem>,
}

impl SubsystemLayout {
    pub fn new(factors: &[Subsystem]) -> Result<Self, LinalgError> {
        for (i, f) in factors.iter().enumerate() {
            if factors[..i].contains(f) {
                return Err(LinalgError::DuplicateSubsystem(*f));
            }
        }
        if factors.len() > 3 {
            return Err(LinalgError::DimensionTooLarge {
                dim: 1 << factors.len(),
            });
        }
        Ok(Self {
            factors: factors.to_vec(),
        })
    }

    /// `C ⊗ A ⊗ B`, the total space.
    pub fn total() -> Self {
        Self {
            factors: vec![Subsystem::C, Subsystem::A, Subsystem::B],
        }
    }

    /// `A ⊗ B`, the correlated pair.
    pub fn pair_ab() -> Self {
        Self {
            factors: vec![Subsystem::A, Subsystem::B],
        }
    }

    /// `C ⊗ A`, Alice's side.
    pub fn pair_ca() -> Self {
        Self {
            factors: vec![Subsystem::C, Subsystem::A],
        }
    }

    pub fn single(s: Subsystem) -> Self {
        Self { factors: vec![s] }
    }

    pub fn factors(&self) -> &[Subsystem] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Product of the local dimensions.
    pub fn dim(&self) -> usize {
        1 << self.factors.len()
    }

    pub fn position(&self, s: Subsystem) -> Option<usize> {
        self.factors.iter().position(|&f| f == s)
    }

    fn require(&self, s: Subsystem) -> Result<usize, LinalgError> {
        self.position(s)
            .ok_or_else(|| LinalgError::UnknownSubsystem(s, self.clone()))
    }

    /// Layout with the given factors removed, order preserved.
    pub fn without(&self, removed: &[Subsystem]) -> Result<Self, LinalgError> {
        for &s in removed {
            self.require(s)?;
        }
        Ok(Self {
            factors: self
                .factors
                .iter()
                .copied()
                .filter(|f| !removed.contains(f))
                .collect(),
        })
    }

    fn check_matrix(&self, m: &ComplexMatrix) -> Result<(), LinalgError> {
        if m.dim != self.dim() {
            return Err(LinalgError::LayoutMismatch {
                matrix: m.dim,
                layout: self.clone(),
                layout_dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Splits a global basis index into per-factor bits, first factor first.
    fn digits(&self, index: usize) -> [usize; 3] {
        let n = self.factors.len();
        let mut d = [0; 3];
        for (f, slot) in d.iter_mut().enumerate().take(n) {
            *slot = (index >> (n - 1 - f)) & 1;
        }
        d
    }

    fn compose(&self, digits: &[usize; 3]) -> usize {
        let n = self.factors.len();
        digits[..n].iter().fold(0, |acc, &b| (acc << 1) | b)
    }
}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.factors.iter().map(|s| s.to_string()).collect();
        write!(f, "[{}]", names.join("⊗"))
    }
}

/// Dense square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LinalgError::DimensionTooLarge { dim });
        }
        if data.len() != dim * dim {
            return Err(LinalgError::BadEntryCount {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0 && dim <= MAX_DIM, "unsupported dimension {dim}");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| rows[r][c])
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| C64::new(rows[r][c], 0.0))
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; `self` becomes the slower-varying factor.
    pub fn tensor(&self, other: &Self) -> Result<Self, LinalgError> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(LinalgError::DimensionTooLarge { dim });
        }
        let m = other.dim;
        Ok(Self::from_fn(dim, |r, c| {
            self[(r / m, c / m)] * other[(r % m, c % m)]
        }))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entry modulus (the entrywise ∞-norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    ///
    /// Panics if the dimensions differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |a_ij − conj(a_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    fn same_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

// Operator sugar. These panic on dimension mismatch; use the checked
// methods where the dimensions are not fixed by construction.

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "adding matrices of different dims");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "subtracting matrices of different dims");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("multiplying matrices of different dims")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "{}", row.join("  "))?;
        }
        Ok(())
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.matmul(b)
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    a.tensor(b)
}

pub fn trace(a: &ComplexMatrix) -> C64 {
    a.trace()
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Traces out `traced_out` and returns the operator on the remaining factors,
/// which keep their relative order.
pub fn partial_trace(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    traced_out: &[Subsystem],
) -> Result<ComplexMatrix, LinalgError> {
    layout.check_matrix(m)?;
    let kept = layout.without(traced_out)?;
    let kept_pos: Vec<usize> = kept
        .factors()
        .iter()
        .map(|&s| layout.position(s).unwrap())
        .collect();
    let traced_pos: Vec<usize> = (0..layout.len())
        .filter(|p| !kept_pos.contains(p))
        .collect();

    let out_dim = kept.dim();
    let mut out = ComplexMatrix::zeros(out_dim);
    for r in 0..out_dim {
        let rd = kept.digits(r);
        for c in 0..out_dim {
            let cd = kept.digits(c);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..(1usize << traced_pos.len()) {
                let mut row = [0; 3];
                let mut col = [0; 3];
                for (k, &p) in kept_pos.iter().enumerate() {
                    row[p] = rd[k];
                    col[p] = cd[k];
                }
                for (k, &p) in traced_pos.iter().enumerate() {
                    let bit = (t >> (traced_pos.len() - 1 - k)) & 1;
                    row[p] = bit;
                    col[p] = bit;
                }
                acc += m[(layout.compose(&row), layout.compose(&col))];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the indices of one factor, leaving the others untouched.
pub fn partial_transpose(
    m: &ComplexMatrix,
    layout: &SubsystemLayout,
    on: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    layout.check_matrix(m)?;
    let p = layout.require(on)?;
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let mut rd = layout.digits(r);
            let mut cd = layout.digits(c);
            std::mem::swap(&mut rd[p], &mut cd[p]);
            out[(layout.compose(&rd), layout.compose(&cd))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Lifts `op`, acting on the factors of `op_layout`, to the larger
/// `full_layout` by tensoring with the identity on every other factor.
pub fn embed_into(
    op: &ComplexMatrix,
    op_layout: &SubsystemLayout,
    full_layout: &SubsystemLayout,
) -> Result<ComplexMatrix, LinalgError> {
    op_layout.check_matrix(op)?;
    let positions = op_layout
        .factors()
        .iter()
        .map(|&s| full_layout.require(s))
        .collect::<Result<Vec<_>, _>>()?;
    let n = full_layout.dim();
    let mut out = ComplexMatrix::zeros(n);
    for r in 0..n {
        let rd = full_layout.digits(r);
        for c in 0..n {
            let cd = full_layout.digits(c);
            let spectator_match = (0..full_layout.len())
                .filter(|p| !positions.contains(p))
                .all(|p| rd[p] == cd[p]);
            if !spectator_match {
                continue;
            }
            let mut lr = [0; 3];
            let mut lc = [0; 3];
            for (k, &p) in positions.iter().enumerate() {
                lr[k] = rd[p];
                lc[k] = cd[p];
            }
            out[(r, c)] = op[(op_layout.compose(&lr), op_layout.compose(&lc))];
        }
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// Cyclic complex Jacobi: each rotation removes the phase of the pivot and
/// then applies a real Givens rotation. Sweeps stop once the off-diagonal
/// Frobenius mass drops below [`tol::JACOBI_OFF_DIAGONAL`] (scaled by the
/// matrix norm when that exceeds 1).
pub fn hermitian_spectrum(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let defect = a.hermiticity_defect();
    if defect > tol::HERMITICITY {
        return Err(LinalgError::NotHermitian {
            max_asymmetry: defect,
        });
    }
    let n = a.dim();
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    let mut h = ComplexMatrix::from_fn(n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let threshold = tol::JACOBI_OFF_DIAGONAL * h.frobenius_norm().max(1.0);

    for _sweep in 0..100 {
        if off_diagonal_mass(&h) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut h, p, q);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

fn off_diagonal_mass(h: &ComplexMatrix) -> f64 {
    let n = h.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += h[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_rotate(h: &mut ComplexMatrix, p: usize, q: usize) {
    let b = h[(p, q)];
    let mag = b.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    // Phase e^{-iφ} makes the pivot real: b e^{-iφ} = |b|.
    let phase = (b / mag).conj();
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;

    // G has columns g_p = (c, -s e^{-iφ}) and g_q = (s, c e^{-iφ}) on (p, q).
    let g_pp = C64::new(cs, 0.0);
    let g_qp = -phase * sn;
    let g_pq = C64::new(sn, 0.0);
    let g_qq = phase * cs;

    let n = h.dim();
    // H <- H G
    for k in 0..n {
        let hkp = h[(k, p)];
        let hkq = h[(k, q)];
        h[(k, p)] = hkp * g_pp + hkq * g_qp;
        h[(k, q)] = hkp * g_pq + hkq * g_qq;
    }
    // H <- G† H
    for k in 0..n {
        let hpk = h[(p, k)];
        let hqk = h[(q, k)];
        h[(p, k)] = g_pp.conj() * hpk + g_qp.conj() * hqk;
        h[(q, k)] = g_pq.conj() * hpk + g_qq.conj() * hqk;
    }
    h[(p, q)] = C64::new(0.0, 0.0);
    h[(q, p)] = C64::new(0.0, 0.0);
    h[(p, p)] = C64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = C64::new(h[(q, q)].re, 0.0);
}

/// Largest eigenvalue modulus of a Hermitian matrix.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(hermitian_spectrum(a)?
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max))
}

/// Checks self-adjointness, unit trace and positivity.
pub fn check_statistical_operator(m: &ComplexMatrix) -> Result<(), LinalgError> {
    let invalid = LinalgError::InvalidStatisticalOperator;
    let defect = m.hermiticity_defect();
    if defect > tol::HERMITICITY {
        return Err(invalid(StatisticalOperatorViolation::NotHermitian {
            max_asymmetry: defect,
        }));
    }
    let tr = m.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol::HERMITICITY {
        return Err(invalid(StatisticalOperatorViolation::TraceNotOne { trace: tr }));
    }
    let min = *hermitian_spectrum(m)?.last().unwrap();
    if min < -tol::EIGENVALUE {
        return Err(invalid(StatisticalOperatorViolation::NotPositive {
            min_eigenvalue: min,
        }));
    }
    Ok(())
}
