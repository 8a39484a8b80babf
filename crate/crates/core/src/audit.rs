//! Numerical audits of the Bell projectors and of `P_aut`.

use crate::bell::{bell_rho, min_partial_transpose_eigenvalue, ppt_entangled, BellIndex, Placement};
use crate::error::Result;
use crate::linalg::{hermitian_spectrum, spectral_norm, ComplexMatrix, SubsystemLayout, C64};
use crate::protocol::{p_aut, transformation_matrix, TransformationMatrix};

/// `‖ρ_i ρ_j − δ_ij ρ_i‖∞` for one ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairResidual {
    pub i: BellIndex,
    pub j: BellIndex,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorAudit {
    pub i: BellIndex,
    pub trace: f64,
    pub min_partial_transpose_eigenvalue: f64,
    pub entangled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellAudit {
    pub pairs: Vec<PairResidual>,
    pub operators: Vec<OperatorAudit>,
    /// `‖Σ ρ_i − 1‖∞`.
    pub completeness_residual: f64,
}

impl BellAudit {
    pub fn max_pair_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_pair_residual() < tol
            && self.completeness_residual < tol
            && self.operators.iter().all(|o| o.entangled && (o.trace - 1.0).abs() < tol)
    }
}

pub fn bell_audit() -> Result<BellAudit> {
    let layout = SubsystemLayout::pair_ab();
    let mut pairs = Vec::with_capacity(16);
    let mut operators = Vec::with_capacity(4);
    let mut sum = ComplexMatrix::zeros(4);
    for i in BellIndex::ALL {
        let ri = bell_rho(i, Placement::AB);
        for j in BellIndex::ALL {
            let rj = bell_rho(j, Placement::AB);
            let product = &ri * &rj;
            let residual = if i == j {
                product.max_abs_diff(&ri)
            } else {
                product.max_abs()
            };
            pairs.push(PairResidual { i, j, residual });
        }
        operators.push(OperatorAudit {
            i,
            trace: ri.trace().re,
            min_partial_transpose_eigenvalue: min_partial_transpose_eigenvalue(&ri, &layout)?,
            entangled: ppt_entangled(&ri, &layout)?,
        });
        sum = &sum + &ri;
    }
    Ok(BellAudit {
        pairs,
        operators,
        completeness_residual: sum.max_abs_diff(&ComplexMatrix::identity(4)),
    })
}

/// Least-squares `λ` in `P² ≈ λP`, with the residual `‖P² − λP‖∞`.
pub fn idempotence_factor(p: &ComplexMatrix) -> (f64, f64) {
    let p2 = p * p;
    let num: C64 = p.entries().iter().zip(p2.entries()).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = p.entries().iter().map(|a| a.norm_sqr()).sum();
    let lambda = num.re / den;
    (lambda, p2.max_abs_diff(&p.scale_real(lambda)))
}

/// Eigenvalues `(+1, +1, −1, −1)` that have been stated for `P_aut`; the
/// computed spectrum is compared against them.
pub const CLAIMED_PAUT_SPECTRUM: [f64; 4] = [1.0, 1.0, -1.0, -1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct PautAudit {
    pub spectrum: Vec<f64>,
    pub spectral_norm: f64,
    pub idempotence_factor: f64,
    pub idempotence_residual: f64,
    pub trace: f64,
    pub self_adjoint_defect: f64,
    pub transformation: TransformationMatrix,
    /// Largest gap between the computed spectrum and [`CLAIMED_PAUT_SPECTRUM`].
    pub claimed_spectrum_gap: f64,
    pub note: String,
}

impl PautAudit {
    /// True when the computed quantities match `P² = 2P`, norm 2, spectrum
    /// `{2, 0, 0, 0}` and `T = 1` within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        let expected = [2.0, 0.0, 0.0, 0.0];
        (self.idempotence_factor - 2.0).abs() < tol
            && self.idempotence_residual < tol
            && (self.spectral_norm - 2.0).abs() < tol
            && self.spectrum.iter().zip(expected).all(|(a, b)| (a - b).abs() < tol)
            && (self.trace - 2.0).abs() < tol
            && self.transformation.max_abs_diff(&TransformationMatrix::identity()) < tol
    }
}

pub fn paut_audit() -> Result<PautAudit> {
    let tensor = p_aut();
    let p = tensor.operator();
    let spectrum = hermitian_spectrum(&p)?;
    let (idempotence_factor, idempotence_residual) = idempotence_factor(&p);
    let claimed_spectrum_gap = spectrum
        .iter()
        .zip(CLAIMED_PAUT_SPECTRUM)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let note = if claimed_spectrum_gap > 1e-10 {
        format!(
            "computed spectrum {spectrum:?} differs from the claimed (+1, +1, -1, -1) \
             by up to {claimed_spectrum_gap}; P^2 = 2P restricts eigenvalues to {{0, 2}} \
             and trace 2 leaves exactly one eigenvalue 2"
        )
    } else {
        String::new()
    };
    Ok(PautAudit {
        spectral_norm: spectral_norm(&p)?,
        spectrum,
        idempotence_factor,
        idempotence_residual,
        trace: p.trace().re,
        self_adjoint_defect: p.hermiticity_defect(),
        transformation: transformation_matrix(&tensor),
        claimed_spectrum_gap,
        note,
    })
}
