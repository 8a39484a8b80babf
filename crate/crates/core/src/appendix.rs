//! Two update rules for Bob's state after Alice's operation `P`:
//!
//! * ansatz: `Tr_{C,A}((P ⊗ 1) ρ) / Tr(...)`
//! * sandwich: `Tr_{C,A}((P ⊗ 1) ρ (P ⊗ 1)) / Tr(...)`
//!
//! For a projector `P² = P` the two numerators coincide. For `P_aut`,
//! `P² = 2P` makes the sandwich numerator exactly twice the ansatz one, and
//! the normalized results still coincide.

use crate::bell::embed;
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix, Subsystem, SubsystemLayout};
use crate::protocol::{alice_prepare, renormalize, rho_total, CoefficientVector, PreparationTensor};
use crate::tol;

/// `Tr_{C,A}((P ⊗ 1_B) ρ_total (P ⊗ 1_B))`, before normalization.
pub fn sandwich_numerator(u: &PreparationTensor, c: &CoefficientVector) -> ComplexMatrix {
    let lifted = embed(&u.operator(), &SubsystemLayout::pair_ca()).unwrap();
    let n = &(&lifted * &rho_total(c)) * &lifted;
    partial_trace(&n, &SubsystemLayout::total(), &[Subsystem::C, Subsystem::A]).unwrap()
}

/// Sandwich-rule state, divided by the total trace of the numerator.
pub fn prepare_sandwich(u: &PreparationTensor, c: &CoefficientVector) -> Result<ComplexMatrix> {
    let numerator = sandwich_numerator(u, c);
    let tr = numerator.trace();
    if tr.re <= tol::ANNIHILATION || tr.im.abs() > tol::HERMITICITY {
        return Err(Error::Annihilated { trace: tr });
    }
    Ok(numerator.scale_real(1.0 / tr.re))
}

/// Both conventions for one `(P, c)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionResult {
    pub ansatz: ComplexMatrix,
    pub sandwich: ComplexMatrix,
    /// Largest entrywise gap after normalization.
    pub max_abs_diff: f64,
    /// Trace of the ansatz numerator.
    pub ansatz_trace: f64,
    /// Trace of the sandwich numerator.
    pub sandwich_trace: f64,
}

impl ConventionResult {
    /// Sandwich over ansatz numerator trace: 1 for projectors, 2 for `P_aut`.
    pub fn numerator_factor(&self) -> f64 {
        self.sandwich_trace / self.ansatz_trace
    }
}

pub fn compare_conventions(u: &PreparationTensor, c: &CoefficientVector) -> Result<ConventionResult> {
    let raw = alice_prepare(u, c);
    let ansatz = renormalize(&raw)?;
    let sandwich = prepare_sandwich(u, c)?;
    Ok(ConventionResult {
        max_abs_diff: ansatz.max_abs_diff(&sandwich),
        ansatz_trace: raw.trace().re,
        sandwich_trace: sandwich_numerator(u, c).trace().re,
        ansatz,
        sandwich,
    })
}
