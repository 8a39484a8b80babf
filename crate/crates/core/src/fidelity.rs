//! Teleportation fidelity.
//!
//! Two formulations are kept side by side. The trace form `Tr(ρ_C ρ_Bob)` is
//! authoritative. The vector form evaluates `c⃗·c⃗ + c⃗·(T/‖Tc⃗‖ − 1)c⃗` with the
//! unconjugated (bilinear) product, where `‖v‖` is the trace of the operator
//! `v` represents, `v[0] + v[3]`. The two agree for real coefficient
//! vectors; for complex `c12` they can differ, and [`FidelityReport`] says so
//! instead of hiding it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::protocol::{
    rho_c, run_session, ClassicalMessage, CoefficientVector, Preparation, TransformationMatrix,
};
use crate::sampling::{sample_batch, Sampler};
use crate::tol;

/// `Tr(ρ_C ρ_Bob)` with `ρ_C` carried over to Bob's factor.
pub fn fidelity_trace(c: &CoefficientVector, bob: &ComplexMatrix) -> Result<f64> {
    let tr = bob.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol::HERMITICITY {
        return Err(Error::UnnormalizedState { trace: tr });
    }
    let f = rho_c(c).matmul(bob)?.trace();
    if f.im.abs() > tol::FIDELITY_IMAGINARY {
        return Err(Error::FidelityNotReal { imaginary: f.im });
    }
    Ok(f.re)
}

fn bilinear(a: &[C64; 4], b: &[C64; 4]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Vector-form fidelity for Bob's state `T c⃗ / ‖T c⃗‖`.
pub fn fidelity_vector(c: &CoefficientVector, t: &TransformationMatrix) -> Result<f64> {
    let cv = c.components();
    let tc = t.apply(&cv);
    let norm = tc[0] + tc[3];
    if norm.re <= tol::ANNIHILATION || norm.im.abs() > tol::HERMITICITY {
        return Err(Error::Annihilated { trace: norm });
    }
    // (T/‖Tc⃗‖ − 1) c⃗
    let contamination: [C64; 4] = std::array::from_fn(|k| tc[k] / norm - cv[k]);
    let f = bilinear(&cv, &cv) + bilinear(&cv, &contamination);
    if f.im.abs() > tol::FIDELITY_IMAGINARY {
        return Err(Error::FidelityNotReal { imaginary: f.im });
    }
    Ok(f.re)
}

/// Both fidelity formulations for one session.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub trace_form: f64,
    pub vector_form: f64,
    pub agree: bool,
    pub note: String,
}

impl FidelityReport {
    pub fn new(trace_form: f64, vector_form: f64) -> Self {
        let gap = (trace_form - vector_form).abs();
        let agree = gap < tol::FIDELITY_AGREEMENT;
        let note = if agree {
            String::new()
        } else {
            format!(
                "vector form differs from trace form by {gap:.3e}; \
                 the bilinear product ignores the conjugation on c12"
            )
        };
        Self {
            trace_form,
            vector_form,
            agree,
            note,
        }
    }

    pub fn evaluate(
        c: &CoefficientVector,
        bob: &ComplexMatrix,
        t: &TransformationMatrix,
    ) -> Result<Self> {
        Ok(Self::new(fidelity_trace(c, bob)?, fidelity_vector(c, t)?))
    }
}

/// `2 c11 c22 − 2 c12 c21`, the fidelity when Bob skips his correction after
/// a projection onto `ρ'_1`.
pub fn lazy_fidelity(c: &CoefficientVector) -> f64 {
    2.0 * c.c11() * c.c22() - 2.0 * (c.c12() * c.c21()).re
}

/// Result of [`maximize_lazy_fidelity`].
#[derive(Debug, Clone, PartialEq)]
pub struct LazyOptimum {
    pub argmax: CoefficientVector,
    pub max: f64,
}

/// Phases of `c12` tried on the grid.
pub const PHASE_STEPS: usize = 8;

/// `c11 = x`, `c12 = r·sqrt(x(1 − x))·e^{iφ}`; `r ∈ [0, 1]` spans the
/// positivity constraint.
fn point(x: f64, r: f64, phase: f64) -> CoefficientVector {
    let x = x.clamp(0.0, 1.0);
    let bound = (x * (1.0 - x)).max(0.0).sqrt();
    CoefficientVector::new(x, C64::from_polar(r * bound, phase))
        .expect("grid points lie inside the constraint set")
}

/// Grid search over `(c11, |c12|, arg c12)` followed by golden-section
/// refinement in `c11`. `resolution` is the number of grid steps per unit
/// interval and must be at least 10.
pub fn maximize_lazy_fidelity(resolution: usize) -> Result<LazyOptimum> {
    search_lazy(resolution, None)
}

/// As [`maximize_lazy_fidelity`], with `|c12|` pinned to the given fraction
/// of `sqrt(c11 c22)`; a fraction of 1 restricts to pure states.
pub fn maximize_lazy_fidelity_at_coherence(resolution: usize, fraction: f64) -> Result<LazyOptimum> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!(
            "coherence fraction {fraction} outside [0, 1]"
        )));
    }
    search_lazy(resolution, Some(fraction))
}

fn search_lazy(resolution: usize, fixed_fraction: Option<f64>) -> Result<LazyOptimum> {
    if resolution < 10 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 10, got {resolution}"
        )));
    }
    let step = 1.0 / resolution as f64;
    let fractions: Vec<f64> = match fixed_fraction {
        Some(f) => vec![f],
        None => (0..=resolution).map(|j| j as f64 * step).collect(),
    };
    let phases: Vec<f64> = (0..PHASE_STEPS)
        .map(|k| std::f64::consts::TAU * k as f64 / PHASE_STEPS as f64)
        .collect();

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    for i in 0..=resolution {
        let x = i as f64 * step;
        for &r in &fractions {
            for &phase in &phases {
                let f = lazy_fidelity(&point(x, r, phase));
                if f > best.0 {
                    best = (f, x, r, phase);
                }
            }
        }
    }

    let (_, x0, r, phase) = best;
    let objective = |x: f64| lazy_fidelity(&point(x, r, phase));
    let x = golden_section_max(objective, (x0 - step).max(0.0), (x0 + step).min(1.0), 1e-12);
    let (x, max) = if objective(x) >= best.0 { (x, objective(x)) } else { (x0, best.0) };
    Ok(LazyOptimum {
        argmax: point(x, r, phase),
        max,
    })
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// Monte-Carlo summary of fidelities over sampled inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageFidelity {
    pub samples: usize,
    /// Mean and standard error of the trace form.
    pub mean: f64,
    pub stderr: f64,
    /// Mean and standard error of the vector form.
    pub vector_mean: f64,
    pub vector_stderr: f64,
    /// Largest per-sample gap between the two forms.
    pub max_divergence: f64,
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Average fidelity of `prep` over `n ≥ 100` states drawn by `sampler`.
///
/// Bob corrects when `bob_acts`; a Bell preparation is then announced with
/// its two bits, anything else is taken as pre-agreed.
pub fn average_fidelity(
    prep: &Preparation,
    bob_acts: bool,
    sampler: Sampler,
    n: usize,
    seed: u64,
) -> Result<AverageFidelity> {
    if n < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 samples, got {n}"
        )));
    }
    let message = match prep {
        Preparation::Bell(i) if bob_acts => ClassicalMessage::TwoBits(*i),
        _ => ClassicalMessage::PreAgreed,
    };
    let inputs = sample_batch(sampler, n, seed);
    let pairs = inputs
        .par_iter()
        .map(|c| {
            let rec = run_session(c, prep, message, bob_acts)?;
            let vector = fidelity_vector(c, &rec.effective_transformation)?;
            Ok((rec.fidelity, vector))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;

    let traces: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vectors: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mean, stderr) = mean_stderr(&traces);
    let (vector_mean, vector_stderr) = mean_stderr(&vectors);
    let max_divergence = pairs
        .iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(AverageFidelity {
        samples: n,
        mean,
        stderr,
        vector_mean,
        vector_stderr,
        max_divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{pauli, BellIndex, Pauli};
    use crate::protocol::{preparation_from_bell, rho_b, transformation_matrix};

    fn cv(c11: f64, re: f64, im: f64) -> CoefficientVector {
        CoefficientVector::new(c11, C64::new(re, im)).unwrap()
    }

    fn t_bell1() -> TransformationMatrix {
        transformation_matrix(&preparation_from_bell(BellIndex::new(1).unwrap()))
    }

    #[test]
    fn trace_form_examples() {
        let pure = cv(0.2, 0.4, 0.0);
        assert!((fidelity_trace(&pure, &rho_b(&pure)).unwrap() - 1.0).abs() < 1e-12);
        let up = cv(1.0, 0.0, 0.0);
        let down = rho_b(&cv(0.0, 0.0, 0.0));
        assert_eq!(fidelity_trace(&up, &down).unwrap(), 0.0);
        let mixed = cv(0.5, 0.0, 0.0);
        let s31 = &pauli(Pauli::Sigma3) * &pauli(Pauli::Sigma1);
        let bob = &(&s31 * &rho_b(&mixed)) * &s31.adjoint();
        assert!((fidelity_trace(&mixed, &bob).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn trace_form_rejects_unnormalized() {
        let c = cv(0.5, 0.0, 0.0);
        assert!(matches!(
            fidelity_trace(&c, &ComplexMatrix::identity(2)),
            Err(Error::UnnormalizedState { .. })
        ));
    }

    #[test]
    fn trace_form_rejects_complex_overlap() {
        // A trace-one but non-Hermitian "state" yields a complex overlap.
        let c = cv(0.5, 0.5, 0.0);
        let bob = ComplexMatrix::from_rows([
            [C64::new(0.5, 0.0), C64::new(0.0, 0.3)],
            [C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        ]);
        assert!(matches!(fidelity_trace(&c, &bob), Err(Error::FidelityNotReal { .. })));
    }

    #[test]
    fn vector_form_examples() {
        let pure = cv(0.36, 0.48, 0.0);
        assert!((fidelity_vector(&pure, &TransformationMatrix::identity()).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity_vector(&cv(0.5, 0.0, 0.0), &t_bell1()).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity_vector(&cv(1.0, 0.0, 0.0), &t_bell1()).unwrap().abs() < 1e-12);
        let zero = TransformationMatrix::new([[C64::new(0.0, 0.0); 4]; 4]);
        assert!(matches!(
            fidelity_vector(&pure, &zero),
            Err(Error::Annihilated { .. })
        ));
    }

    #[test]
    fn lazy_examples() {
        assert_eq!(lazy_fidelity(&cv(0.5, 0.0, 0.0)), 0.5);
        assert_eq!(lazy_fidelity(&cv(1.0, 0.0, 0.0)), 0.0);
        let pure = cv(0.3, 0.3, (0.21f64 - 0.09).sqrt());
        assert!(lazy_fidelity(&pure).abs() < 1e-12);
    }

    #[test]
    fn report_flags_divergence() {
        let r = FidelityReport::new(0.5, 0.5);
        assert!(r.agree && r.note.is_empty());
        let r = FidelityReport::new(0.25, 0.0);
        assert!(!r.agree && !r.note.is_empty());
    }

    #[test]
    fn complex_coherence_splits_the_forms() {
        // c12 = i/2 (pure): lazy trace form is 4 Im(c12)² = 1, vector form 0.
        let c = cv(0.5, 0.0, 0.5);
        let s31 = &pauli(Pauli::Sigma3) * &pauli(Pauli::Sigma1);
        let bob = &(&s31 * &rho_b(&c)) * &s31.adjoint();
        let report = FidelityReport::evaluate(&c, &bob, &t_bell1()).unwrap();
        assert!((report.trace_form - 1.0).abs() < 1e-12);
        assert!(report.vector_form.abs() < 1e-12);
        assert!(!report.agree);
    }

    #[test]
    fn optimizer_finds_half() {
        let opt = maximize_lazy_fidelity(100).unwrap();
        assert!((opt.max - 0.5).abs() < 1e-6);
        assert!((opt.argmax.c11() - 0.5).abs() < 1e-6);
        assert!(opt.argmax.c12().norm() < 1e-6);
        assert!(maximize_lazy_fidelity(9).is_err());
    }

    #[test]
    fn optimizer_on_pure_slice_is_zero() {
        let opt = maximize_lazy_fidelity_at_coherence(50, 1.0).unwrap();
        assert!(opt.max.abs() < 1e-12);
        assert!(maximize_lazy_fidelity_at_coherence(50, 1.5).is_err());
    }

    #[test]
    fn golden_section_on_parabola() {
        let x = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
    }

    #[test]
    fn average_requires_enough_samples() {
        assert!(average_fidelity(&Preparation::Automatic, false, Sampler::PureUniform, 10, 1).is_err());
    }

    #[test]
    fn automatic_average_is_one() {
        let avg = average_fidelity(&Preparation::Automatic, false, Sampler::PureUniform, 200, 11).unwrap();
        assert!((avg.mean - 1.0).abs() < 1e-12);
        assert!(avg.stderr < 1e-12);
    }

    #[test]
    fn lazy_bell_average_reports_both_forms() {
        // Trace form is y² on the Bloch sphere (mean 1/3); the vector form is
        // identically 0 for pure inputs.
        let prep = Preparation::Bell(BellIndex::new(1).unwrap());
        let avg = average_fidelity(&prep, false, Sampler::PureUniform, 4000, 2).unwrap();
        assert!(avg.vector_mean.abs() < 1e-12);
        assert!((avg.mean - 1.0 / 3.0).abs() < 4.0 * avg.stderr + 1e-3, "{avg:?}");
        assert!(avg.max_divergence > 0.1);
    }
}
