//! Subcommand bodies. Each returns a [`Report`]; argument parsing lives in
//! `main.rs`.

use std::f64::consts::TAU;

use anyhow::{bail, Context, Result};
use ensemble_teleport::appendix::compare_conventions;
use ensemble_teleport::audit::{bell_audit, paut_audit, CLAIMED_PAUT_SPECTRUM};
use ensemble_teleport::bell::BellIndex;
use ensemble_teleport::fidelity::{fidelity_vector, lazy_fidelity};
use ensemble_teleport::protocol::{
    run_session, ClassicalMessage, CoefficientError, CoefficientVector, Preparation,
};
use ensemble_teleport::sampling::{sample_batch, Sampler};
use ensemble_teleport::{tol, C64};
use rayon::prelude::*;
use serde_json::Value;

use crate::output::{Cell, Report, Section};

pub const TELEPORT_COLUMNS: [&str; 9] = [
    "c11",
    "c12_re",
    "c12_im",
    "prep",
    "bob_acts",
    "bits_sent",
    "fidelity_trace",
    "fidelity_vector",
    "agree",
];

pub const SWEEP_COLUMNS: [&str; 9] = [
    "c11",
    "coherence",
    "phase",
    "c12_re",
    "c12_im",
    "lazy_fidelity",
    "fidelity_trace",
    "fidelity_vector",
    "agree",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    TwoBits,
    Ping,
    PreAgreed,
}

fn invariant_name(e: &CoefficientError) -> &'static str {
    match e {
        CoefficientError::NonFinite { .. } => "finiteness",
        CoefficientError::TraceNotOne { .. } => "unit trace (c11 + c22 = 1)",
        CoefficientError::NegativePopulation { .. } => "nonnegative populations (0 <= c11 <= 1)",
        CoefficientError::NotHermitian { .. } => "hermiticity (c21 = conj c12)",
        CoefficientError::NotPositive { .. } => "positivity (|c12|^2 <= c11 c22)",
    }
}

pub fn coefficients(c11: f64, c12_re: f64, c12_im: f64) -> Result<CoefficientVector> {
    CoefficientVector::new(c11, C64::new(c12_re, c12_im)).map_err(|e| {
        anyhow::anyhow!("invalid coefficients: violates {}: {e}", invariant_name(&e))
    })
}

fn message_for(kind: MessageKind, prep: &Preparation) -> Result<ClassicalMessage> {
    Ok(match (kind, prep) {
        (MessageKind::TwoBits, Preparation::Bell(i)) => ClassicalMessage::TwoBits(*i),
        (MessageKind::TwoBits, _) => {
            bail!("the two-bit message names a Bell outcome; use --message ping or preagreed with {}", prep.label())
        }
        (MessageKind::Ping, _) => ClassicalMessage::OneBitPing,
        (MessageKind::PreAgreed, _) => ClassicalMessage::PreAgreed,
    })
}

/// Two bits for a Bell preparation, nothing for the automatic one.
pub fn default_message(prep: &Preparation) -> MessageKind {
    match prep {
        Preparation::Bell(_) => MessageKind::TwoBits,
        _ => MessageKind::PreAgreed,
    }
}

pub fn teleport(
    c: CoefficientVector,
    prep: Preparation,
    message: MessageKind,
    bob_acts: bool,
    agreement_tol: f64,
) -> Result<Report> {
    let msg = message_for(message, &prep)?;
    let rec = run_session(&c, &prep, msg, bob_acts).context("session failed")?;
    let vector = fidelity_vector(&c, &rec.effective_transformation).context("vector-form fidelity")?;
    let agree = (rec.fidelity - vector).abs() < agreement_tol;

    let mut s = Section::new("session", TELEPORT_COLUMNS.to_vec());
    s.push(vec![
        c.c11().into(),
        c.c12().re.into(),
        c.c12().im.into(),
        prep.label().into(),
        bob_acts.into(),
        u64::from(rec.bits_sent).into(),
        rec.fidelity.into(),
        vector.into(),
        agree.into(),
    ]);
    let mut report = Report::new(vec![s]);
    let state: Vec<Value> = (0..2)
        .map(|r| Value::from((0..2).map(|k| {
            let z = rec.bob_state[(r, k)];
            Value::from(vec![z.re, z.im])
        }).collect::<Vec<_>>()))
        .collect();
    report.extra.insert("bob_state".into(), Value::from(state));
    report.extra.insert("raw_trace".into(), Value::from(rec.raw_trace));
    let z = |r, k| rec.bob_state[(r, k)];
    report.notes.push(format!(
        "bob_state = [[{}, {}], [{}, {}]]",
        z(0, 0),
        z(0, 1),
        z(1, 0),
        z(1, 1)
    ));
    report.notes.push(format!("raw trace before renormalization = {}", rec.raw_trace));
    if !agree {
        report.notes.push(format!(
            "vector form differs from trace form by {:.3e}; the trace form is authoritative",
            (rec.fidelity - vector).abs()
        ));
    }
    Ok(report)
}

/// Grid point `(k, j, p)`: `c11 = k/(R−1)`, coherence `r = j/(R−1)`,
/// `c12 = r·sqrt(c11 c22)·e^{2πi p/P}`.
fn grid_point(k: usize, j: usize, p: usize, resolution: usize, phases: usize) -> (f64, f64, f64) {
    let step = (resolution - 1) as f64;
    (k as f64 / step, j as f64 / step, TAU * p as f64 / phases as f64)
}

/// `resolution² · phases` rows in `(c11, coherence, phase)` lexicographic order.
pub fn sweep(
    prep: Preparation,
    bob_acts: bool,
    resolution: usize,
    phases: usize,
    agreement_tol: f64,
) -> Result<Report> {
    if resolution < 2 {
        bail!("--resolution must be at least 2 (got {resolution})");
    }
    if phases < 1 {
        bail!("--phases must be at least 1");
    }
    let message = match (&prep, bob_acts) {
        (Preparation::Bell(i), true) => ClassicalMessage::TwoBits(*i),
        _ => ClassicalMessage::PreAgreed,
    };
    let total = resolution * resolution * phases;
    let rows: Vec<Vec<Cell>> = (0..total)
        .into_par_iter()
        .map(|n| -> ensemble_teleport::Result<Vec<Cell>> {
            let (k, j, p) = (n / (resolution * phases), (n / phases) % resolution, n % phases);
            let (x, r, phase) = grid_point(k, j, p, resolution, phases);
            let bound = (x * (1.0 - x)).max(0.0).sqrt();
            let c = CoefficientVector::new(x, C64::from_polar(r * bound, phase))?;
            let rec = run_session(&c, &prep, message, bob_acts)?;
            let vector = fidelity_vector(&c, &rec.effective_transformation)?;
            Ok(vec![
                x.into(),
                r.into(),
                phase.into(),
                c.c12().re.into(),
                c.c12().im.into(),
                lazy_fidelity(&c).into(),
                rec.fidelity.into(),
                vector.into(),
                ((rec.fidelity - vector).abs() < agreement_tol).into(),
            ])
        })
        .collect::<ensemble_teleport::Result<_>>()
        .context("sweep failed")?;

    let mut s = Section::new("grid", SWEEP_COLUMNS.to_vec());
    s.rows = rows;
    let mut report = Report::new(vec![s]);
    report.extra.insert("prep".into(), Value::from(prep.label()));
    report.extra.insert("bob_acts".into(), Value::from(bob_acts));
    report.extra.insert("resolution".into(), Value::from(resolution));
    report.extra.insert("phases".into(), Value::from(phases));
    report.notes.push(format!(
        "{total} rows = resolution^2 * phases; prep {}, bob acts: {bob_acts}",
        prep.label()
    ));
    Ok(report)
}

pub fn bell_audit_report(tol: f64) -> Result<Report> {
    let a = bell_audit()?;
    let mut pairs = Section::new("pairs", vec!["i", "j", "residual"]);
    for p in &a.pairs {
        pairs.push(vec![u64::from(p.i.get()).into(), u64::from(p.j.get()).into(), p.residual.into()]);
    }
    let mut ops = Section::new(
        "operators",
        vec!["i", "trace", "idempotence_residual", "min_pt_eigenvalue", "entangled"],
    );
    for o in &a.operators {
        let idem = a.pairs.iter().find(|p| p.i == o.i && p.j == o.i).map_or(f64::NAN, |p| p.residual);
        ops.push(vec![
            u64::from(o.i.get()).into(),
            o.trace.into(),
            idem.into(),
            o.min_partial_transpose_eigenvalue.into(),
            o.entangled.into(),
        ]);
    }
    let mut comp = Section::new("completeness", vec!["residual"]);
    comp.push(vec![a.completeness_residual.into()]);
    let mut report = Report::new(vec![pairs, ops, comp]);
    report.pass = a.passes(tol);
    report.extra.insert("tol".into(), Value::from(tol));
    report.notes.push(format!(
        "largest pair residual {:.3e}, completeness residual {:.3e}, tolerance {tol:e}",
        a.max_pair_residual(),
        a.completeness_residual
    ));
    Ok(report)
}

pub fn paut_audit_report(tol: f64) -> Result<Report> {
    let a = paut_audit()?;
    let mut spectrum = Section::new("spectrum", vec!["index", "computed", "claimed"]);
    for (k, (x, claimed)) in a.spectrum.iter().zip(CLAIMED_PAUT_SPECTRUM).enumerate() {
        spectrum.push(vec![(k as u64).into(), (*x).into(), claimed.into()]);
    }
    let mut summary = Section::new(
        "summary",
        vec![
            "spectral_norm",
            "idempotence_factor",
            "idempotence_residual",
            "trace",
            "self_adjoint_defect",
            "claimed_spectrum_gap",
        ],
    );
    summary.push(vec![
        a.spectral_norm.into(),
        a.idempotence_factor.into(),
        a.idempotence_residual.into(),
        a.trace.into(),
        a.self_adjoint_defect.into(),
        a.claimed_spectrum_gap.into(),
    ]);
    let mut t = Section::new("transformation", vec!["row", "col", "re", "im"]);
    for (r, row) in a.transformation.entries().iter().enumerate() {
        for (k, z) in row.iter().enumerate() {
            t.push(vec![(r as u64).into(), (k as u64).into(), z.re.into(), z.im.into()]);
        }
    }
    let mut report = Report::new(vec![spectrum, summary, t]);
    report.pass = a.passes(tol);
    report.extra.insert("tol".into(), Value::from(tol));
    if !a.note.is_empty() {
        report.notes.push(a.note.clone());
    }
    Ok(report)
}

pub const APPENDIX_COLUMNS: [&str; 9] = [
    "prep",
    "samples",
    "max_abs_diff",
    "numerator_factor_min",
    "numerator_factor_max",
    "expected_factor",
    "ansatz_trace_min",
    "ansatz_trace_max",
    "pass",
];

pub fn appendix_check(samples: usize, seed: u64, tol: f64) -> Result<Report> {
    if samples < 1 {
        bail!("--samples must be at least 1");
    }
    let inputs = sample_batch(Sampler::MixedUniform, samples, seed);
    let preps: Vec<Preparation> = BellIndex::ALL
        .into_iter()
        .map(Preparation::Bell)
        .chain([Preparation::Automatic])
        .collect();
    let mut s = Section::new("conventions", APPENDIX_COLUMNS.to_vec());
    let mut all_pass = true;
    for prep in preps {
        let u = prep.tensor();
        let results = inputs
            .par_iter()
            .map(|c| compare_conventions(&u, c))
            .collect::<ensemble_teleport::Result<Vec<_>>>()?;
        let fold = |f: &dyn Fn(&ensemble_teleport::appendix::ConventionResult) -> f64| {
            results.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
        };
        let (_, max_diff) = fold(&|r| r.max_abs_diff);
        let (fmin, fmax) = fold(&|r| r.numerator_factor());
        let (tmin, tmax) = fold(&|r| r.ansatz_trace);
        let expected = if matches!(prep, Preparation::Automatic) { 2.0 } else { 1.0 };
        let pass = max_diff < tol && (fmin - expected).abs() < tol && (fmax - expected).abs() < tol;
        all_pass &= pass;
        s.push(vec![
            prep.label().into(),
            (samples as u64).into(),
            max_diff.into(),
            fmin.into(),
            fmax.into(),
            expected.into(),
            tmin.into(),
            tmax.into(),
            pass.into(),
        ]);
    }
    let mut report = Report::new(vec![s]);
    report.pass = all_pass;
    report.extra.insert("seed".into(), Value::from(seed));
    report.extra.insert("tol".into(), Value::from(tol));
    report.notes.push(
        "numerator_factor is the sandwich numerator trace over the ansatz numerator trace".into(),
    );
    Ok(report)
}

/// Tolerance defaults when `--tol` is not given.
pub mod defaults {
    use super::tol;

    pub const BELL_AUDIT: f64 = tol::EQUALITY;
    pub const PAUT_AUDIT: f64 = tol::EIGENVALUE;
    pub const APPENDIX: f64 = tol::EQUALITY;
    pub const AGREEMENT: f64 = tol::FIDELITY_AGREEMENT;
}
