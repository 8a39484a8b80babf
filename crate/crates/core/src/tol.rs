//! Numerical tolerances shared across the crate.

/// Maximum |a_ij − conj(a_ji)| accepted as Hermitian.
pub const HERMITICITY: f64 = 1e-10;

/// Accuracy target for computed eigenvalues; also the slack allowed below
/// zero before an operator counts as non-positive.
pub const EIGENVALUE: f64 = 1e-10;

/// Entrywise equality for exact-arithmetic chains.
pub const EQUALITY: f64 = 1e-12;

/// Off-diagonal Frobenius mass at which Jacobi sweeps stop.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-13;

/// A partial transpose with an eigenvalue below `-PPT` flags entanglement.
pub const PPT: f64 = 1e-10;

/// Traces at or below this value mean the preparation annihilated the ensemble.
pub const ANNIHILATION: f64 = 1e-9;

/// Largest imaginary residue tolerated in a fidelity trace.
pub const FIDELITY_IMAGINARY: f64 = 1e-12;

/// Trace- and vector-form fidelities agree when closer than this.
pub const FIDELITY_AGREEMENT: f64 = 1e-9;

/// Slack on the coefficient-vector invariants (trace, positivity).
pub const COEFFICIENT: f64 = 1e-12;
