//! Teleportation of statistical operators.
//!
//! A library for simulating teleportation at the level of density operators
//! on the three-factor space `C ⊗ A ⊗ B`:
//!
//! * [`linalg`]: dense complex matrices, tensor products, partial traces and
//!   transposes, a Jacobi eigensolver for Hermitian matrices.
//! * [`bell`]: Bell vectors and projectors, Pauli matrices, embeddings and
//!   the PPT entanglement test.
//! * [`protocol`]: the total state, Alice's preparation tensors, the
//!   transformation matrix `T`, Bob's corrections and full sessions.
//! * [`fidelity`]: trace- and vector-form fidelity, the lazy-Bob bound and
//!   Monte-Carlo averages.
//! * [`appendix`]: ansatz versus sandwich state-update conventions.
//! * [`audit`]: numerical audits of the Bell projectors and `P_aut`.

pub mod appendix;
pub mod audit;
pub mod bell;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod protocol;
pub mod sampling;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Subsystem, SubsystemLayout, C64};
