//! Series-expansion coefficients of operators and a numeric verifier of the
//! wedge and double-cone form factor axioms.
//!
//! - [`expansion`]: the discrete expansion A = Σ ∫ f_{m,n} z†…z† z…z /(m! n!)
//!   and its triangular inversion.
//! - [`family`]: form factor families F = (F_k), the built-in solutions and
//!   the indicatrix ω(t) = ℓ log(1+t).
//! - [`axioms`]: sampled checks of analyticity (Cauchy probes), exchange
//!   symmetry, graded periodicity, residues and growth envelopes, plus the
//!   comparison of +i0 boundary values with extracted coefficients.

pub mod axioms;
pub mod expansion;
pub mod family;

pub use axioms::{
    boundary_match, boundary_value, residue_check, verify_fd, verify_fw, AxiomCheck, AxiomReport, AxiomStatus, Sampler,
};
pub use expansion::{
    all_coefficients, apply_term, check_coefficients, coefficients_from_operator, operator_from_coefficients, Coefficients,
};
pub use family::{complex_momentum, total_momentum, Evaluator, FamilyKind, FormFactorFamily, Indicatrix};
