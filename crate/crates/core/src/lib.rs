//! Numerical laboratory for graded (fermionic) integrable quantum field
//! theories on a truncated, rapidity-discretized Fock space.
//!
//! The crate is organised by physical layer:
//!
//! - [`smatrix`]: scattering functions S(ζ) and their symmetry relations.
//! - [`fockspace`]: the S-symmetric Fock space, Zamolodchikov-Faddeev
//!   operators, grading, twist, translations and the reflection J.
//! - [`fields`]: test functions, the left/right/twisted wedge fields and the
//!   Majorana field, plus graded locality measurements.
//! - [`scattering`]: wave packets, χ-averaging, polarization-free generators,
//!   asymptotic states and two-particle S-matrix elements.
//! - [`formfactors`]: expansion coefficients of operators and a verifier for
//!   the wedge and double-cone form factor axioms.
//! - [`carlattice`]: an exact finite CAR model of disorder operators,
//!   conditional expectations and fixed-point nets.
//!
//! Support modules provide quadrature ([`quad`]), low-discrepancy and seeded
//! sampling ([`sampling`]) and dense linear algebra helpers ([`linalg`]).

pub mod carlattice;
pub mod error;
pub mod fields;
pub mod fockspace;
pub mod formfactors;
pub mod linalg;
pub mod quad;
pub mod sampling;
pub mod scattering;
pub mod smatrix;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// The imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Shorthand for a real number promoted to [`C64`].
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
