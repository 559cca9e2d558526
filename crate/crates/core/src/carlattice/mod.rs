//! An exact finite model of the graded algebraic structure around disorder
//! operators.
//!
//! Finitely many fermionic modes are represented on ℂ^{2^n} through the
//! Jordan-Wigner construction, left modes first. The wedge algebras become
//! the full CAR algebras of mode subsets, so that gradings, twists,
//! commutants, disorder operators, the conditional expectation m, the
//! automorphism β and the four fixed-point nets can be computed as explicit
//! matrices and matrix subspaces.
//!
//! - [`system`]: the mode operators, Γ, Z, regions and graded elements.
//! - [`graded`]: graded splitting, the twist and the graded permutation identity.
//! - [`disorder`]: disorder operators, m and β.
//! - [`nets`]: matrix subspaces of the field, observable and extended nets.
//! - [`approx`]: bounded sine approximants of closed operators.
//! - [`report`]: the full identity suite as one report.

pub mod approx;
pub mod disorder;
pub mod graded;
pub mod nets;
pub mod report;
pub mod system;

pub use approx::{sin_approximant, sin_bounds, SinBounds};
pub use disorder::{beta_automorphism, conditional_expectation, disorder_left, disorder_right, BetaDecomposition};
pub use graded::{graded_split, twist_conjugate, verify_graded_permute};
pub use nets::{fixed_point_nets, FourNetsReport, SubspaceIdentity};
pub use report::{car_report, CarCheck, CarReport};
pub use system::{CarElement, CarSystem, GradeTag, Regions, Side};
