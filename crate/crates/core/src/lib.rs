//! Numerical toolkit for the integro-differential operator `L` acting on the
//! space of entire functions vanishing at the origin, together with three
//! independent routes for computing its inverse:
//!
//! * an explicit lower-triangular solve built on the hypergeometric
//!   polynomial inversion pair `A(x, ν)`, `B(x, ν)` ([`matrix`]),
//! * loop and vertical-line contour integrals with branch-tracked
//!   multivalued powers ([`inverse`]),
//! * the singular Volterra form of the factor operator `M` ([`volterra`]).
//!
//! The [`harness`] module ties everything together into reproducible
//! cross-validation reports.

pub mod contour;
pub mod error;
pub mod harness;
pub mod inverse;
pub mod matrix;
pub mod operator;
pub mod params;
pub mod quad;
pub mod rng;
pub mod series;
pub mod special;
pub mod volterra;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use params::{Params, Regime};
pub use quad::{QuadRule, QuadratureSpec};
pub use series::{EntireSeries, H0Function, SignedSeries};
