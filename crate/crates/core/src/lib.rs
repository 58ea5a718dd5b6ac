//! Exact Nielsen zeta functions.
//!
//! Closed forms (products of integer polynomials raised to rational
//! exponents) are assembled from structured descriptions of
//! homeomorphisms and checked against the exponential sum
//! `exp(Σ N(fⁿ)/n · zⁿ)` in exact rational arithmetic. The crate also
//! carries a bounded twisted-conjugacy enumerator for free groups and an
//! evaluator/fitter for the asymptotic counting expansion
//! `e^{hx} x^{-3/2} Σ C_n x^{-n/2}`.

pub mod asymptotics;
pub mod corpus;
pub mod descriptor;
pub mod document;
mod error;
pub mod linalg;
pub mod radical;
pub mod series;
pub mod twisted;
pub mod zeta;

pub use descriptor::{FiberAction, MapDescriptor, MarkovTerm, NielsenSequence, Piece, Sign};
pub use error::{Error, Result};
pub use linalg::IntMatrix;
pub use radical::{Polynomial, RadicalExpr};
pub use series::{PowerSeries, Rational, DEFAULT_ORDER};
pub use zeta::{verify_zeta, zeta, VerifyReport, ZetaOptions};
