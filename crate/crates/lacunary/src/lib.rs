//! Exact-arithmetic toolkit for decomposing lacunary (sparse) polynomials.
//!
//! Everything runs over the rationals with arbitrary-precision exponents;
//! no floating point anywhere.  The crate is organised as:
//!
//! * [`poly`]: sparse and dense polynomial arithmetic with term budgets,
//! * [`series`]: truncated power series, fractional powers, Puiseux
//!   expansions of an outer polynomial at infinity,
//! * [`factor`]: univariate factorization over the rationals,
//! * [`wronskian`]: valuations, Wronskians and the zero/pole-counting
//!   inequality on the genus-zero function field,
//! * [`decompose`]: the decomposition pipeline `f = g(h)` for sparse `f`,
//! * [`catalog`]: the parametric catalog of composition identities with
//!   bounded term counts, and the membership scan built on it.

pub mod poly;
pub mod series;
pub mod factor;
pub mod wronskian;
pub mod decompose;
pub mod catalog;

pub use poly::{compose_outer, DensePoly, PolyError, SparsePoly};
