//! Exact computer algebra for quasimodular forms.
//!
//! The crate models the quasimodular forms of the full modular group as the
//! polynomial ring `Q[E2, E4, E6]` and implements, over exact rationals:
//!
//! - [`qseries`]: truncated q-series and numeric evaluation with tail bounds
//! - [`qm`]: the operators `D`, `δ`, `H` on polynomials in `E2, E4, E6`
//! - [`uea`]: PBW normal forms in the enveloping algebra of `sl2`
//! - [`structure`]: modular stacks, depth decomposition, transformation-law checks
//! - [`brackets`]: the first Rankin–Cohen bracket and the Serre derivative
//! - [`growth`]: Hilbert series and generator counts of differential closures
//! - [`semigroup`]: saturation bounds for plane semigroups and the invariant-point simulator
//! - [`cli`]: the `qmlab` command-line front end

pub mod brackets;
pub mod cli;
pub mod error;
pub mod expr;
pub mod growth;
pub mod linalg;
pub mod qm;
pub mod qseries;
pub mod rational;
pub mod semigroup;
pub mod structure;
pub mod uea;

pub use error::{Error, Result};
pub use qm::{QmPolynomial, WeightedForm};
pub use qseries::QSeries;
pub use rational::Rational;
pub use uea::UeaElement;
