// Tensor component loops index several arrays at once; iterator rewrites
// obscure the index symmetry the formulas are stated in.
#![allow(clippy::needless_range_loop)]

//! Numerical differential geometry on coordinate charts, built on truncated
//! multivariate Taylor (jet) arithmetic.
//!
//! The crate evaluates closed-form tensor fields through jets, so every
//! partial derivative that enters a curvature or Lie-derivative computation
//! is exact to double-precision rounding — there is no finite-difference
//! error anywhere in the stack. On top of that substrate it provides:
//!
//! - Levi-Civita machinery (Christoffel symbols, curvature, Ricci data,
//!   covariant and Lie derivatives) in [`riemann`];
//! - contact-metric structures, their axioms and classification in
//!   [`contact`];
//! - Ricci-soliton residuals, constant fitting and packaged verification
//!   suites in [`soliton`];
//! - closed-form model manifolds (Heisenberg group, deformations, random
//!   polynomial metrics) in [`models`];
//! - report types and the CLI driver in [`report`] and [`runner`].

pub mod chart;
pub mod contact;
mod error;
pub mod field;
mod forms;
pub mod jet;
pub mod models;
pub mod report;
pub mod riemann;
pub mod runner;
pub mod sample;
pub mod soliton;
pub mod tensor;

pub use chart::{Chart, Point};
pub use error::{Error, Result};
pub use jet::{Jet, JetSpec};
pub use tensor::{JetTensor, Tensor};
