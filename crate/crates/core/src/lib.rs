//! Sharp majorants of the first Dirichlet eigenvalue of `-y'' + q y = λ y` on
//! `(0, 1)` over potential balls `∫ r q^γ ≤ 1`.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod eigensolver;
pub mod error;
pub mod extremal;
pub mod measures;
pub mod oracle;
mod optimize;

pub use config::SolverConfig;
pub use error::{Error, Result};
