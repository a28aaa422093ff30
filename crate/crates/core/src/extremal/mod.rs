//! The majorant `M_{r,γ} = sup λ₀(q)` over `∫ r q^γ ≤ 1` and its extremal
//! potential.

mod atoms;
mod density;
mod gamma_gt1;
mod perturb;
mod report;
mod residual;

pub use atoms::solve_extremal_gamma_eq1;
pub use density::solve_extremal_gamma_eq1_density;
pub use gamma_gt1::solve_extremal_gamma_gt1;
pub(crate) use gamma_gt1::normalize;
pub use perturb::{central_difference, directional_derivative, forward_difference, PerturbationSpec};
pub use report::{ExtremalReport, TraceRow};
pub use residual::{characterization_residual, sup_ratio};
