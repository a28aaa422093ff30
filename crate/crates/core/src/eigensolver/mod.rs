//! Dirichlet eigenvalues and eigenfunctions of `-y'' + q y = λ y` for
//! measure potentials, by exact per-segment transfer and Prüfer shooting.

mod basis;
mod forms;
mod pair;
mod shoot;

pub use forms::{energy_form, gap_lower_bound, norm_sq, pencil_form, SampledFn};
pub use pair::{eigenfunction, solve, EigenPair};
pub use shoot::{eigenvalue, prufer_phase, upper_bound};
