//! Weights, measure-valued potentials and the integral functionals on them.

mod bins;
mod functionals;
mod potential;
mod primitive;
pub(crate) mod quadrature;
mod random;
mod weight;

pub use bins::{bin_moment, bin_project, Bins};
pub use functionals::{constraint_value, convex_combination};
pub use potential::{Atom, Potential, COINCIDENT_ATOM_TOL};
pub(crate) use potential::Profile;
pub use primitive::{primitive, seminorm, window, PrimitiveFn};
pub use random::random_potential;
pub use weight::Weight;
