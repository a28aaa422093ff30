//! Integral functionals of potentials against the weight.

use super::potential::{Atom, Potential};
use super::weight::Weight;
use crate::error::{Error, Result};

/// `∫₀¹ r q^γ dx`; for `γ = 1` atoms contribute `m r(ζ)`.
pub fn constraint_value(w: &Weight, gamma: f64, q: &Potential) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Parameter(format!("gamma must be >= 1, got {gamma}")));
    }
    if gamma > 1.0 && q.has_atoms() {
        return Err(Error::InvalidPotential(
            "atoms are only admissible for gamma = 1".into(),
        ));
    }
    let density: f64 = q
        .density()
        .iter()
        .enumerate()
        .filter(|(_, d)| **d != 0.0)
        .map(|(i, d)| {
            let (lo, hi) = q.cell_bounds(i);
            d.powf(gamma) * w.integral(lo, hi)
        })
        .sum();
    let atoms: f64 = q.atoms().iter().map(|a| a.mass * w.value(a.pos)).sum();
    // an empty float sum is -0.0
    Ok(0.0 + density + atoms)
}

/// `(1 - t) q1 + t q2`, on the finer of the two grids.
pub fn convex_combination(q1: &Potential, q2: &Potential, t: f64) -> Result<Potential> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Parameter(format!("t must lie in [0, 1], got {t}")));
    }
    let n = q1.grid_n().max(q2.grid_n());
    let (a, b) = (q1.resampled(n)?, q2.resampled(n)?);
    let density = a
        .density()
        .iter()
        .zip(b.density())
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect();
    let atoms: Vec<Atom> = a
        .atoms()
        .iter()
        .map(|at| (at, 1.0 - t))
        .chain(b.atoms().iter().map(|at| (at, t)))
        .filter(|(_, s)| *s > 0.0)
        .map(|(at, s)| Atom {
            pos: at.pos,
            mass: at.mass * s,
        })
        .collect();
    Potential::new(n, density, atoms)
}
