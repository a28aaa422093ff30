//! Seeded random potentials for bound checks and tests.

use rand::Rng;

use super::potential::{Atom, Potential};

/// A random nonnegative potential on `grid_n` cells: a few constant blocks
/// of random height, optionally plus up to three atoms.
pub fn random_potential<R: Rng>(rng: &mut R, grid_n: usize, with_atoms: bool) -> Potential {
    let blocks = rng.gen_range(1..=8usize).min(grid_n);
    let heights: Vec<f64> = (0..blocks)
        .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..40.0) })
        .collect();
    let density = (0..grid_n).map(|i| heights[i * blocks / grid_n]).collect();
    let atoms = if with_atoms {
        (0..rng.gen_range(1..=3))
            .map(|_| Atom {
                pos: rng.gen_range(0.05..0.95),
                mass: rng.gen_range(0.1..20.0),
            })
            .collect()
    } else {
        Vec::new()
    };
    Potential::new(grid_n, density, atoms).expect("generated potential is valid")
}
