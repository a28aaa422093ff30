//! Solver settings shared by the extremal, oracle and CLI layers.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub grid_n: usize,
    pub tol_eigen: f64,
    /// Relative change in `λ₀` below which the outer loop may stop.
    pub tol_outer: f64,
    pub tol_res: f64,
    pub max_iter: usize,
    pub damping: f64,
    /// Atom count for the `γ = 1` atom solver; `0` selects the density solver.
    pub k_atoms: usize,
    pub seed: u64,
    pub pos_tol: f64,
    pub oracle_cells: usize,
    pub grid_points: usize,
    pub output_dir: PathBuf,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid_n: 4096,
            tol_eigen: 1e-10,
            tol_outer: 1e-8,
            tol_res: 1e-6,
            max_iter: 500,
            damping: 0.5,
            k_atoms: 1,
            seed: 42,
            pos_tol: 1e-6,
            oracle_cells: 64,
            grid_points: 1001,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{key}: {msg}")))
            }
        };
        check(self.grid_n >= 16, "grid_n", "must be >= 16")?;
        for (key, v) in [
            ("tol_eigen", self.tol_eigen),
            ("tol_outer", self.tol_outer),
            ("tol_res", self.tol_res),
            ("pos_tol", self.pos_tol),
        ] {
            check(v > 0.0 && v.is_finite(), key, "must be a positive number")?;
        }
        check(self.max_iter >= 1, "max_iter", "must be >= 1")?;
        check(
            self.damping > 0.0 && self.damping <= 1.0,
            "damping",
            "must lie in (0, 1]",
        )?;
        check(
            (1..=256).contains(&self.oracle_cells),
            "oracle_cells",
            "must lie in [1, 256]",
        )?;
        check(
            (1..=10_000).contains(&self.grid_points),
            "grid_points",
            "must lie in [1, 10000]",
        )?;
        Ok(())
    }
}
