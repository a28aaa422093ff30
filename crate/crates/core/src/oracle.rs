//! Brute-force certification of extremal answers at desk scale.

use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::SolverConfig;
use crate::eigensolver::{eigenvalue, solve};
use crate::error::{Error, Result};
use crate::extremal::normalize;
use crate::measures::{Atom, Potential, Weight};
use crate::optimize::golden_max;

const MAX_CELLS: usize = 256;
const ARMIJO: f64 = 0.1;
const MAX_HALVINGS: usize = 30;
const KKT_TARGET: f64 = 1e-10;
const STALL_KKT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    #[serde(rename = "M_hat")]
    pub m_hat: f64,
    pub q_hat: Potential,
    pub iterations: usize,
    pub kkt_residual: f64,
    /// No ascent was possible while the stationarity defect was still large.
    pub stalled: bool,
    /// `λ₀` of every accepted iterate.
    #[serde(skip)]
    pub trace: Vec<f64>,
    /// `(ζ, λ₀)` pairs evaluated by a grid search.
    #[serde(skip)]
    pub scan: Vec<(f64, f64)>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tangential part of `d` on the constraint sphere at `q`, ignoring cells
/// pinned at zero with an outward-pointing gradient.
fn tangent_direction(d: &[f64], q: &[f64], cell_w: &[f64], gamma: f64) -> Vec<f64> {
    let normal: Vec<f64> = q
        .iter()
        .zip(cell_w)
        .map(|(qi, wi)| gamma * wi * qi.powf(gamma - 1.0))
        .collect();
    let nn = dot(&normal, &normal);
    let coef = if nn > 0.0 { dot(d, &normal) / nn } else { 0.0 };
    d.iter()
        .zip(&normal)
        .zip(q)
        .map(|((di, ni), qi)| {
            let t = di - coef * ni;
            if *qi <= 0.0 && t < 0.0 {
                0.0
            } else {
                t
            }
        })
        .collect()
}

/// Projected super-gradient ascent of `λ₀` over cellwise-constant potentials
/// on `n_cells` cells with `Σ r̄_i q_i^γ h ≤ 1`.
///
/// The ascent direction is the Hellmann–Feynman gradient `d_i = ∫_cell y²`
/// projected onto the tangent space of the constraint sphere; iterates are
/// clipped at zero and rescaled back onto the sphere.
pub fn brute_force_max(w: &Weight, gamma: f64, n_cells: usize, cfg: &SolverConfig) -> Result<OracleResult> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Parameter(format!("gamma must be > 1, got {gamma}")));
    }
    if n_cells == 0 || n_cells > MAX_CELLS {
        return Err(Error::Parameter(format!("n_cells must lie in [1, {MAX_CELLS}]")));
    }
    let h = 1.0 / n_cells as f64;
    let cell_w: Vec<f64> = (0..n_cells)
        .map(|i| w.integral(i as f64 * h, (i + 1) as f64 * h))
        .collect();
    let mut q = normalize(w, gamma, &Potential::constant(n_cells, 1.0)?)?;
    let mut pair = solve(&q, 0, cfg.tol_eigen)?;
    let mut trace = vec![pair.lambda()];
    let mut step = f64::NAN;
    let mut kkt = f64::INFINITY;
    let mut stalled = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let d = pair.cell_integrals(n_cells);
        let dir = tangent_direction(&d, q.density(), &cell_w, gamma);
        kkt = dot(&dir, &dir).sqrt() / dot(&d, &d).sqrt();
        if kkt < KKT_TARGET {
            break;
        }
        if step.is_nan() {
            let qn = dot(q.density(), q.density()).sqrt();
            step = 0.1 * qn / dot(&dir, &dir).sqrt();
        }
        let lambda = pair.lambda();
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let moved: Vec<f64> = q
                .density()
                .iter()
                .zip(&dir)
                .map(|(qi, di)| (qi + step * di).max(0.0))
                .collect();
            let candidate = normalize(w, gamma, &Potential::new(n_cells, moved, Vec::new())?)?;
            let delta: Vec<f64> = candidate
                .density()
                .iter()
                .zip(q.density())
                .map(|(a, b)| a - b)
                .collect();
            let predicted = dot(&d, &delta);
            let next = solve(&candidate, 0, cfg.tol_eigen)?;
            if next.lambda() >= lambda + ARMIJO * predicted.max(0.0) && next.lambda() >= lambda {
                accepted = Some((candidate, next));
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((candidate, next)) => {
                let gain = next.lambda() - lambda;
                q = candidate;
                pair = next;
                trace.push(pair.lambda());
                step *= 2.0;
                if gain <= 1e-15 * lambda {
                    break;
                }
            }
            None => {
                stalled = kkt > STALL_KKT;
                break;
            }
        }
        debug!("oracle iter {iterations}: λ₀ = {:.15e}, kkt = {kkt:.3e}", pair.lambda());
    }
    if stalled {
        warn!("oracle ascent stalled with KKT residual {kkt:.3e}");
    }
    Ok(OracleResult {
        m_hat: pair.lambda(),
        q_hat: q,
        iterations,
        kkt_residual: kkt,
        stalled,
        trace,
        scan: Vec::new(),
    })
}

fn single_atom(w: &Weight, zeta: f64) -> Result<Potential> {
    Potential::atoms_only(
        16,
        vec![Atom {
            pos: zeta,
            mass: 1.0 / w.value(zeta),
        }],
    )
}

/// Best single atom of saturating mass `1 / r(ζ)` over the grid
/// `ζ_j = j / (grid_points + 1)`, refined by one golden-section pass.
pub fn atom_grid_search(w: &Weight, grid_points: usize, tol: f64) -> Result<OracleResult> {
    if grid_points == 0 || grid_points > 10_000 {
        return Err(Error::Parameter("grid_points must lie in [1, 10000]".into()));
    }
    let spacing = 1.0 / (grid_points + 1) as f64;
    let scan: Vec<(f64, f64)> = (1..=grid_points)
        .into_par_iter()
        .map(|j| {
            let z = j as f64 * spacing;
            let lam = single_atom(w, z).and_then(|q| eigenvalue(&q, 0, tol))?;
            Ok((z, lam))
        })
        .collect::<Result<_>>()?;
    let best = scan
        .iter()
        .enumerate()
        .fold(0, |b, (j, s)| if s.1 > scan[b].1 { j } else { b });
    let (z0, lam0) = scan[best];
    let f = |z: f64| {
        single_atom(w, z)
            .and_then(|q| eigenvalue(&q, 0, tol))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (z, lam, evals) = golden_max(z0 - spacing, z0 + spacing, 1e-10, f);
    let (zeta, m_hat) = if lam > lam0 { (z, lam) } else { (z0, lam0) };
    Ok(OracleResult {
        m_hat,
        q_hat: single_atom(w, zeta)?,
        iterations: grid_points + evals,
        kkt_residual: 0.0,
        stalled: false,
        trace: Vec::new(),
        scan,
    })
}
