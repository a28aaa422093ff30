//! Best `k`-atom measure for `γ = 1`: coordinate ascent on positions with
//! multiplicative updates of the mass shares `z_j = m_j r(ζ_j)`.

use log::{debug, warn};
use rayon::prelude::*;

use super::report::{ExtremalReport, TraceRow};
use super::residual::characterization_residual;
use crate::config::SolverConfig;
use crate::eigensolver::{eigenvalue, solve};
use crate::error::{Error, Result};
use crate::measures::{constraint_value, Atom, Potential, Weight};
use crate::optimize::golden_max;

/// Atom-only potentials are solved exactly on any grid; a coarse one is cheap.
const WORK_GRID: usize = 16;
const SCAN_POINTS: usize = 64;
const PRUNE_SHARE: f64 = 1e-12;
const EDGE: f64 = 1e-9;

struct AtomSet<'a> {
    w: &'a Weight,
    tol: f64,
    pos: Vec<f64>,
    share: Vec<f64>,
}

impl AtomSet<'_> {
    fn potential(&self, grid_n: usize) -> Result<Potential> {
        let atoms = self
            .pos
            .iter()
            .zip(&self.share)
            .map(|(&p, &z)| Atom {
                pos: p,
                mass: z / self.w.value(p),
            })
            .collect();
        Potential::atoms_only(grid_n, atoms)
    }

    fn lambda(&self) -> Result<f64> {
        eigenvalue(&self.potential(WORK_GRID)?, 0, self.tol)
    }

    fn lambda_with(&self, j: usize, pos: f64) -> f64 {
        let mut pos_all = self.pos.clone();
        pos_all[j] = pos;
        let trial = AtomSet {
            w: self.w,
            tol: self.tol,
            pos: pos_all,
            share: self.share.clone(),
        };
        trial.lambda().unwrap_or(f64::NEG_INFINITY)
    }
}

fn single_atom_lambda(w: &Weight, zeta: f64, tol: f64) -> f64 {
    Potential::atoms_only(
        WORK_GRID,
        vec![Atom {
            pos: zeta,
            mass: 1.0 / w.value(zeta),
        }],
    )
    .and_then(|q| eigenvalue(&q, 0, tol))
    .unwrap_or(f64::NEG_INFINITY)
}

pub fn solve_extremal_gamma_eq1(w: &Weight, k_atoms: usize, cfg: &SolverConfig) -> Result<ExtremalReport> {
    cfg.validate()?;
    if k_atoms == 0 {
        return Err(Error::Parameter("k_atoms must be >= 1".into()));
    }
    let spacing = 1.0 / (SCAN_POINTS + 1) as f64;
    let scan: Vec<(f64, f64)> = (1..=SCAN_POINTS)
        .into_par_iter()
        .map(|j| {
            let z = j as f64 * spacing;
            (z, single_atom_lambda(w, z, cfg.tol_eigen))
        })
        .collect();

    // starting positions: local maxima of the scan, best first
    let mut peaks: Vec<usize> = (0..scan.len())
        .filter(|&j| {
            let left = j == 0 || scan[j - 1].1 < scan[j].1;
            let right = j + 1 == scan.len() || scan[j + 1].1 <= scan[j].1;
            left && right
        })
        .collect();
    peaks.sort_by(|&a, &b| scan[b].1.total_cmp(&scan[a].1));
    let best = peaks[0];
    let mut starts: Vec<f64> = peaks.iter().take(k_atoms).map(|&j| scan[j].0).collect();
    let mut offset = 1;
    while starts.len() < k_atoms {
        for z in [best as i64 - offset, best as i64 + offset] {
            if starts.len() < k_atoms && z >= 0 && (z as usize) < scan.len() {
                starts.push(scan[z as usize].0);
            }
        }
        offset += 1;
    }
    let mut order: Vec<usize> = (0..k_atoms).collect();
    order.sort_by(|&a, &b| starts[a].total_cmp(&starts[b]));
    let minor = if k_atoms > 1 { 0.05 / (k_atoms - 1) as f64 } else { 0.0 };
    let mut set = AtomSet {
        w,
        tol: cfg.tol_eigen,
        pos: order.iter().map(|&i| starts[i]).collect(),
        share: order
            .iter()
            .map(|&i| if i == 0 { 1.0 - 0.05 * (k_atoms > 1) as u8 as f64 } else { minor })
            .collect(),
    };

    let mut warnings = Vec::new();
    let mut lambda = set.lambda()?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut eta = 1.0;
    for iter in 0..cfg.max_iter {
        let before = lambda;
        let old_pos = set.pos.clone();
        let old_share = set.share.clone();

        if set.pos.len() > 1 {
            let pair = solve(&set.potential(WORK_GRID)?, 0, cfg.tol_eigen)?;
            let grad: Vec<f64> = set
                .pos
                .iter()
                .map(|&p| {
                    let y = pair.eval(p);
                    y * y / w.value(p)
                })
                .collect();
            let mean: f64 = grad.iter().zip(&set.share).map(|(g, z)| g * z).sum();
            for _ in 0..30 {
                let mut trial: Vec<f64> = set
                    .share
                    .iter()
                    .zip(&grad)
                    .map(|(z, g)| z * (g / mean).powf(eta))
                    .collect();
                let total: f64 = trial.iter().sum();
                trial.iter_mut().for_each(|z| *z /= total);
                let candidate = AtomSet {
                    w,
                    tol: cfg.tol_eigen,
                    pos: set.pos.clone(),
                    share: trial,
                };
                let lam = candidate.lambda()?;
                if lam >= lambda {
                    set.share = candidate.share;
                    lambda = lam;
                    eta = (eta * 2.0).min(1.0);
                    break;
                }
                eta *= 0.5;
            }
            let keep: Vec<bool> = set.share.iter().map(|&z| z >= PRUNE_SHARE).collect();
            if keep.iter().any(|k| !k) {
                for (p, _) in set.pos.iter().zip(&keep).filter(|(_, k)| !**k) {
                    let msg = format!("atom at {p:.6} lost its mass and was pruned");
                    warn!("{msg}");
                    warnings.push(msg);
                }
                let mut k = keep.iter();
                set.pos.retain(|_| *k.next().unwrap());
                let mut k = keep.iter();
                set.share.retain(|_| *k.next().unwrap());
                let total: f64 = set.share.iter().sum();
                set.share.iter_mut().for_each(|z| *z /= total);
                lambda = set.lambda()?;
            }
        }

        for j in 0..set.pos.len() {
            let left = if j == 0 { EDGE } else { set.pos[j - 1] + EDGE };
            let right = if j + 1 == set.pos.len() { 1.0 - EDGE } else { set.pos[j + 1] - EDGE };
            let lo = (set.pos[j] - spacing).max(left);
            let hi = (set.pos[j] + spacing).min(right);
            if hi <= lo {
                continue;
            }
            let (p, lam, _) = golden_max(lo, hi, 0.01 * cfg.pos_tol, |x| set.lambda_with(j, x));
            if lam > lambda {
                set.pos[j] = p;
                lambda = lam;
            }
        }

        let moved = if old_pos.len() == set.pos.len() {
            old_pos.iter().zip(&set.pos).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        let reshared = if old_share.len() == set.share.len() {
            old_share.iter().zip(&set.share).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        let work = set.potential(WORK_GRID)?;
        let residual = characterization_residual(w, 1.0, &work, &solve(&work, 0, cfg.tol_eigen)?)?;
        trace.push(TraceRow {
            iter,
            lambda0: lambda,
            residual,
        });
        debug!("iter {iter}: λ₀ = {lambda:.15e}, moved {moved:.2e}, shares moved {reshared:.2e}");
        if (lambda - before).abs() < cfg.tol_outer * lambda && moved < cfg.pos_tol && reshared < 1e-9 {
            converged = true;
            break;
        }
    }

    let q_hat = set.potential(cfg.grid_n)?;
    let pair = solve(&q_hat, 0, cfg.tol_eigen)?;
    let residual = characterization_residual(w, 1.0, &q_hat, &pair)?;
    let constraint = constraint_value(w, 1.0, &q_hat)?;
    if !converged {
        let msg = format!("atom placement did not settle within {} iterations", cfg.max_iter);
        warn!("{msg}");
        warnings.push(msg);
    }
    Ok(ExtremalReport {
        m: pair.lambda(),
        q_hat,
        ground_state: pair,
        residual,
        constraint,
        trace,
        converged,
        warnings,
    })
}
