//! Damped fixed-point iteration `q ← (1-τ) q + τ Φ(y_q)` for `γ > 1`.
//!
//! `Φ(y)` maximizes `∫ q y²` over the constraint ball, so each step is a
//! conditional-gradient step; iterates are rescaled onto the sphere
//! `∫ r q^γ = 1`.

use log::{debug, warn};

use super::report::{ExtremalReport, TraceRow};
use super::residual::{kkt_target, weighted_distance};
use crate::config::SolverConfig;
use crate::eigensolver::solve;
use crate::error::{Error, Result};
use crate::measures::{constraint_value, Potential, Weight};

const MIN_DAMPING: f64 = 1.0 / 16.0;

pub(crate) fn check_integrability(w: &Weight, gamma: f64) -> Result<()> {
    if let Weight::Power { alpha, beta } = w {
        let limit = 3.0 * gamma - 1.0;
        if *alpha >= limit || *beta >= limit {
            return Err(Error::Parameter(format!(
                "power weight exponents must be below 3γ - 1 = {limit} for γ = {gamma}"
            )));
        }
    }
    Ok(())
}

/// Rescales an atom-free potential so that `∫ r q^γ = 1`.
pub(crate) fn normalize(w: &Weight, gamma: f64, q: &Potential) -> Result<Potential> {
    let s = constraint_value(w, gamma, q)?;
    if !(s > 0.0) {
        return Err(Error::InvalidPotential("cannot normalize the zero potential".into()));
    }
    q.scaled(s.powf(-1.0 / gamma))
}

pub fn solve_extremal_gamma_gt1(w: &Weight, gamma: f64, cfg: &SolverConfig) -> Result<ExtremalReport> {
    cfg.validate()?;
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::Parameter(format!("gamma must be > 1, got {gamma}")));
    }
    check_integrability(w, gamma)?;
    let n = cfg.grid_n;
    let mut q = normalize(w, gamma, &Potential::constant(n, 1.0)?)?;
    let mut pair = solve(&q, 0, cfg.tol_eigen)?;
    let mut tau = cfg.damping;
    let mut trace = Vec::new();
    let mut prev_lambda = f64::NAN;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for iter in 0..=cfg.max_iter {
        let phi = kkt_target(w, gamma, n, &pair);
        residual = weighted_distance(w, gamma, q.density(), &phi);
        let lambda = pair.lambda();
        trace.push(TraceRow {
            iter,
            lambda0: lambda,
            residual,
        });
        debug!("iter {iter}: λ₀ = {lambda:.15e}, residual = {residual:.3e}, τ = {tau}");
        if (lambda - prev_lambda).abs() < cfg.tol_outer * lambda && residual < cfg.tol_res {
            converged = true;
            break;
        }
        if iter == cfg.max_iter {
            break;
        }
        loop {
            let mixed: Vec<f64> = q
                .density()
                .iter()
                .zip(&phi)
                .map(|(a, b)| ((1.0 - tau) * a + tau * b).max(0.0))
                .collect();
            let candidate = normalize(w, gamma, &Potential::new(n, mixed, Vec::new())?)?;
            let next = solve(&candidate, 0, cfg.tol_eigen)?;
            if next.lambda() < lambda * (1.0 - 1e-13) && tau > MIN_DAMPING {
                tau = (tau * 0.5).max(MIN_DAMPING);
                continue;
            }
            q = candidate;
            pair = next;
            break;
        }
        prev_lambda = lambda;
    }
    let constraint = constraint_value(w, gamma, &q)?;
    let mut warnings = Vec::new();
    if !converged {
        let msg = format!(
            "fixed-point iteration stopped after {} steps with residual {residual:.3e}",
            cfg.max_iter
        );
        warn!("{msg}");
        warnings.push(msg);
    }
    Ok(ExtremalReport {
        m: pair.lambda(),
        q_hat: q,
        ground_state: pair,
        residual,
        constraint,
        trace,
        converged,
        warnings,
    })
}
