//! Flat-top extremal density for `γ = 1` and smooth weights.
//!
//! On its support `[a, b]` the extremal density makes `y² / r` constant, so
//! `y = √(c r)` there and `q̂ = λ + (√r)''/√r`; outside, `q̂ = 0` and `y` is a
//! sine arc. Matching `y'/y` at `a` and `b` fixes the support for each `λ`, and
//! the constraint `∫ r q̂ = 1` fixes `λ`.

use log::{debug, warn};

use super::report::{ExtremalReport, TraceRow};
use super::residual::characterization_residual;
use crate::config::SolverConfig;
use crate::eigensolver::solve;
use crate::error::{Error, Result};
use crate::measures::quadrature::{gauss, gauss_composite};
use crate::measures::{constraint_value, Potential, Weight};
use crate::optimize::bisect;

struct Smooth<'a> {
    w: &'a Weight,
}

impl Smooth<'_> {
    fn derivs(&self, x: f64) -> (f64, f64, f64) {
        self.w.derivatives(x).expect("checked in the constructor")
    }

    /// `r' / (2r)`.
    fn psi(&self, x: f64) -> f64 {
        let (r, dr, _) = self.derivs(x);
        dr / (2.0 * r)
    }

    /// `(√r)'' / √r`.
    fn curvature(&self, x: f64) -> f64 {
        let (r, dr, ddr) = self.derivs(x);
        ddr / (2.0 * r) - dr * dr / (4.0 * r * r)
    }

    fn support(&self, lambda: f64) -> (f64, f64) {
        let k = lambda.sqrt();
        let end = std::f64::consts::PI / k;
        let a = bisect(1e-14, end, |a| k * (k * a).cos() - self.psi(a) * (k * a).sin());
        let b = bisect(1.0 - end, 1.0 - 1e-14, |b| {
            let t = k * (1.0 - b);
            k * t.cos() + self.psi(b) * t.sin()
        });
        (a, b)
    }

    /// `∫ r q̂` for the candidate built from `λ`.
    fn constraint(&self, lambda: f64) -> f64 {
        let (a, b) = self.support(lambda);
        if b <= a {
            return 0.0;
        }
        let dr = |x: f64| self.derivs(x).1;
        let drift = gauss_composite(a, b, 64, |x| {
            let (r, dr, _) = self.derivs(x);
            dr * dr / (4.0 * r)
        });
        lambda * self.w.integral(a, b) + 0.5 * (dr(b) - dr(a)) - drift
    }
}

pub fn solve_extremal_gamma_eq1_density(w: &Weight, cfg: &SolverConfig) -> Result<ExtremalReport> {
    cfg.validate()?;
    match w {
        Weight::Table { .. } => {
            return Err(Error::Parameter(
                "the density solver needs a constant or power weight".into(),
            ))
        }
        Weight::Power { alpha, beta } if *alpha >= 2.0 || *beta >= 2.0 => {
            return Err(Error::Parameter(
                "the density solver needs power exponents below 2".into(),
            ))
        }
        _ => {}
    }
    let smooth = Smooth { w };
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let mut hi = 2.0 * pi2;
    while smooth.constraint(hi) < 1.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Internal("no multiplier satisfies the constraint".into()));
        }
    }
    let lambda = bisect(pi2 * (1.0 + 1e-9), hi, |l| smooth.constraint(l) - 1.0);
    let (a, b) = smooth.support(lambda);
    debug!("continuous solution: λ = {lambda:.15e}, support [{a:.12}, {b:.12}]");

    let mut warnings = Vec::new();
    let q_of = |x: f64| lambda + smooth.curvature(x);
    let lowest = (0..=1000)
        .map(|i| q_of(a + (b - a) * i as f64 / 1000.0))
        .fold(f64::INFINITY, f64::min);
    if lowest < 0.0 {
        return Err(Error::Parameter(format!(
            "the flat-top construction gives a negative density ({lowest:.3e}) for this weight"
        )));
    }
    let k = lambda.sqrt();
    let level_left = (k * a).sin().powi(2) / w.value(a);
    let level_right = (k * (1.0 - b)).sin().powi(2) / w.value(b);
    let escapes = (1..200).any(|i| {
        let x = a * i as f64 / 200.0;
        let y = 1.0 - (1.0 - b) * i as f64 / 200.0;
        (k * x).sin().powi(2) / w.value(x) > level_left * (1.0 + 1e-9)
            || (k * (1.0 - y)).sin().powi(2) / w.value(y) > level_right * (1.0 + 1e-9)
    });
    if escapes {
        let msg = "y²/r exceeds its plateau off the support".to_string();
        warn!("{msg}");
        warnings.push(msg);
    }

    let n = cfg.grid_n;
    let h = 1.0 / n as f64;
    let density: Vec<f64> = (0..n)
        .map(|i| {
            let (lo, up) = ((i as f64 * h).max(a), ((i + 1) as f64 * h).min(b));
            if up > lo {
                gauss(lo, up, q_of) / h
            } else {
                0.0
            }
        })
        .collect();
    let raw = Potential::new(n, density, Vec::new())?;
    let q_hat = raw.scaled(1.0 / constraint_value(w, 1.0, &raw)?)?;
    let pair = solve(&q_hat, 0, cfg.tol_eigen)?;
    let residual = characterization_residual(w, 1.0, &q_hat, &pair)?;
    let constraint = constraint_value(w, 1.0, &q_hat)?;
    Ok(ExtremalReport {
        m: pair.lambda(),
        trace: vec![TraceRow {
            iter: 0,
            lambda0: pair.lambda(),
            residual,
        }],
        q_hat,
        ground_state: pair,
        residual,
        constraint,
        converged: true,
        warnings,
    })
}
