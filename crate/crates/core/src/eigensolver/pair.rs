//! Eigenfunctions reconstructed from the shooting states.

use serde::Serialize;

use super::basis::{advance, square_integral};
use super::shoot::{eigenvalue, shoot};
use super::forms::SampledFn;
use crate::error::{Error, Result};
use crate::measures::Potential;

/// Minimum samples per unit length handed to the quadratic forms.
const SAMPLE_DENSITY: f64 = 1024.0;

/// An eigenvalue with its `L²`-normalized eigenfunction sampled at the grid
/// nodes and atom positions.
///
/// `dy[j]` is the right derivative `y'(x_j+)`; the last entry is `y'(1-)`.
/// Between samples the function is the exact solution of the equation, so
/// [`EigenPair::eval`] and the integrals below carry no discretization error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    n: usize,
    lambda: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    #[serde(skip)]
    dy: Vec<f64>,
    #[serde(skip)]
    seg_v: Vec<f64>,
}

impl EigenPair {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn dy(&self) -> &[f64] {
        &self.dy
    }

    fn segment_of(&self, x: f64) -> usize {
        self.x
            .partition_point(|&t| t <= x)
            .saturating_sub(1)
            .min(self.seg_v.len() - 1)
    }

    /// `y(x)` for `x` in `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    /// `(y(x), y'(x+))`.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let x = x.clamp(0.0, 1.0);
        let j = self.segment_of(x);
        if x == self.x[j] {
            return (self.y[j], self.dy[j]);
        }
        advance(self.y[j], self.dy[j], self.seg_v[j], x - self.x[j])
    }

    /// `y'(x_j-)`, the derivative just left of sample `j > 0`.
    pub fn left_derivative(&self, j: usize) -> f64 {
        if j == 0 {
            return self.dy[0];
        }
        advance(self.y[j - 1], self.dy[j - 1], self.seg_v[j - 1], self.x[j] - self.x[j - 1]).1
    }

    /// `∫_a^b y² dx`.
    pub fn integral_sq(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let (first, last) = (self.segment_of(a), self.segment_of(b));
        let mut total = 0.0;
        for j in first..=last {
            let (lo, hi) = (self.x[j], self.x[j + 1]);
            let (u, v) = (lo.max(a), hi.min(b));
            if v <= u {
                continue;
            }
            let (y0, d0) = if u == lo {
                (self.y[j], self.dy[j])
            } else {
                advance(self.y[j], self.dy[j], self.seg_v[j], u - lo)
            };
            total += square_integral(y0, d0, self.seg_v[j], v - u);
        }
        total
    }

    /// `∫ y²` over each cell of a uniform grid with `n` cells.
    pub fn cell_integrals(&self, n: usize) -> Vec<f64> {
        let h = 1.0 / n as f64;
        (0..n)
            .map(|i| {
                let hi = if i + 1 == n { 1.0 } else { (i + 1) as f64 * h };
                self.integral_sq(i as f64 * h, hi)
            })
            .collect()
    }

    /// `⟨q, y²⟩`, with atoms evaluated pointwise.
    pub fn pair_square(&self, q: &Potential) -> f64 {
        let density: f64 = self
            .cell_integrals(q.grid_n())
            .iter()
            .zip(q.density())
            .map(|(i, d)| i * d)
            .sum();
        density
            + q.atoms()
                .iter()
                .map(|a| {
                    let y = self.eval(a.pos);
                    a.mass * y * y
                })
                .sum::<f64>()
    }

    /// Sign changes of the samples in the open interval.
    pub fn interior_zeros(&self) -> usize {
        let scale = self.y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut count = 0;
        let mut last = 0.0f64;
        for &v in &self.y[1..self.y.len() - 1] {
            if v.abs() <= 1e-14 * scale {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Samples with derivatives for the quadratic forms, refined with the
    /// exact propagator so that no sample gap exceeds `1 / SAMPLE_DENSITY`.
    pub fn sampled(&self) -> SampledFn {
        let (mut x, mut y, mut dy) = (Vec::new(), Vec::new(), Vec::new());
        for j in 0..self.seg_v.len() {
            let len = self.x[j + 1] - self.x[j];
            let pieces = (len * SAMPLE_DENSITY).ceil().max(1.0) as usize;
            for k in 0..pieces {
                let t = len * k as f64 / pieces as f64;
                let (v, d) = if k == 0 {
                    (self.y[j], self.dy[j])
                } else {
                    advance(self.y[j], self.dy[j], self.seg_v[j], t)
                };
                x.push(self.x[j] + t);
                y.push(v);
                dy.push(d);
            }
        }
        let last = self.x.len() - 1;
        x.push(self.x[last]);
        y.push(self.y[last]);
        dy.push(self.dy[last]);
        SampledFn::with_derivative(x, y, dy).expect("eigenfunction samples are consistent")
    }
}

/// The normalized eigenfunction for an eigenvalue `lambda` of index `n`.
pub fn eigenfunction(q: &Potential, lambda: f64, n: usize) -> Result<EigenPair> {
    let profile = q.profile();
    let mut states = Vec::with_capacity(profile.xs.len());
    let end = shoot(&profile, lambda, Some(&mut states));
    let zeros = (end.theta() / std::f64::consts::PI).round() as i64 - 1;
    if zeros != n as i64 {
        return Err(Error::Internal(format!(
            "eigenfunction at λ = {lambda} has {zeros} interior zeros, expected {n}"
        )));
    }
    let top = states.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p.log_rho));
    let mut y: Vec<f64> = states.iter().map(|p| p.s * (p.log_rho - top).exp()).collect();
    let mut dy: Vec<f64> = states.iter().map(|p| p.c * (p.log_rho - top).exp()).collect();
    let seg_v: Vec<f64> = profile.seg_q.iter().map(|v| v - lambda).collect();
    let last = y.len() - 1;
    y[0] = 0.0;
    y[last] = 0.0;
    let total: f64 = (0..seg_v.len())
        .map(|j| square_integral(y[j], dy[j], seg_v[j], profile.xs[j + 1] - profile.xs[j]))
        .sum();
    let scale = 1.0 / total.sqrt();
    y.iter_mut().for_each(|v| *v *= scale);
    dy.iter_mut().for_each(|v| *v *= scale);
    Ok(EigenPair {
        n,
        lambda,
        x: profile.xs,
        y,
        dy,
        seg_v,
    })
}

/// `λ_n(q)` together with its eigenfunction.
pub fn solve(q: &Potential, n: usize, tol: f64) -> Result<EigenPair> {
    let lambda = eigenvalue(q, n, tol)?;
    eigenfunction(q, lambda, n)
}
