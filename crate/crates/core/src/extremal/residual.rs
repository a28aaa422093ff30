//! The characterization defects of extremal potentials.

use crate::eigensolver::EigenPair;
use crate::error::{Error, Result};
use crate::measures::{Potential, Weight};
use crate::optimize::golden_max;

/// Points per unit length in the scan for `sup y²/r`.
const SCAN_POINTS: usize = 4096;

/// `Φ = (y²/r)^{1/(γ-1)}` on the cells of an `n`-cell grid, with `y²` and `r`
/// replaced by their cell averages, scaled so that `∫ r Φ^γ = 1`.
pub(crate) fn kkt_target(w: &Weight, gamma: f64, n: usize, y: &EigenPair) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let d = y.cell_integrals(n);
    let cell_w: Vec<f64> = (0..n)
        .map(|i| w.integral(i as f64 * h, (i + 1) as f64 * h))
        .collect();
    let logs: Vec<f64> = d
        .iter()
        .zip(&cell_w)
        .map(|(di, wi)| (di / wi).ln() / (gamma - 1.0))
        .collect();
    let top = logs.iter().copied().filter(|l| l.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().zip(&cell_w).map(|(p, wi)| wi * p.powf(gamma)).sum();
    let scale = total.powf(-1.0 / gamma);
    raw.iter().map(|p| p * scale).collect()
}

/// `(Σ W_i |a_i - b_i|^γ)^{1/γ}` with `W_i = ∫_cell r`.
pub(crate) fn weighted_distance(w: &Weight, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let h = 1.0 / n as f64;
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| w.integral(i as f64 * h, (i + 1) as f64 * h) * (x - y).abs().powf(gamma))
        .sum::<f64>()
        .powf(1.0 / gamma)
}

/// `(x*, sup y²/r)` over the open interval; ties go to the leftmost point.
pub fn sup_ratio(w: &Weight, y: &EigenPair) -> (f64, f64) {
    let ratio = |x: f64| {
        let v = y.eval(x);
        v * v / w.value(x)
    };
    let mut candidates: Vec<f64> = (1..SCAN_POINTS).map(|i| i as f64 / SCAN_POINTS as f64).collect();
    candidates.extend(y.x().iter().copied().filter(|&x| x > 0.0 && x < 1.0));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut best = (candidates[0], ratio(candidates[0]));
    let mut best_k = 0;
    for (k, &x) in candidates.iter().enumerate() {
        let v = ratio(x);
        if v > best.1 {
            best = (x, v);
            best_k = k;
        }
    }
    let lo = if best_k == 0 { best.0 * 0.5 } else { candidates[best_k - 1] };
    let hi = if best_k + 1 == candidates.len() {
        0.5 * (best.0 + 1.0)
    } else {
        candidates[best_k + 1]
    };
    let (x, v, _) = golden_max(lo, hi, 1e-12, ratio);
    if v > best.1 {
        (x, v)
    } else {
        best
    }
}

/// Defect of the extremality condition for the ground state `y` of `q`.
///
/// For `γ > 1` this is `‖q - Φ‖ / ‖Φ‖` in `L^γ(r)` with `Φ` the normalized
/// right-hand side `r^{1/(1-γ)} y^{2/(γ-1)}`; for `γ = 1` it is
/// `|sup y²/r - ⟨q, y²⟩| / sup y²/r`.
pub fn characterization_residual(w: &Weight, gamma: f64, q: &Potential, y: &EigenPair) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Parameter(format!("gamma must be >= 1, got {gamma}")));
    }
    if y.n() != 0 {
        return Err(Error::Domain("the characterization uses the ground state".into()));
    }
    let profile = q.profile();
    if profile.xs.len() != y.x().len() || profile.xs.iter().zip(y.x()).any(|(a, b)| a != b) {
        return Err(Error::Domain("eigenfunction was not computed for this potential".into()));
    }
    if gamma == 1.0 {
        let (_, sup) = sup_ratio(w, y);
        let pairing = y.pair_square(q);
        return Ok((sup - pairing).abs() / sup);
    }
    if q.has_atoms() {
        return Err(Error::InvalidPotential("atoms are only admissible for gamma = 1".into()));
    }
    let phi = kkt_target(w, gamma, q.grid_n(), y);
    Ok(weighted_distance(w, gamma, q.density(), &phi))
}
