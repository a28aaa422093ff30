//! Interval partitions of the window `[2^{-ℓ}, 1 - 2^{-ℓ}]` and the weighted
//! bin projection onto them.

use super::potential::Potential;
use super::primitive::window;
use super::weight::Weight;
use crate::error::{Error, Result};

/// A partition of `[2^{-ℓ}, 1 - 2^{-ℓ}]` into nonempty intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Bins {
    level: u32,
    boundaries: Vec<f64>,
}

impl Bins {
    /// `boundaries` must start at `2^{-ℓ}`, end at `1 - 2^{-ℓ}`, increase
    /// strictly, and no bin may be longer than `max_len`.
    pub fn new(level: u32, boundaries: Vec<f64>, max_len: f64) -> Result<Self> {
        if level < 2 {
            return Err(Error::Parameter(format!("bin level must be >= 2, got {level}")));
        }
        let (a, b) = window(level);
        if boundaries.len() < 2 {
            return Err(Error::Parameter("bins need at least two boundaries".into()));
        }
        let (first, last) = (boundaries[0], boundaries[boundaries.len() - 1]);
        if (first - a).abs() > 1e-14 || (last - b).abs() > 1e-14 {
            return Err(Error::Parameter(format!(
                "bins must cover [{a}, {b}], got [{first}, {last}]"
            )));
        }
        if boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter("every bin must be nonempty".into()));
        }
        if let Some(w) = boundaries.windows(2).find(|w| w[1] - w[0] > max_len * (1.0 + 1e-12)) {
            return Err(Error::Parameter(format!(
                "bin [{}, {}] is longer than {max_len}",
                w[0], w[1]
            )));
        }
        Ok(Bins { level, boundaries })
    }

    /// `count` equal bins.
    pub fn uniform(level: u32, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Parameter("bin count must be positive".into()));
        }
        let (a, b) = window(level);
        let step = (b - a) / count as f64;
        let mut boundaries: Vec<f64> = (0..count).map(|k| a + k as f64 * step).collect();
        boundaries.push(b);
        Bins::new(level, boundaries, step)
    }

    /// The coarsest equal partition with bins no longer than `delta²`.
    pub fn for_delta(level: u32, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::Parameter("delta must be positive".into()));
        }
        let (a, b) = window(level);
        let count = ((b - a) / (delta * delta)).ceil().max(1.0) as usize;
        Bins::uniform(level, count)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn bin(&self, k: usize) -> (f64, f64) {
        (self.boundaries[k], self.boundaries[k + 1])
    }
}

/// `∫_a^b r^{1/γ} q dx` for an atom-free potential.
pub fn bin_moment(q: &Potential, w: &Weight, gamma: f64, a: f64, b: f64) -> f64 {
    let p = 1.0 / gamma;
    if b <= a {
        return 0.0;
    }
    let (first, last) = (q.cell_of(a), q.cell_of(b));
    (first..=last)
        .map(|i| {
            let (lo, hi) = q.cell_bounds(i);
            let (u, v) = (lo.max(a), hi.min(b));
            if v > u && q.density()[i] != 0.0 {
                q.density()[i] * w.integral_pow(u, v, p)
            } else {
                0.0
            }
        })
        .sum()
}

/// Weighted bin averaging
/// `q̃ = Σ_k [∫ r^{1/γ} q χ_k / ∫ χ_k] · r^{-1/γ} χ_k`, resampled onto the
/// potential's grid.
///
/// Cells lying inside one bin share that bin's moment in the proportions that
/// minimize `∫ r q̃^γ` (for constant `r` this is the constant `c_k r^{-1/γ}`),
/// so each bin moment is reproduced exactly and the constraint value cannot
/// grow. Cells straddling a bin boundary take the cell average of the
/// continuous formula. Density outside the window is dropped.
pub fn bin_project(q: &Potential, w: &Weight, gamma: f64, bins: &Bins) -> Result<Potential> {
    if q.has_atoms() {
        return Err(Error::InvalidPotential(
            "bin projection is defined for atom-free potentials".into(),
        ));
    }
    if !(gamma >= 1.0) {
        return Err(Error::Parameter(format!("gamma must be >= 1, got {gamma}")));
    }
    let n = q.grid_n();
    let p = 1.0 / gamma;
    let levels: Vec<f64> = (0..bins.count())
        .map(|k| {
            let (a, b) = bins.bin(k);
            bin_moment(q, w, gamma, a, b) / (b - a)
        })
        .collect();

    let mut out = vec![0.0; n];
    let mut inner: Vec<Vec<usize>> = vec![Vec::new(); bins.count()];
    let bounds = bins.boundaries();
    let (wa, wb) = (bounds[0], bounds[bounds.len() - 1]);
    for (i, value) in out.iter_mut().enumerate() {
        let (lo, hi) = q.cell_bounds(i);
        if hi <= wa || lo >= wb {
            continue;
        }
        let k_lo = bounds.partition_point(|&t| t <= lo).saturating_sub(1);
        let inside = lo >= wa && hi <= wb && k_lo < bins.count() && hi <= bounds[k_lo + 1];
        if inside {
            inner[k_lo].push(i);
            continue;
        }
        let r_int = w.integral_pow(lo, hi, p);
        let mut acc = 0.0;
        for (k, level) in levels.iter().enumerate() {
            let (a, b) = bins.bin(k);
            let overlap = hi.min(b) - lo.max(a);
            if overlap > 0.0 {
                acc += level * overlap;
            }
        }
        *value = if r_int > 0.0 { acc / r_int } else { 0.0 };
    }

    for (k, cells) in inner.iter().enumerate() {
        if cells.is_empty() || levels[k] == 0.0 {
            continue;
        }
        let h_total: f64 = cells.len() as f64 * q.cell_width();
        let target = levels[k] * h_total;
        let r_int: Vec<f64> = cells
            .iter()
            .map(|&i| {
                let (lo, hi) = q.cell_bounds(i);
                w.integral_pow(lo, hi, p)
            })
            .collect();
        let shares: Vec<f64> = if gamma > 1.0 {
            let logs: Vec<f64> = cells
                .iter()
                .zip(&r_int)
                .map(|(&i, &ri)| {
                    let (lo, hi) = q.cell_bounds(i);
                    (ri / w.integral(lo, hi)).ln() / (gamma - 1.0)
                })
                .collect();
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            logs.iter().map(|l| (l - top).exp()).collect()
        } else {
            r_int.iter().map(|ri| q.cell_width() / ri).collect()
        };
        let norm: f64 = shares.iter().zip(&r_int).map(|(s, ri)| s * ri).sum();
        for ((&i, s), _) in cells.iter().zip(&shares).zip(&r_int) {
            out[i] = target * s / norm;
        }
    }
    Potential::new(n, out, Vec::new())
}
