//! Scaled Prüfer shooting from `y(0) = 0, y'(0) = 1`.
//!
//! The state is a direction `(s, c) ∝ (y, y')`, its log length, and the band
//! `k` with `θ ∈ [kπ, (k+1)π]`; `s` always has the sign `(-1)^k` or is zero.

use std::f64::consts::PI;

use super::basis::{basis, TAYLOR_THRESHOLD};
use crate::error::{Error, Result};
use crate::measures::{Potential, Profile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Phase {
    pub band: u64,
    pub s: f64,
    pub c: f64,
    pub log_rho: f64,
}

impl Phase {
    pub fn start() -> Self {
        Phase {
            band: 0,
            s: 0.0,
            c: 1.0,
            log_rho: 0.0,
        }
    }

    fn sigma(&self) -> f64 {
        if self.band.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// The unwound angle `θ` of `(y, y')`.
    pub fn theta(&self) -> f64 {
        self.band as f64 * PI + self.s.abs().atan2(self.sigma() * self.c)
    }

    fn normalize(&mut self, s: f64, c: f64) {
        let norm = s.hypot(c);
        self.s = s / norm;
        self.c = c / norm;
        self.log_rho += norm.ln();
    }

    /// Crosses a segment of length `h` on which `q - λ = v`.
    pub fn step(&mut self, v: f64, h: f64) {
        if h <= 0.0 {
            return;
        }
        if v < 0.0 && -v * h * h >= TAYLOR_THRESHOLD {
            // exact rotation of (ω y, y') by ωh
            let w = (-v).sqrt();
            let amp = (w * self.s).hypot(self.c);
            let phi0 = (w * self.s.abs()).atan2(self.sigma() * self.c);
            let t = phi0 + w * h;
            let turns = (t / PI).floor();
            let phi1 = t - turns * PI;
            self.band += turns as u64;
            let sig = self.sigma();
            self.normalize(sig * amp * phi1.sin() / w, sig * amp * phi1.cos());
            return;
        }
        let b = basis(v, h);
        let y1 = self.s * b.c + self.c * b.s;
        let d1 = self.s * b.dc + self.c * b.ds;
        if y1 == 0.0 {
            if self.s != 0.0 {
                self.band += 1;
            }
        } else if y1.signum() != self.sigma() {
            self.band += 1;
        }
        self.log_rho += b.shift;
        self.normalize(y1, d1);
    }

    /// Derivative jump `y' ← y' + m y` at an atom.
    pub fn kick(&mut self, m: f64) {
        if m != 0.0 {
            self.normalize(self.s, self.c + m * self.s);
        }
    }
}

/// Shoots across the profile at `λ`; when `states` is given, the state just
/// to the right of every breakpoint is recorded (the last one is the left
/// state at 1).
pub(crate) fn shoot(profile: &Profile, lambda: f64, mut states: Option<&mut Vec<Phase>>) -> Phase {
    let mut phase = Phase::start();
    let m = profile.segments();
    for j in 0..m {
        phase.kick(profile.mass_at[j]);
        if let Some(rec) = states.as_deref_mut() {
            rec.push(phase);
        }
        phase.step(profile.seg_q[j] - lambda, profile.xs[j + 1] - profile.xs[j]);
    }
    if let Some(rec) = states.as_mut() {
        rec.push(phase);
    }
    phase
}

/// `θ(1; λ)`: the continuously unwound Prüfer angle at `x = 1`.
pub fn prufer_phase(q: &Potential, lambda: f64) -> f64 {
    shoot(&q.profile(), lambda, None).theta()
}

/// `4π²(n+1)²(1 + 2‖q‖₂)`.
pub fn upper_bound(q: &Potential, n: usize) -> f64 {
    let k = (n + 1) as f64;
    4.0 * PI * PI * k * k * (1.0 + 2.0 * crate::measures::seminorm(q, 2))
}

/// `λ_n(q)` to relative accuracy `tol` (the root is refined well past `tol`
/// when that is cheap).
pub fn eigenvalue(q: &Potential, n: usize, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("eigen tolerance must be positive, got {tol}")));
    }
    let profile = q.profile();
    let target = (n + 1) as f64 * PI;
    let f = |lambda: f64| shoot(&profile, lambda, None).theta() - target;
    let k = (n + 1) as f64;
    let mut lo = PI * PI * k * k * (1.0 - 1e-12);
    let mut hi = upper_bound(q, n) * (1.0 + 1e-12);
    let (mut f_lo, mut f_hi) = (f(lo), f(hi));
    if !(f_lo <= 0.0 && f_hi >= 0.0) {
        return Err(Error::Bracket {
            n,
            lo,
            hi,
            lo_offset: f_lo,
            hi_offset: f_hi,
        });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let goal = tol.min(1e-14);
    let (mut true_lo, mut true_hi) = (f_lo, f_hi);
    // Illinois regula falsi with a bisection fallback
    let mut side = 0i8;
    for _ in 0..300 {
        if hi - lo <= goal * hi {
            break;
        }
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let width = hi - lo;
        if !(x > lo + 0.01 * width && x < hi - 0.01 * width) {
            x = 0.5 * (lo + hi);
        }
        if x <= lo || x >= hi {
            break;
        }
        let fx = f(x);
        if fx < true_lo - 1e-9 || fx > true_hi + 1e-9 {
            return Err(Error::Internal(format!(
                "Prüfer phase not monotone in λ near {x} (n = {n})"
            )));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            true_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            true_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    if hi - lo > tol * hi {
        return Err(Error::Internal(format!(
            "eigenvalue {n} not resolved: bracket [{lo}, {hi}]"
        )));
    }
    Ok(if -true_lo < true_hi { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Atom;

    #[test]
    fn free_phase_counts_half_turns() {
        let q = Potential::zero(64);
        assert!((prufer_phase(&q, PI * PI) - PI).abs() < 1e-12);
        assert!((prufer_phase(&q, 4.0 * PI * PI) - 2.0 * PI).abs() < 1e-12);
        assert!(prufer_phase(&q, -5.0) < PI / 2.0);
    }

    #[test]
    fn atom_phase_brackets_root() {
        let q = Potential::atoms_only(16, vec![Atom { pos: 0.5, mass: 1.0 }]).unwrap();
        assert!(prufer_phase(&q, 11.0) < PI);
        assert!(prufer_phase(&q, 12.5) > PI);
    }

    #[test]
    fn phase_is_monotone_in_lambda() {
        let q = Potential::from_fn(32, |x| 50.0 * x)
            .unwrap()
            .with_atoms(vec![Atom { pos: 0.3, mass: 4.0 }])
            .unwrap();
        let mut last = f64::NEG_INFINITY;
        for i in 0..400 {
            let th = prufer_phase(&q, -50.0 + i as f64 * 2.0);
            assert!(th >= last - 1e-12);
            last = th;
        }
    }

    #[test]
    fn constant_shift() {
        for c in [0.0, 1.0, 10.0] {
            let q = Potential::constant(16, c).unwrap();
            for n in 0..4 {
                let k = (n + 1) as f64;
                let lam = eigenvalue(&q, n, 1e-12).unwrap();
                assert!((lam - PI * PI * k * k - c).abs() < 1e-11 * lam, "{c} {n} {lam}");
            }
        }
    }

    #[test]
    fn strong_barrier_does_not_overflow() {
        let q = Potential::from_fn(64, |x| if (0.3..0.7).contains(&x) { 1e7 } else { 0.0 }).unwrap();
        let lam = eigenvalue(&q, 0, 1e-10).unwrap();
        let width = 19.0 / 64.0;
        let box_level = PI * PI / (width * width);
        assert!(lam.is_finite() && lam < box_level && lam > 0.95 * box_level, "{lam}");
    }
}
