//! The antiderivative `Q` of a potential and the seminorms built from it.

use super::potential::Potential;

/// Nondecreasing piecewise-linear antiderivative of a potential with
/// upward jumps at atoms. Left-continuous: `Q(ζ)` is the value before the jump.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveFn {
    breakpoints: Vec<f64>,
    /// `Q(x_j)` (left limit).
    left: Vec<f64>,
    /// Jump at `x_j`.
    jump: Vec<f64>,
    /// Slope on `[x_j, x_{j+1}]`.
    slope: Vec<f64>,
}

impl PrimitiveFn {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn locate(&self, x: f64) -> usize {
        // segment j with x_j < x <= x_{j+1}
        let j = self.breakpoints.partition_point(|&t| t < x);
        j.saturating_sub(1).min(self.slope.len() - 1)
    }

    /// `Q(x)` (left-continuous).
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let j = self.locate(x);
        self.left[j] + self.jump[j] + self.slope[j] * (x - self.breakpoints[j])
    }

    /// `Q(x+)`.
    pub fn eval_right(&self, x: f64) -> f64 {
        match self.breakpoints.binary_search_by(|t| t.total_cmp(&x)) {
            Ok(j) => self.left[j] + self.jump[j],
            Err(_) => self.eval(x),
        }
    }

    /// `-∫ Q y' dx` for the piecewise-linear `y` through `(xs, ys)`; equals
    /// `⟨q, y⟩` whenever `y` vanishes at both ends of its support.
    pub fn pair_with_derivative(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        let mut cuts: Vec<f64> = xs.to_vec();
        cuts.extend(self.breakpoints.iter().copied().filter(|&t| t > lo && t < hi));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = 0.0;
        let mut k = 0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            while k + 2 < xs.len() && xs[k + 1] <= a {
                k += 1;
            }
            let dy = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
            let q_int = 0.5 * (self.eval_right(a) + self.eval(b)) * (b - a);
            total -= q_int * dy;
        }
        total
    }

    /// `(∫_a^b (Q - Q̄)² dx)^{1/2}` with `Q̄` the mean of `Q` on `[a, b]`.
    pub fn centered_l2(&self, a: f64, b: f64) -> f64 {
        let len = b - a;
        if len <= 0.0 {
            return 0.0;
        }
        let pieces = self.pieces(a, b);
        let mean = pieces
            .iter()
            .map(|&(u, v, qa, d)| qa * (v - u) + 0.5 * d * (v - u) * (v - u))
            .sum::<f64>()
            / len;
        pieces
            .iter()
            .map(|&(u, v, qa, d)| {
                let l = v - u;
                let c = qa - mean;
                c * c * l + c * d * l * l + d * d * l * l * l / 3.0
            })
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }

    /// Linear pieces `(u, v, Q(u+), slope)` covering `[a, b]`.
    fn pieces(&self, a: f64, b: f64) -> Vec<(f64, f64, f64, f64)> {
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints.iter().copied().filter(|&t| t > a && t < b));
        cuts.push(b);
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let j = self.locate(0.5 * (w[0] + w[1]));
                (w[0], w[1], self.eval_right(w[0]), self.slope[j])
            })
            .collect()
    }
}

/// The antiderivative `Q(x) = q([0, x))` of `q`.
pub fn primitive(q: &Potential) -> PrimitiveFn {
    let profile = q.profile();
    let m = profile.segments();
    let mut left = Vec::with_capacity(m + 1);
    let mut value = 0.0;
    for j in 0..m {
        left.push(value);
        value += profile.mass_at[j] + profile.seg_q[j] * (profile.xs[j + 1] - profile.xs[j]);
    }
    left.push(value);
    PrimitiveFn {
        breakpoints: profile.xs,
        left,
        jump: profile.mass_at,
        slope: profile.seg_q,
    }
}

/// Left end `2^{-ℓ}` of the seminorm window.
pub fn window(ell: u32) -> (f64, f64) {
    let eps = 0.5f64.powi(ell as i32);
    (eps, 1.0 - eps)
}

/// `‖q‖_ℓ`: the supremum of `⟨q, y⟩` over `y` vanishing outside
/// `[2^{-ℓ}, 1 - 2^{-ℓ}]` with `‖y'‖ <= 1`, evaluated in closed form as the
/// centered L² norm of the antiderivative on that window.
pub fn seminorm(q: &Potential, ell: u32) -> f64 {
    let (a, b) = window(ell.max(1));
    primitive(q).centered_l2(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Atom;

    #[test]
    fn primitive_examples() {
        let zero = primitive(&Potential::zero(8));
        assert_eq!(zero.eval(0.6), 0.0);
        let one = primitive(&Potential::constant(8, 1.0).unwrap());
        assert!((one.eval(0.37) - 0.37).abs() < 1e-15);
        let step = primitive(&Potential::atoms_only(8, vec![Atom { pos: 0.5, mass: 2.0 }]).unwrap());
        assert_eq!(step.eval(0.3), 0.0);
        assert_eq!(step.eval(0.5), 0.0);
        assert_eq!(step.eval_right(0.5), 2.0);
        assert_eq!(step.eval(0.75), 2.0);
    }

    #[test]
    fn seminorm_examples() {
        assert_eq!(seminorm(&Potential::zero(16), 3), 0.0);
        let m = 1.7;
        let atom = Potential::atoms_only(16, vec![Atom { pos: 0.5, mass: m }]).unwrap();
        assert!((seminorm(&atom, 2) - m / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        let c = 3.0;
        let flat = Potential::constant(16, c).unwrap();
        assert!((seminorm(&flat, 2) - c / (4.0 * 6f64.sqrt())).abs() < 1e-14);
    }
}
