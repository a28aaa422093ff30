//! The energy form `∫ y'z' + ⟨q, yz⟩` and the pencil `⟨T_q(λ) y, y⟩` on
//! sampled functions.
//!
//! Without derivative samples the functions are the piecewise-linear
//! interpolants of the samples and every integral is exact for them. With
//! derivative samples (right derivatives, as produced by the eigensolver) the
//! interpolant is piecewise cubic Hermite, with the left derivative at an atom
//! recovered from the jump condition.


use crate::error::{Error, Result};
use crate::measures::quadrature::gauss;
use crate::measures::{seminorm, Potential, COINCIDENT_ATOM_TOL};

/// Samples of a function on `[0, 1]`, optionally with right derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Option<Vec<f64>>,
}

impl SampledFn {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_abscissae(&x, y.len())?;
        Ok(SampledFn { x, y, dy: None })
    }

    pub fn with_derivative(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Result<Self> {
        check_abscissae(&x, y.len())?;
        if dy.len() != y.len() {
            return Err(Error::Domain("derivative samples do not match values".into()));
        }
        Ok(SampledFn { x, y, dy: Some(dy) })
    }

    /// `f` sampled on the nodes of a uniform grid with `n` cells.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let y = x.iter().map(|&t| f(t)).collect();
        SampledFn { x, y, dy: None }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

fn check_abscissae(x: &[f64], len: usize) -> Result<()> {
    if x.len() < 2 || x.len() != len {
        return Err(Error::Domain("need at least two samples with matching lengths".into()));
    }
    if x[0] != 0.0 || x[x.len() - 1] != 1.0 || x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("abscissae must increase from 0 to 1".into()));
    }
    Ok(())
}

/// Local interpolant of one function on `[x_j, x_{j+1}]`.
#[derive(Clone, Copy)]
struct Piece {
    x0: f64,
    h: f64,
    y0: f64,
    y1: f64,
    /// `(y'(x0+), y'(x1-))` for the Hermite form.
    slopes: Option<(f64, f64)>,
}

impl Piece {
    fn eval(&self, x: f64) -> (f64, f64) {
        let t = (x - self.x0) / self.h;
        match self.slopes {
            None => (
                self.y0 + t * (self.y1 - self.y0),
                (self.y1 - self.y0) / self.h,
            ),
            Some((d0, d1)) => {
                let t2 = t * t;
                let t3 = t2 * t;
                let v = (2.0 * t3 - 3.0 * t2 + 1.0) * self.y0
                    + (t3 - 2.0 * t2 + t) * self.h * d0
                    + (-2.0 * t3 + 3.0 * t2) * self.y1
                    + (t3 - t2) * self.h * d1;
                let d = (6.0 * t2 - 6.0 * t) / self.h * (self.y0 - self.y1)
                    + (3.0 * t2 - 4.0 * t + 1.0) * d0
                    + (3.0 * t2 - 2.0 * t) * d1;
                (v, d)
            }
        }
    }
}

fn mass_at(q: &Potential, x: f64) -> f64 {
    q.atoms()
        .iter()
        .filter(|a| (a.pos - x).abs() <= COINCIDENT_ATOM_TOL)
        .map(|a| a.mass)
        .sum()
}

fn pieces(f: &SampledFn, q: &Potential, hermite: bool) -> Vec<Piece> {
    f.x.windows(2)
        .enumerate()
        .map(|(j, w)| {
            let slopes = if hermite {
                let dy = f.dy.as_ref().expect("hermite mode needs derivatives");
                Some((dy[j], dy[j + 1] - mass_at(q, w[1]) * f.y[j + 1]))
            } else {
                None
            };
            Piece {
                x0: w[0],
                h: w[1] - w[0],
                y0: f.y[j],
                y1: f.y[j + 1],
                slopes,
            }
        })
        .collect()
}

fn check_pair(y: &SampledFn, z: &SampledFn) -> Result<()> {
    if y.x != z.x {
        return Err(Error::Domain("sampled functions use different abscissae".into()));
    }
    for f in [y, z] {
        let scale = f.y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let last = f.y[f.y.len() - 1];
        if f.y[0].abs() > 1e-12 * scale || last.abs() > 1e-12 * scale {
            return Err(Error::Domain(format!(
                "sampled function must vanish at 0 and 1, got {} and {last}",
                f.y[0]
            )));
        }
    }
    Ok(())
}

/// `(∫ y'z', ∫ q_density y z, ∫ y z)` plus the atom term `Σ m y(ζ) z(ζ)`.
fn integrals(q: &Potential, y: &SampledFn, z: &SampledFn) -> (f64, f64, f64, f64) {
    let hermite = y.dy.is_some() && z.dy.is_some();
    let (py, pz) = (pieces(y, q, hermite), pieces(z, q, hermite));
    let n = q.grid_n();
    let (mut grad, mut dens, mut mass) = (0.0, 0.0, 0.0);
    for (a, b) in py.iter().zip(&pz) {
        let (lo, hi) = (a.x0, a.x0 + a.h);
        let mut cuts = vec![lo];
        let first = (lo * n as f64).floor() as usize + 1;
        for i in first..n {
            let t = i as f64 / n as f64;
            if t >= hi {
                break;
            }
            if t > lo {
                cuts.push(t);
            }
        }
        cuts.push(hi);
        for w in cuts.windows(2) {
            let d = q.density()[q.cell_of(0.5 * (w[0] + w[1]))];
            let (g, m) = if hermite {
                (
                    gauss(w[0], w[1], |x| a.eval(x).1 * b.eval(x).1),
                    gauss(w[0], w[1], |x| a.eval(x).0 * b.eval(x).0),
                )
            } else {
                let (ya, yb) = (a.eval(w[0]).0, a.eval(w[1]).0);
                let (za, zb) = (b.eval(w[0]).0, b.eval(w[1]).0);
                let len = w[1] - w[0];
                (
                    a.eval(w[0]).1 * b.eval(w[0]).1 * len,
                    len / 6.0 * (2.0 * ya * za + ya * zb + yb * za + 2.0 * yb * zb),
                )
            };
            grad += g;
            mass += m;
            dens += d * m;
        }
    }
    let atoms = q
        .atoms()
        .iter()
        .map(|at| {
            let j = y.x.partition_point(|&t| t <= at.pos).saturating_sub(1).min(py.len() - 1);
            at.mass * py[j].eval(at.pos).0 * pz[j].eval(at.pos).0
        })
        .sum();
    (grad, dens, mass, atoms)
}

/// `∫ y'z' dx + ⟨q, y z⟩`.
pub fn energy_form(q: &Potential, y: &SampledFn, z: &SampledFn) -> Result<f64> {
    check_pair(y, z)?;
    let (grad, dens, _, atoms) = integrals(q, y, z);
    Ok(grad + dens + atoms)
}

/// `∫ (y')² dx + ⟨q, y²⟩ - λ ∫ y² dx`.
pub fn pencil_form(q: &Potential, lambda: f64, y: &SampledFn) -> Result<f64> {
    check_pair(y, y)?;
    let (grad, dens, mass, atoms) = integrals(q, y, y);
    Ok(grad + dens + atoms - lambda * mass)
}

/// `∫ y² dx` for the interpolant used by the forms.
pub fn norm_sq(q: &Potential, y: &SampledFn) -> f64 {
    integrals(q, y, y).2
}

/// The computable lower bound on `λ_{n+1} - λ_n` and the level `ℓ` it uses:
/// `ℓ` is the least integer above `5 + n + 2‖q‖₂` and the bound is
/// `2^{-ℓ} exp(-2^{-ℓ/2} ‖q‖_{ℓ+1})`.
pub fn gap_lower_bound(q: &Potential, n: usize) -> (f64, u32) {
    let level = (5.0 + n as f64 + 2.0 * seminorm(q, 2)).floor() as u32 + 1;
    let base = 0.5f64.powi(level as i32);
    let bound = base * (-base.sqrt() * seminorm(q, level + 1)).exp();
    (bound, level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::eigensolver::solve;
    use crate::measures::Atom;

    #[test]
    fn rayleigh_identity_for_sine() {
        let q = Potential::zero(1024);
        let y = SampledFn::from_fn(1024, |x| 2f64.sqrt() * (PI * x).sin());
        let e = energy_form(&q, &y, &y).unwrap();
        assert!((e - PI * PI).abs() < 1e-4);
        assert!(pencil_form(&q, 0.0, &y).unwrap() > 0.0);
    }

    #[test]
    fn atom_term_and_symmetry() {
        let q = Potential::atoms_only(8, vec![Atom { pos: 0.5, mass: 3.0 }]).unwrap();
        let y = SampledFn::from_fn(8, |x| x * (1.0 - x));
        let z = SampledFn::from_fn(8, |x| (PI * x).sin() * x);
        let e = energy_form(&q, &y, &y).unwrap();
        let slopes: f64 = (0..8)
            .map(|i| {
                let (a, b) = (i as f64 / 8.0, (i + 1) as f64 / 8.0);
                let d = (b * (1.0 - b) - a * (1.0 - a)) * 8.0;
                d * d / 8.0
            })
            .sum();
        assert!((e - slopes - 3.0 * 0.0625).abs() < 1e-14);
        let (yz, zy) = (energy_form(&q, &y, &z).unwrap(), energy_form(&q, &z, &y).unwrap());
        assert!((yz - zy).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonzero_boundary() {
        let q = Potential::zero(4);
        let y = SampledFn::from_fn(4, |x| x);
        assert!(matches!(energy_form(&q, &y, &y), Err(Error::Domain(_))));
    }

    #[test]
    fn eigenfunction_pencil_vanishes() {
        let q = Potential::from_fn(256, |x| 30.0 * x * x)
            .unwrap()
            .with_atoms(vec![Atom { pos: 0.37, mass: 5.0 }])
            .unwrap();
        for n in 0..3 {
            let pair = solve(&q, n, 1e-12).unwrap();
            let p = pencil_form(&q, pair.lambda(), &pair.sampled()).unwrap();
            assert!(p.abs() < 1e-8, "{n}: {p}");
        }
    }

    #[test]
    fn gap_bound_examples() {
        let q = Potential::zero(16);
        assert_eq!(gap_lower_bound(&q, 0), (2f64.powi(-6), 6));
        assert_eq!(gap_lower_bound(&q, 3), (2f64.powi(-9), 9));
    }
}
