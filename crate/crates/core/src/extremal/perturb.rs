//! First-order behaviour of `λ₀` along `q_ε = ((1-ε) q̂ + ε p) / (1 + α ε)`.

use serde::{Deserialize, Serialize};

use crate::eigensolver::{eigenvalue, solve};
use crate::error::{Error, Result};
use crate::measures::{Atom, Potential, Weight, COINCIDENT_ATOM_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub base: Potential,
    pub direction: Potential,
    pub alpha: f64,
}

impl PerturbationSpec {
    /// `∫ r p q̂^{γ-1} dx - 1`, the infimum of admissible `α` for `γ > 1`.
    pub fn alpha_floor(&self, w: &Weight, gamma: f64) -> Result<f64> {
        if self.base.has_atoms() || self.direction.has_atoms() {
            return Err(Error::InvalidPotential("atoms are only admissible for gamma = 1".into()));
        }
        let n = self.base.grid_n().max(self.direction.grid_n());
        let (q, p) = (self.base.resampled(n)?, self.direction.resampled(n)?);
        let total: f64 = (0..n)
            .map(|i| {
                let (lo, hi) = q.cell_bounds(i);
                w.integral(lo, hi) * p.density()[i] * q.density()[i].powf(gamma - 1.0)
            })
            .sum();
        Ok(total - 1.0)
    }

    /// The path point `q_ε`; `ε` may be negative as long as the result stays
    /// nonnegative.
    pub fn path_point(&self, eps: f64) -> Result<Potential> {
        let scale = 1.0 / (1.0 + self.alpha * eps);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Parameter(format!("1 + αε must be positive, got ε = {eps}")));
        }
        let n = self.base.grid_n().max(self.direction.grid_n());
        let (q, p) = (self.base.resampled(n)?, self.direction.resampled(n)?);
        let density = q
            .density()
            .iter()
            .zip(p.density())
            .map(|(a, b)| ((1.0 - eps) * a + eps * b) * scale)
            .collect();
        let atoms = q
            .atoms()
            .iter()
            .map(|at| (at.pos, (1.0 - eps) * at.mass * scale))
            .chain(p.atoms().iter().map(|at| (at.pos, eps * at.mass * scale)))
            .map(|(pos, mass)| Atom { pos, mass })
            .collect::<Vec<_>>();
        // contributions of opposite sign at one position cancel before validation
        let mut merged: Vec<Atom> = Vec::new();
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.pos.total_cmp(&b.pos));
        for at in sorted {
            match merged.last_mut() {
                Some(last) if (at.pos - last.pos).abs() <= COINCIDENT_ATOM_TOL => {
                    last.mass += at.mass
                }
                _ => merged.push(at),
            }
        }
        merged.retain(|a| a.mass.abs() > 0.0);
        Potential::new(n, density, merged).map_err(|_| {
            Error::Parameter(format!("q_ε leaves the nonnegative cone at ε = {eps}"))
        })
    }
}

/// `d/dε λ₀(q_ε)` at `ε = 0`: `⟨p, y²⟩ - (α + 1) ⟨q̂, y²⟩` with `y` the
/// normalized ground state of `q̂`.
///
/// For `γ > 1`, `α` must exceed [`PerturbationSpec::alpha_floor`]; for `γ = 1`
/// no bound is imposed.
pub fn directional_derivative(spec: &PerturbationSpec, w: &Weight, gamma: f64, tol: f64) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Parameter(format!("gamma must be >= 1, got {gamma}")));
    }
    if gamma > 1.0 {
        let floor = spec.alpha_floor(w, gamma)?;
        if !(spec.alpha > floor) {
            return Err(Error::Parameter(format!(
                "alpha = {} must exceed ∫ r p q̂^(γ-1) dx - 1 = {floor}",
                spec.alpha
            )));
        }
    }
    let y = solve(&spec.base, 0, tol)?;
    Ok(y.pair_square(&spec.direction) - (spec.alpha + 1.0) * y.pair_square(&spec.base))
}

/// `(λ₀(q_ε) - λ₀(q_{-ε})) / 2ε`.
pub fn central_difference(spec: &PerturbationSpec, eps: f64, tol: f64) -> Result<f64> {
    let plus = eigenvalue(&spec.path_point(eps)?, 0, tol)?;
    let minus = eigenvalue(&spec.path_point(-eps)?, 0, tol)?;
    Ok((plus - minus) / (2.0 * eps))
}

/// `(-3 λ₀(q₀) + 4 λ₀(q_ε) - λ₀(q_{2ε})) / 2ε`, for bases that cannot be
/// perturbed in the negative direction.
pub fn forward_difference(spec: &PerturbationSpec, eps: f64, tol: f64) -> Result<f64> {
    let l0 = eigenvalue(&spec.base, 0, tol)?;
    let l1 = eigenvalue(&spec.path_point(eps)?, 0, tol)?;
    let l2 = eigenvalue(&spec.path_point(2.0 * eps)?, 0, tol)?;
    Ok((-3.0 * l0 + 4.0 * l1 - l2) / (2.0 * eps))
}
