//! Measure-valued potentials: a piecewise-constant density on a uniform grid
//! plus finitely many atoms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atoms closer than this are merged.
pub const COINCIDENT_ATOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub pos: f64,
    pub mass: f64,
}

/// A nonnegative measure on (0, 1).
///
/// Cell `i` is `[i/n, (i+1)/n]` and carries the constant density `density[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential")]
pub struct Potential {
    grid_n: usize,
    density: Vec<f64>,
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    grid_n: usize,
    density: Vec<f64>,
    #[serde(default)]
    atoms: Vec<Atom>,
}

impl TryFrom<RawPotential> for Potential {
    type Error = Error;

    fn try_from(raw: RawPotential) -> Result<Self> {
        Potential::new(raw.grid_n, raw.density, raw.atoms)
    }
}

impl Potential {
    /// Validates and normalizes: atoms are sorted and coincident atoms merged.
    pub fn new(grid_n: usize, density: Vec<f64>, atoms: Vec<Atom>) -> Result<Self> {
        if grid_n == 0 {
            return Err(Error::InvalidPotential("grid_n must be positive".into()));
        }
        if density.len() != grid_n {
            return Err(Error::InvalidPotential(format!(
                "density has {} values for grid_n = {grid_n}",
                density.len()
            )));
        }
        if let Some(v) = density.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidPotential(format!("negative or non-finite density {v}")));
        }
        for a in &atoms {
            if !(a.pos > 0.0 && a.pos < 1.0) {
                return Err(Error::InvalidPotential(format!(
                    "atom position {} outside (0, 1)",
                    a.pos
                )));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidPotential(format!(
                    "atom mass must be positive, got {}",
                    a.mass
                )));
            }
        }
        Ok(Potential {
            grid_n,
            density,
            atoms: merge_atoms(atoms),
        })
    }

    pub fn zero(grid_n: usize) -> Self {
        Potential {
            grid_n: grid_n.max(1),
            density: vec![0.0; grid_n.max(1)],
            atoms: Vec::new(),
        }
    }

    pub fn constant(grid_n: usize, value: f64) -> Result<Self> {
        Potential::new(grid_n, vec![value; grid_n], Vec::new())
    }

    /// Samples `f` at cell midpoints.
    pub fn from_fn(grid_n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = 1.0 / grid_n as f64;
        let density = (0..grid_n).map(|i| f((i as f64 + 0.5) * h)).collect();
        Potential::new(grid_n, density, Vec::new())
    }

    /// A potential made only of atoms.
    pub fn atoms_only(grid_n: usize, atoms: Vec<Atom>) -> Result<Self> {
        Potential::new(grid_n, vec![0.0; grid_n], atoms)
    }

    pub fn with_atoms(mut self, atoms: Vec<Atom>) -> Result<Self> {
        self.atoms.extend(atoms);
        Potential::new(self.grid_n, self.density, self.atoms)
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms.is_empty()
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.grid_n as f64
    }

    pub fn cell_bounds(&self, i: usize) -> (f64, f64) {
        let n = self.grid_n as f64;
        (i as f64 / n, (i + 1) as f64 / n)
    }

    /// Index of the cell containing `x` (right-open, the last cell is closed).
    pub fn cell_of(&self, x: f64) -> usize {
        ((x * self.grid_n as f64).floor().max(0.0) as usize).min(self.grid_n - 1)
    }

    /// Total mass `∫ dq`.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.cell_width()
            + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// `factor · q` for `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::Parameter(format!("scale factor must be >= 0, got {factor}")));
        }
        let atoms = if factor == 0.0 {
            Vec::new()
        } else {
            self.atoms
                .iter()
                .map(|a| Atom {
                    pos: a.pos,
                    mass: a.mass * factor,
                })
                .collect()
        };
        Ok(Potential {
            grid_n: self.grid_n,
            density: self.density.iter().map(|d| d * factor).collect(),
            atoms,
        })
    }

    /// `q + c` on the density part.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Potential::new(
            self.grid_n,
            self.density.iter().map(|d| d + c).collect(),
            self.atoms.clone(),
        )
    }

    /// The pushforward under `x ↦ 1 - x`.
    pub fn reflected(&self) -> Self {
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                pos: 1.0 - a.pos,
                mass: a.mass,
            })
            .collect();
        atoms.reverse();
        Potential {
            grid_n: self.grid_n,
            density: self.density.iter().rev().copied().collect(),
            atoms,
        }
    }

    /// Re-expresses the density on `grid_n` cells, preserving every cell
    /// integral of the density exactly when `grid_n` is a multiple of the
    /// current grid, and the total mass always.
    pub fn resampled(&self, grid_n: usize) -> Result<Self> {
        if grid_n == self.grid_n {
            return Ok(self.clone());
        }
        if grid_n == 0 {
            return Err(Error::Parameter("grid_n must be positive".into()));
        }
        if grid_n.is_multiple_of(self.grid_n) {
            let factor = grid_n / self.grid_n;
            let density = (0..grid_n).map(|j| self.density[j / factor]).collect();
            return Potential::new(grid_n, density, self.atoms.clone());
        }
        let h = 1.0 / grid_n as f64;
        let density = (0..grid_n)
            .map(|j| {
                let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
                self.density_integral(a, b) / h
            })
            .collect();
        Potential::new(grid_n, density, self.atoms.clone())
    }

    /// `∫_a^b density dx` (atoms excluded).
    pub fn density_integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let first = self.cell_of(a);
        let last = self.cell_of(b);
        (first..=last)
            .map(|i| {
                let (lo, hi) = self.cell_bounds(i);
                let overlap = hi.min(b) - lo.max(a);
                if overlap > 0.0 {
                    self.density[i] * overlap
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// `⟨q, y⟩` for the piecewise-linear `y` through `(xs, ys)`, computed
    /// directly from cell densities and atom evaluations.
    pub fn pair_piecewise_linear(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let mut breaks: Vec<f64> = xs.to_vec();
        breaks.extend((0..=self.grid_n).map(|i| i as f64 / self.grid_n as f64));
        breaks.retain(|&x| x >= xs[0] && x <= xs[xs.len() - 1]);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let interp = |x: f64| piecewise_linear(xs, ys, x);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = self.density[self.cell_of(0.5 * (a + b))];
            total += d * 0.5 * (interp(a) + interp(b)) * (b - a);
        }
        total + self.atoms.iter().map(|a| a.mass * interp(a.pos)).sum::<f64>()
    }

    /// Breakpoint layout used by the propagator.
    pub(crate) fn profile(&self) -> Profile {
        let n = self.grid_n;
        let h = self.cell_width();
        let mut xs = Vec::with_capacity(n + 1 + self.atoms.len());
        let mut mass_at = Vec::with_capacity(n + 1 + self.atoms.len());
        let mut seg_q = Vec::with_capacity(n + self.atoms.len());
        let mut atoms = self.atoms.iter().peekable();
        xs.push(0.0);
        mass_at.push(0.0);
        for i in 0..n {
            let hi = if i + 1 == n { 1.0 } else { (i + 1) as f64 * h };
            while let Some(a) = atoms.peek() {
                if a.pos < hi - COINCIDENT_ATOM_TOL || i + 1 == n {
                    let last = *xs.last().unwrap();
                    if a.pos - last <= COINCIDENT_ATOM_TOL {
                        *mass_at.last_mut().unwrap() += a.mass;
                    } else {
                        seg_q.push(self.density[i]);
                        xs.push(a.pos);
                        mass_at.push(a.mass);
                    }
                    atoms.next();
                } else {
                    break;
                }
            }
            seg_q.push(self.density[i]);
            xs.push(hi);
            let mut m = 0.0;
            while let Some(a) = atoms.peek() {
                if a.pos <= hi + COINCIDENT_ATOM_TOL && i + 1 < n {
                    m += a.mass;
                    atoms.next();
                } else {
                    break;
                }
            }
            mass_at.push(m);
        }
        Profile { xs, seg_q, mass_at }
    }
}

/// Breakpoints `xs` (grid nodes and atom positions), the density on each
/// segment `[xs[j], xs[j+1]]`, and the atom mass sitting at each breakpoint.
#[derive(Debug, Clone)]
pub(crate) struct Profile {
    pub xs: Vec<f64>,
    pub seg_q: Vec<f64>,
    pub mass_at: Vec<f64>,
}

impl Profile {
    pub fn segments(&self) -> usize {
        self.seg_q.len()
    }
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.pos.total_cmp(&b.pos));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if a.pos - last.pos <= COINCIDENT_ATOM_TOL => last.mass += a.mass,
            _ => merged.push(a),
        }
    }
    merged
}

fn piecewise_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let j = xs.partition_point(|&t| t <= x) - 1;
    let t = (x - xs[j]) / (xs[j + 1] - xs[j]);
    ys[j] + t * (ys[j + 1] - ys[j])
}
