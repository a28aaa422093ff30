//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use majorant::measures::{Atom, Potential};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Root of `tan t + 4t = 0` in `(π/2, π)` by plain bisection on
/// `sin t + 4t cos t`, which has the same root and no poles there.
pub fn atom_root() -> f64 {
    let f = |t: f64| t.sin() + 4.0 * t * t.cos();
    let (mut a, mut b) = (std::f64::consts::FRAC_PI_2, std::f64::consts::PI);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `λ₀` of a unit atom at the midpoint, `4t²`.
pub fn atom_lambda() -> f64 {
    let t = atom_root();
    4.0 * t * t
}

/// Discrete dual of the seminorm: the maximum of `⟨q, y⟩` over continuous
/// piecewise-linear `y` on the nodes `k / cells` inside `[a, b]`, vanishing at
/// `a` and `b`, with `∫ y'² ≤ 1`. Equals `sqrt(bᵀ K⁻¹ b)` for the stiffness
/// matrix `K` and load vector `b_k = ⟨q, φ_k⟩`.
///
/// Exact for the discrete problem when the density is constant on every
/// element and atoms sit on nodes.
pub fn dual_seminorm(q: &Potential, a: f64, b: f64, cells: usize) -> f64 {
    let h = 1.0 / cells as f64;
    let first = (a / h).round() as usize;
    let last = (b / h).round() as usize;
    let m = last - first - 1;
    let load: Vec<f64> = (first + 1..last)
        .map(|k| {
            let x = k as f64 * h;
            let left = q.density()[q.cell_of(x - 0.5 * h)];
            let right = q.density()[q.cell_of(x + 0.5 * h)];
            let atoms: f64 = q
                .atoms()
                .iter()
                .map(|at| (1.0 - ((at.pos - x) / h).abs()).max(0.0) * at.mass)
                .sum();
            0.5 * h * (left + right) + atoms
        })
        .collect();
    // K = tridiag(-1, 2, -1) / h, solved by the Thomas algorithm
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    for i in 0..m {
        let diag = 2.0 / h - if i > 0 { (-1.0 / h) * c[i - 1] } else { 0.0 };
        c[i] = (-1.0 / h) / diag;
        d[i] = (load[i] - if i > 0 { (-1.0 / h) * d[i - 1] } else { 0.0 }) / diag;
    }
    let mut y = vec![0.0; m];
    for i in (0..m).rev() {
        y[i] = d[i] - if i + 1 < m { c[i] * y[i + 1] } else { 0.0 };
    }
    load.iter().zip(&y).map(|(l, v)| l * v).sum::<f64>().sqrt()
}

/// A random potential whose density is constant on `cells` equal cells and
/// whose atoms sit on multiples of `1 / 2048`.
pub fn aligned_potential(r: &mut ChaCha8Rng, cells: usize, atoms: bool) -> Potential {
    let blocks = r.gen_range(1..=8usize);
    let heights: Vec<f64> = (0..blocks).map(|_| r.gen_range(0.0..30.0)).collect();
    let density = (0..cells).map(|i| heights[i * blocks / cells]).collect();
    let list = if atoms {
        (0..r.gen_range(1..=3))
            .map(|_| Atom {
                pos: r.gen_range(50..2000) as f64 / 2048.0,
                mass: r.gen_range(0.1..10.0),
            })
            .collect()
    } else {
        Vec::new()
    };
    Potential::new(cells, density, list).unwrap()
}

/// A random potential with density bounded below by `floor`, so that small
/// negative path steps stay nonnegative.
pub fn positive_potential(r: &mut ChaCha8Rng, cells: usize, floor: f64) -> Potential {
    let blocks = r.gen_range(1..=6usize);
    let heights: Vec<f64> = (0..blocks).map(|_| floor + r.gen_range(0.0..20.0)).collect();
    Potential::new(cells, (0..cells).map(|i| heights[i * blocks / cells]).collect(), Vec::new()).unwrap()
}

/// `∫ (f - g)²` on `[0, 1]` by composite Simpson with `n` (even) panels.
pub fn l2_distance(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let sq = |x: f64| (f(x) - g(x)).powi(2);
    let mut total = sq(0.0) + sq(1.0);
    for i in 1..n {
        total += if i % 2 == 1 { 4.0 } else { 2.0 } * sq(i as f64 * h);
    }
    (total * h / 3.0).sqrt()
}

/// `∫_a^b f` by 5-point Gauss–Legendre on `panels` equal panels.
pub fn quad(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [
        0.0,
        0.538_469_310_105_683_1,
        -0.538_469_310_105_683_1,
        0.906_179_845_938_664,
        -0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            X.iter().zip(W).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// `λ₀` for a single atom of mass `m` at `ζ`, from the jump condition
/// `-k cot(k(1-ζ)) - k cot(kζ) = m` with `λ = k²`, `k ∈ (π, π / max(ζ, 1-ζ))`.
pub fn single_atom_lambda(zeta: f64, m: f64) -> f64 {
    let f = |k: f64| -k / (k * (1.0 - zeta)).tan() - k / (k * zeta).tan() - m;
    let (mut a, mut b) = (std::f64::consts::PI * (1.0 + 1e-15), std::f64::consts::PI / zeta.max(1.0 - zeta));
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let k = 0.5 * (a + b);
    k * k
}
