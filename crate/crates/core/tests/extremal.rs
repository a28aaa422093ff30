mod common;

use std::f64::consts::PI;

use common::{atom_lambda, positive_potential, rng};
use majorant::eigensolver::{eigenvalue, solve};
use majorant::extremal::{
    central_difference, characterization_residual, directional_derivative, solve_extremal_gamma_eq1,
    solve_extremal_gamma_eq1_density, solve_extremal_gamma_gt1, PerturbationSpec,
};
use majorant::measures::{constraint_value, random_potential, Atom, Potential, Weight};
use majorant::{Error, SolverConfig};
use rand::Rng;

const TOL: f64 = 1e-12;

fn flat() -> Weight {
    Weight::constant(1.0).unwrap()
}

/// A random atom-free potential scaled onto the constraint boundary.
fn feasible(r: &mut impl Rng, w: &Weight, gamma: f64) -> Potential {
    loop {
        let q = random_potential(r, 64, false);
        let s = constraint_value(w, gamma, &q).unwrap();
        if s > 0.0 {
            return q.scaled(s.powf(-1.0 / gamma)).unwrap();
        }
    }
}

fn l1_asymmetry(q: &Potential) -> f64 {
    let r = q.reflected();
    q.density().iter().zip(r.density()).map(|(a, b)| (a - b).abs()).sum::<f64>() * q.cell_width()
}

#[test]
fn flat_weight_extremals_are_symmetric_and_beat_zero() {
    let cfg = SolverConfig::default();
    for gamma in [1.5, 2.0, 3.0] {
        let rep = solve_extremal_gamma_gt1(&flat(), gamma, &cfg).unwrap();
        assert!(rep.converged);
        assert!(rep.m > PI * PI);
        assert!(l1_asymmetry(&rep.q_hat) <= 1e-6, "γ = {gamma}");
        assert!(rep.residual < 1e-6);
        assert!((rep.constraint - 1.0).abs() < 1e-9);
    }
}

#[test]
fn first_order_optimality_at_the_extremal() {
    let w = Weight::power(1.0, 1.0).unwrap();
    let gamma = 2.0;
    // the derivative is bounded by the residual times ⟨q̂, y²⟩, so solve tightly
    let cfg = SolverConfig { tol_res: 1e-9, ..SolverConfig::default() };
    let rep = solve_extremal_gamma_gt1(&w, gamma, &cfg).unwrap();
    assert!(rep.converged);
    let mut r = rng(3);
    for _ in 0..20 {
        let mut spec = PerturbationSpec {
            base: rep.q_hat.clone(),
            direction: feasible(&mut r, &w, gamma),
            alpha: 0.0,
        };
        let floor = spec.alpha_floor(&w, gamma).unwrap();
        spec.alpha = floor + 1e-9 * floor.abs().max(1.0);
        let d = directional_derivative(&spec, &w, gamma, TOL).unwrap();
        assert!(d <= 1e-6, "{d}");
    }
}

#[test]
fn majorant_dominates_feasible_potentials() {
    let cfg = SolverConfig::default();
    let w = Weight::power(1.0, 1.0).unwrap();
    let gamma = 1.5;
    let m = solve_extremal_gamma_gt1(&w, gamma, &cfg).unwrap().m;
    let mut r = rng(9);
    for _ in 0..20 {
        let q = random_potential(&mut r, 64, false);
        let s = constraint_value(&w, gamma, &q).unwrap();
        if s == 0.0 {
            continue;
        }
        let q = q.scaled(s.powf(-1.0 / gamma)).unwrap();
        let base = eigenvalue(&q, 0, TOL).unwrap();
        assert!(m >= base);
        let t = r.gen_range(1.0..3.0);
        assert!(eigenvalue(&q.scaled(t).unwrap(), 0, TOL).unwrap() >= base);
    }
}

#[test]
fn single_atom_for_flat_weight() {
    let rep = solve_extremal_gamma_eq1(&flat(), 1, &SolverConfig::default()).unwrap();
    let atoms = rep.q_hat.atoms();
    assert_eq!(atoms.len(), 1);
    assert!((atoms[0].pos - 0.5).abs() <= 1e-6);
    let exact = atom_lambda();
    assert!((rep.m - exact).abs() <= 1e-8 * exact, "{} vs {exact}", rep.m);
}

#[test]
fn two_atoms_do_no_worse_on_a_bimodal_weight() {
    let w = Weight::table(vec![0.1, 0.3, 0.5, 0.7, 0.9], vec![3.0, 1.0, 3.0, 1.0, 3.0]).unwrap();
    assert!(w.is_symmetric());
    let cfg = SolverConfig::default();
    let one = solve_extremal_gamma_eq1(&w, 1, &cfg).unwrap();
    let two = solve_extremal_gamma_eq1(&w, 2, &cfg).unwrap();
    assert!(two.m >= one.m - 1e-9, "{} < {}", two.m, one.m);
}

#[test]
fn density_solution_satisfies_the_measure_characterization() {
    let cfg = SolverConfig::default();
    for w in [flat(), Weight::power(1.0, 1.0).unwrap()] {
        let rep = solve_extremal_gamma_eq1_density(&w, &cfg).unwrap();
        assert!(rep.residual < 1e-6, "{w}: {}", rep.residual);
        assert!((rep.constraint - 1.0).abs() < 1e-9);
        let atom = solve_extremal_gamma_eq1(&w, 1, &cfg).unwrap();
        assert!(rep.m >= atom.m);
    }
    let rep = solve_extremal_gamma_eq1_density(&flat(), &cfg).unwrap();
    assert!(l1_asymmetry(&rep.q_hat) <= 1e-6);
    // closed form for the flat weight: λ = ((π + √(π² + 4)) / 2)²
    let exact = ((PI + (PI * PI + 4.0).sqrt()) / 2.0).powi(2);
    assert!((rep.m - exact).abs() <= 1e-6 * exact, "{} vs {exact}", rep.m);
}

#[test]
fn approach_to_the_measure_case() {
    let cfg = SolverConfig::default();
    let limit = solve_extremal_gamma_eq1_density(&flat(), &cfg).unwrap().m;
    let mut values = Vec::new();
    for gamma in [1.5, 1.05, 1.01] {
        let rep = solve_extremal_gamma_gt1(&flat(), gamma, &cfg).unwrap();
        values.push(rep.m);
        eprintln!("γ = {gamma}: M = {:.10}, gap to γ = 1: {:.3e}", rep.m, (limit - rep.m) / limit);
    }
    assert!(values.windows(2).all(|p| p[1] >= p[0] - 1e-9));
    assert!((limit - values[2]).abs() <= 5e-2 * limit);
}

#[test]
fn residual_examples() {
    let q = Potential::constant(64, 1.0).unwrap();
    let y = solve(&q, 0, TOL).unwrap();
    assert!(characterization_residual(&flat(), 2.0, &q, &y).unwrap() > 1e-3);
    let atom = Potential::atoms_only(64, vec![Atom { pos: 0.3, mass: 1.0 }]).unwrap();
    let y = solve(&atom, 0, TOL).unwrap();
    assert!(characterization_residual(&flat(), 1.0, &atom, &y).unwrap() > 1e-3);
    let excited = solve(&q, 1, TOL).unwrap();
    assert!(matches!(characterization_residual(&flat(), 2.0, &q, &excited), Err(Error::Domain(_))));
    let other = solve(&Potential::constant(32, 2.0).unwrap(), 0, TOL).unwrap();
    assert!(matches!(characterization_residual(&flat(), 2.0, &q, &other), Err(Error::Domain(_))));
}

#[test]
fn derivative_examples() {
    let q = Potential::constant(32, 3.0).unwrap();
    let spec = PerturbationSpec { base: q.clone(), direction: q.clone(), alpha: 0.0 };
    assert!(directional_derivative(&spec, &flat(), 1.0, TOL).unwrap().abs() < 1e-12);
    let c = 2.5;
    let spec = PerturbationSpec {
        base: Potential::zero(32),
        direction: Potential::constant(32, c).unwrap(),
        alpha: 0.0,
    };
    assert!((directional_derivative(&spec, &flat(), 2.0, TOL).unwrap() - c).abs() < 1e-10);
    assert!((directional_derivative(&spec, &flat(), 1.0, TOL).unwrap() - c).abs() < 1e-10);
    let low = PerturbationSpec { base: q.clone(), direction: q, alpha: -0.5 };
    assert!(matches!(directional_derivative(&low, &flat(), 2.0, TOL), Err(Error::Parameter(_))));
}

#[test]
fn derivative_matches_central_differences() {
    let mut r = rng(17);
    let w = Weight::power(1.0, 1.0).unwrap();
    for k in 0..10 {
        let gamma = if k % 2 == 0 { 1.0 } else { 2.0 };
        let base = positive_potential(&mut r, 64, 1.0);
        let s = constraint_value(&w, gamma, &base).unwrap();
        let base = base.scaled(s.powf(-1.0 / gamma)).unwrap();
        let direction = feasible(&mut r, &w, gamma);
        let mut spec = PerturbationSpec { base, direction, alpha: 0.0 };
        if gamma > 1.0 {
            spec.alpha = spec.alpha_floor(&w, gamma).unwrap() + r.gen_range(0.0..1.0);
        }
        let analytic = directional_derivative(&spec, &w, gamma, TOL).unwrap();
        let fd = central_difference(&spec, 1e-4, TOL).unwrap();
        assert!((analytic - fd).abs() <= 1e-5, "{analytic} vs {fd}");
    }
}
