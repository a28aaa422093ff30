mod common;

use common::{aligned_potential, dual_seminorm, quad, rng};
use majorant::measures::{
    bin_moment, bin_project, constraint_value, convex_combination, primitive, seminorm, window, Atom, Bins,
    Potential, Weight,
};
use proptest::prelude::*;
use rand::Rng;

fn weights() -> Vec<Weight> {
    vec![
        Weight::constant(1.0).unwrap(),
        Weight::power(1.0, 1.0).unwrap(),
        Weight::power(0.5, 2.0).unwrap(),
        Weight::table(vec![0.1, 0.3, 0.7, 0.9], vec![1.0, 3.0, 0.5, 2.0]).unwrap(),
    ]
}

/// Random bins of 1 to 4 grid cells covering the level-2 window of a
/// 64-cell grid.
fn aligned_bins(r: &mut impl Rng) -> Bins {
    let mut b = vec![16usize];
    while *b.last().unwrap() < 48 {
        let next = (b.last().unwrap() + r.gen_range(1..=4)).min(48);
        b.push(next);
    }
    Bins::new(2, b.iter().map(|&k| k as f64 / 64.0).collect(), 1.0).unwrap()
}

#[test]
fn bin_moment_matches_quadrature() {
    let mut r = rng(7);
    for w in weights() {
        for gamma in [1.0, 1.5, 3.0] {
            let q = aligned_potential(&mut r, 64, false);
            let (a, b) = (0.23, 0.71);
            let exact: f64 = (0..64)
                .map(|i| {
                    let (lo, hi) = q.cell_bounds(i);
                    let (u, v) = (lo.max(a), hi.min(b));
                    if v <= u {
                        return 0.0;
                    }
                    q.density()[i] * quad(u, v, 20, |x| w.eval(x).unwrap().powf(1.0 / gamma))
                })
                .sum();
            let got = bin_moment(&q, &w, gamma, a, b);
            assert!((got - exact).abs() <= 1e-10 * exact.abs().max(1.0), "{w} {gamma}: {got} vs {exact}");
        }
    }
}

#[test]
fn bin_projection_examples() {
    let w = Weight::constant(1.0).unwrap();
    let bins = Bins::uniform(2, 2).unwrap();
    // a flat density inside the window is already bin-constant
    let q = Potential::constant(64, 3.0).unwrap();
    let p = bin_project(&q, &w, 2.0, &bins).unwrap();
    for i in 16..48 {
        assert!((p.density()[i] - 3.0).abs() < 1e-14);
    }
    assert_eq!(p.density()[0], 0.0);
    // a step across the two bins is reproduced
    let step = Potential::from_fn(64, |x| if x < 0.5 { 1.0 } else { 5.0 }).unwrap();
    let p = bin_project(&step, &w, 1.5, &bins).unwrap();
    assert!((p.density()[20] - 1.0).abs() < 1e-14);
    assert!((p.density()[40] - 5.0).abs() < 1e-14);
    let atoms = Potential::atoms_only(64, vec![Atom { pos: 0.5, mass: 1.0 }]).unwrap();
    assert!(bin_project(&atoms, &w, 1.0, &bins).is_err());
}

#[test]
fn bins_reject_bad_partitions() {
    assert!(Bins::new(1, vec![0.5, 0.5], 1.0).is_err());
    assert!(Bins::new(2, vec![0.25, 0.5, 0.5, 0.75], 1.0).is_err());
    assert!(Bins::new(2, vec![0.2, 0.75], 1.0).is_err());
    assert!(Bins::new(2, vec![0.25, 0.75], 0.1).is_err());
    assert_eq!(Bins::for_delta(2, 0.5).unwrap().count(), 2);
}

#[test]
fn seminorm_matches_discrete_dual() {
    let mut r = rng(11);
    for k in 0..20 {
        let q = aligned_potential(&mut r, 64, k % 2 == 0);
        for ell in [2u32, 3, 6, 11] {
            let (a, b) = window(ell);
            let exact = seminorm(&q, ell);
            let dual = dual_seminorm(&q, a, b, 2048);
            assert!(dual <= exact * (1.0 + 1e-12), "discrete dual exceeds the supremum");
            assert!((exact - dual).abs() <= 1e-6 * exact, "ℓ={ell}: {exact} vs {dual}");
        }
    }
}

#[test]
fn convex_combination_examples() {
    let q1 = Potential::constant(8, 2.0).unwrap();
    let q2 = Potential::atoms_only(16, vec![Atom { pos: 0.25, mass: 4.0 }]).unwrap();
    let c = convex_combination(&q1, &q2, 0.25).unwrap();
    assert_eq!(c.grid_n(), 16);
    assert!((c.density()[3] - 1.5).abs() < 1e-15);
    assert_eq!(c.atoms(), &[Atom { pos: 0.25, mass: 1.0 }]);
    assert!(convex_combination(&q1, &q2, 1.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bin_projection_keeps_moments_and_contracts(seed in any::<u64>(), wi in 0usize..4, gi in 0usize..4) {
        let mut r = rng(seed);
        let w = &weights()[wi];
        let gamma = [1.0, 1.5, 2.0, 3.0][gi];
        let q = aligned_potential(&mut r, 64, false);
        let bins = aligned_bins(&mut r);
        let p = bin_project(&q, w, gamma, &bins).unwrap();
        for k in 0..bins.count() {
            let (a, b) = bins.bin(k);
            let (m0, m1) = (bin_moment(&q, w, gamma, a, b), bin_moment(&p, w, gamma, a, b));
            prop_assert!((m0 - m1).abs() <= 1e-10 * m0.abs().max(1.0), "bin {}: {} vs {}", k, m0, m1);
        }
        let (c0, c1) = (constraint_value(w, gamma, &q).unwrap(), constraint_value(w, gamma, &p).unwrap());
        prop_assert!(c1 <= c0 + 1e-12 * c0.max(1.0));
        let twice = bin_project(&p, w, gamma, &bins).unwrap();
        for (x, y) in twice.density().iter().zip(p.density()) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn pairings_agree(seed in any::<u64>(), atoms in any::<bool>()) {
        let mut r = rng(seed);
        let q = majorant::measures::random_potential(&mut r, 32, atoms);
        let n = r.gen_range(3..40usize);
        let (lo, hi) = (r.gen_range(0.0..0.3), r.gen_range(0.7..1.0));
        let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let mut ys: Vec<f64> = (0..=n).map(|_| r.gen_range(-1.0..1.0)).collect();
        ys[0] = 0.0;
        ys[n] = 0.0;
        let direct = q.pair_piecewise_linear(&xs, &ys);
        let by_parts = primitive(&q).pair_with_derivative(&xs, &ys);
        prop_assert!((direct - by_parts).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn seminorm_grows_with_level_and_is_homogeneous(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut r = rng(seed);
        let q = majorant::measures::random_potential(&mut r, 32, true);
        let values: Vec<f64> = (2..8).map(|l| seminorm(&q, l)).collect();
        for pair in values.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-12);
        }
        let scaled = seminorm(&q.scaled(c).unwrap(), 4);
        prop_assert!((scaled - c * values[2]).abs() <= 1e-12 * scaled.max(1.0));
    }

    #[test]
    fn constraint_is_homogeneous(seed in any::<u64>(), wi in 0usize..4, gi in 1usize..4, c in 0.1f64..5.0) {
        let mut r = rng(seed);
        let w = &weights()[wi];
        let gamma = [1.0, 1.5, 2.0, 3.0][gi];
        let q = majorant::measures::random_potential(&mut r, 32, false);
        let base = constraint_value(w, gamma, &q).unwrap();
        let scaled = constraint_value(w, gamma, &q.scaled(c).unwrap()).unwrap();
        prop_assert!((scaled - c.powf(gamma) * base).abs() <= 1e-12 * scaled.max(1.0));
    }
}
