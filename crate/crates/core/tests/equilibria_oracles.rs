use std::sync::Arc;

use carasel::corr::{CipWitness, Corr, GridSpace};
use carasel::equilibria::{
    bayes_equilibrium, bayes_h, maximal_element, random_fixed_point, random_nash, BayesSpec, EquilibriumOptions,
    GameSpec, PayoffFn,
};
use carasel::measure::{conditional_masses, AtomSpace, InfoPartition, Prior};
use carasel::selection::SelectOptions;
use carasel::setops::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_player(atoms: usize, nodes: usize, payoff: PayoffFn) -> GameSpec {
    let grid = Arc::new(GridSpace::uniform(0.0, 1.0, nodes).unwrap());
    GameSpec::new(
        vec!["row".into(), "col".into()],
        Arc::new(AtomSpace::uniform(atoms).unwrap()),
        vec![grid.clone(), grid],
        payoff,
        vec![true, true],
    )
    .unwrap()
}

/// `u_i = -(x_i - a_i(ω) - c_i x_{-i})^2`.
fn quadratic(rng: &mut ChaCha8Rng, atoms: usize) -> (PayoffFn, f64) {
    let a: Vec<[f64; 2]> = (0..atoms).map(|_| [rng.gen_range(0.1..0.6), rng.gen_range(0.1..0.6)]).collect();
    let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
    // |du/dx_i| <= 2 (1 + 0.6 + 0.5) on the unit square
    (Arc::new(move |i, t, x: &[f64]| -(x[i] - a[t][i] - c[i] * x[1 - i]).powi(2)), 4.2)
}

fn brute_regret(g: &GameSpec, t: usize, x: usize) -> f64 {
    let u = g.payoff();
    let joint = g.joint();
    (0..2)
        .map(|i| {
            let here = u(i, t, joint.point(x));
            (0..g.strategy_grid(i).len())
                .map(|k| u(i, t, joint.point(g.replace(x, i, k))) - here)
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[test]
fn quadratic_games_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let (u, lip) = quadratic(&mut rng, 3);
        let g = two_player(3, 11, u);
        let eps = lip * 0.1 + 1e-9;
        let c = random_nash(&g, &InfoPartition::singletons(3), eps, &EquilibriumOptions::default()).unwrap();
        assert!(c.checks.iter().all(|c| c.passed), "{:?}", c.checks);
        for t in 0..3 {
            let x = c.profile_nodes[t];
            let r = brute_regret(&g, t, x);
            assert!((r - c.regrets[t].iter().copied().fold(0.0, f64::max)).abs() <= 1e-12);
            assert!(r <= eps);
            // exact equilibria, when unique, are found
            let exact: Vec<usize> = (0..g.joint().len()).filter(|&y| brute_regret(&g, t, y) == 0.0).collect();
            if exact.len() == 1 {
                assert_eq!(x, exact[0]);
            }
        }
    }
}

#[test]
fn affine_rescaling_keeps_the_profile() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (u, lip) = quadratic(&mut rng, 2);
    let g = two_player(2, 11, u.clone());
    let scaled = g.with_payoff(Arc::new(move |i, t, x: &[f64]| 3.0 * u(i, t, x) + 7.0));
    let part = InfoPartition::singletons(2);
    let eps = lip * 0.1 + 1e-9;
    let a = random_nash(&g, &part, eps, &Default::default()).unwrap();
    let b = random_nash(&scaled, &part, 3.0 * eps, &Default::default()).unwrap();
    let zero = |c: &carasel::equilibria::EquilibriumCertificate| -> Vec<bool> {
        c.regrets.iter().map(|r| r.iter().all(|&v| v == 0.0)).collect()
    };
    assert_eq!(a.profile_nodes, b.profile_nodes);
    assert_eq!(zero(&a), zero(&b));
    for (ra, rb) in a.regrets.iter().flatten().zip(b.regrets.iter().flatten()) {
        assert!((3.0 * ra - rb).abs() <= 1e-9);
    }
}

#[test]
fn bayes_h_matches_weighted_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let atoms = rng.gen_range(2..=5);
        let weights: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.1..1.0)).collect();
        let labels = (0..atoms).map(|t| format!("w{t}")).collect();
        let space = Arc::new(AtomSpace::new(labels, weights.clone()).unwrap());
        let mut cells: Vec<Vec<usize>> = Vec::new();
        for t in 0..atoms {
            match cells.last_mut() {
                Some(c) if rng.gen_bool(0.5) => c.push(t),
                _ => cells.push(vec![t]),
            }
        }
        let part = InfoPartition::new(atoms, cells).unwrap();
        let raw: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.1..2.0)).collect();
        let z: f64 = raw.iter().zip(&weights).map(|(q, w)| q * w).sum();
        let q: Vec<f64> = raw.iter().map(|v| v / z).collect();
        let prior = Prior::new(&space, q.clone()).unwrap();
        let coef: Vec<f64> = (0..atoms).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let cf = coef.clone();
        let g = GameSpec::new(
            vec!["p".into()],
            space.clone(),
            vec![Arc::new(GridSpace::uniform(0.0, 1.0, 5).unwrap())],
            Arc::new(move |_, t, x: &[f64]| cf[t] * x[0] + (t as f64).sin()),
            vec![true],
        )
        .unwrap();
        let b = BayesSpec::new(g, part.clone(), vec![prior]).unwrap();
        for omega in 0..atoms {
            let x = [rng.gen_range(0.0..1.0)];
            let cell = part.cell_atoms(omega);
            let mass: f64 = cell.iter().map(|&t| q[t] * weights[t]).sum();
            let expect: f64 =
                cell.iter().map(|&t| q[t] * weights[t] / mass * (coef[t] * x[0] + (t as f64).sin())).sum();
            let h = bayes_h(&b, 0, omega, &x).unwrap();
            assert!((h - expect).abs() <= 1e-12, "{h} vs {expect}");
            for &other in cell {
                assert!((bayes_h(&b, 0, other, &x).unwrap() - h).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn conditional_masses_are_probabilities_on_the_cell() {
    let space = AtomSpace::new(vec!["a".into(), "b".into(), "c".into()], vec![0.2, 0.3, 0.5]).unwrap();
    let prior = Prior::new(&space, vec![2.0, 1.0, 0.6]).unwrap();
    let part = InfoPartition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
    for w in 0..3 {
        let m = conditional_masses(&space, &prior, &part, w).unwrap();
        assert!((m.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (t, v) in m.iter().enumerate() {
            assert_eq!(*v > 0.0, part.cell_of(t) == part.cell_of(w));
        }
    }
    assert_eq!(conditional_masses(&space, &prior, &part, 1).unwrap()[1], 1.0);
}

#[test]
fn bayes_profile_is_constant_on_cells() {
    let space = Arc::new(AtomSpace::uniform(4).unwrap());
    let grid = Arc::new(GridSpace::uniform(0.0, 1.0, 21).unwrap());
    let a = [0.0, 1.0, 0.2, 0.4];
    let g = GameSpec::new(
        vec!["p".into(), "q".into()],
        space.clone(),
        vec![grid.clone(), grid],
        Arc::new(move |i, t, x: &[f64]| -(x[i] - a[t]).powi(2)),
        vec![true, true],
    )
    .unwrap();
    let part = InfoPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let priors = vec![Prior::uniform(&space), Prior::uniform(&space)];
    let b = BayesSpec::new(g, part, priors).unwrap();
    let c = bayes_equilibrium(&b, 1e-9, &Default::default()).unwrap();
    assert_eq!(c.profile[0], vec![0.5, 0.5]);
    assert_eq!(c.profile[1], vec![0.5, 0.5]);
    assert!((c.profile[2][0] - 0.3).abs() < 1e-12);
    assert_eq!(c.profile[2], c.profile[3]);
}

#[test]
fn maximal_elements_are_argmaxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let peaks: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..1.0)).collect();
        let space = Arc::new(AtomSpace::uniform(2).unwrap());
        let grid = Arc::new(GridSpace::uniform(0.0, 1.0, 21).unwrap());
        let g = grid.clone();
        let pk = peaks.clone();
        let u = move |t: usize, v: f64| -(v - pk[t]).abs();
        let p = Corr::from_fn(space, grid.clone(), 1, move |t, z| {
            let x = g.point(z)[0];
            PointSet::new(1, g.points().iter().filter(|y| u(t, y[0]) > u(t, x)).cloned().collect()).unwrap()
        })
        .unwrap();
        let w = CipWitness::canonical(&p);
        let opts = SelectOptions { closed_valued: true, ..Default::default() };
        let c = maximal_element(&p, &w, &InfoPartition::singletons(2), &opts).unwrap();
        for t in 0..2 {
            let best = (0..21)
                .map(|k| k as f64 / 20.0)
                .fold(f64::NEG_INFINITY, |m, v| m.max(-(v - peaks[t]).abs()));
            assert!((-(c.values[t][0] - peaks[t]).abs() - best).abs() <= 1e-12);
        }
    }
}

#[test]
fn affine_contractions_have_their_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let lambda: f64 = rng.gen_range(0.0..0.9);
        // f(x) = (1 - λ) c + λ M x with M row-stochastic stays in the unit box
        let (p, q): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let m = [[p, 1.0 - p], [q, 1.0 - q]];
        let cs: Vec<[f64; 2]> = (0..2).map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
        let space = Arc::new(AtomSpace::uniform(2).unwrap());
        let grid = Arc::new(GridSpace::box_grid(&[0.0, 0.0], &[1.0, 1.0], 11).unwrap());
        let g = grid.clone();
        let cc = cs.clone();
        let psi = Corr::from_fn(space, grid.clone(), 2, move |t, z| {
            let x = g.point(z);
            let f = |r: usize| (1.0 - lambda) * cc[t][r] + lambda * (m[r][0] * x[0] + m[r][1] * x[1]);
            PointSet::singleton(vec![f(0), f(1)])
        })
        .unwrap();
        let w = CipWitness::canonical(&psi);
        let opts = SelectOptions { closed_valued: true, ..Default::default() };
        let fp = random_fixed_point(&psi, &w, &InfoPartition::singletons(2), 1e-6, &opts).unwrap();
        for t in 0..2 {
            // (I - λM) x = (1 - λ) c by Cramer's rule
            let (a, b, c, d) = (1.0 - lambda * m[0][0], -lambda * m[0][1], -lambda * m[1][0], 1.0 - lambda * m[1][1]);
            let (r0, r1) = ((1.0 - lambda) * cs[t][0], (1.0 - lambda) * cs[t][1]);
            let det = a * d - b * c;
            let exact = [(r0 * d - b * r1) / det, (a * r1 - c * r0) / det];
            assert!(fp.residuals[t] <= 1e-6);
            let dist = ((fp.values[t][0] - exact[0]).powi(2) + (fp.values[t][1] - exact[1]).powi(2)).sqrt();
            assert!(dist <= grid.mesh(), "{dist}");
        }
    }
}
