use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::game::{pref_from_table, GameSpec, PayoffTable};
use crate::check::Check;
use crate::corr::{CipWitness, Corr};
use crate::error::{domain, Error, Result};
use crate::measure::InfoPartition;
use crate::selection::{caratheodory_select, glue, SelectOptions, Selection};
use crate::setops::{distance_to_hull, PointSet};

/// Below this distance a strategy counts as lying in `con P_i`.
pub const IRREFLEXIVITY_TOL: f64 = 1e-12;
/// Quasi-concavity spot checks per declared player.
pub const CONCAVITY_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumOptions {
    /// `P_i = {y_i : v_i > strict_margin}`.
    pub strict_margin: f64,
    pub select: SelectOptions,
    /// Round cap of the best-improvement iteration, per atom.
    pub max_rounds: usize,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions {
            strict_margin: 0.0,
            select: SelectOptions { closed_valued: true, ..Default::default() },
            max_rounds: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMethod {
    /// The iteration on the glued map reached a node where every
    /// preference set is empty.
    Iteration,
    /// Enumeration of the joint grid (minimal worst regret, lowest index).
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumCertificate {
    /// Joint strategy vector per atom.
    pub profile: Vec<Vec<f64>>,
    pub profile_nodes: Vec<usize>,
    /// `regrets[atom][player] = max_{y_i} v_i(ω, x*, y_i)`.
    pub regrets: Vec<Vec<f64>>,
    pub eps_eq: f64,
    /// Description of the partition the profile is measurable for.
    pub measurable_wrt: String,
    pub methods: Vec<ProfileMethod>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl EquilibriumCertificate {
    pub fn worst_regret(&self) -> f64 {
        self.regrets.iter().flatten().copied().fold(0.0, f64::max)
    }
}

fn describe(part: &InfoPartition) -> String {
    if part.is_finest() {
        "singleton cells".into()
    } else {
        format!("{} cells over {} atoms", part.cells().len(), part.n_atoms())
    }
}

/// Fails with the first `(ω, x, i)` where `x_i ∈ con P_i(ω, x)`.
pub(crate) fn check_irreflexive(p: &Corr, own: impl Fn(usize) -> Vec<f64> + Sync, who: &str) -> Result<()> {
    let n = p.n_nodes();
    let hit = (0..p.n_atoms() * n).into_par_iter().find_first(|&k| {
        let v = p.value(k / n, k % n);
        !v.is_empty() && distance_to_hull(v.points(), &own(k % n)) <= IRREFLEXIVITY_TOL
    });
    match hit {
        Some(k) => Err(Error::Precondition(format!(
            "irreflexivity fails at atom {}, node {}{who}: the strategy lies in con P",
            k / n,
            k % n
        ))),
        None => Ok(()),
    }
}

/// A random equilibrium of the game whose preferences are induced by the
/// payoffs: per player, a certified selection of `con P_i` is glued with the
/// whole strategy grid, and a per-atom fixed point of the product map is
/// searched for; every regret is then certified against `eps_eq`.
pub fn random_equilibrium(
    g: &GameSpec,
    witnesses: Option<&[CipWitness]>,
    part: &InfoPartition,
    eps_eq: f64,
    opts: &EquilibriumOptions,
) -> Result<EquilibriumCertificate> {
    equilibrium_with_table(g, &g.table(), witnesses, part, eps_eq, opts, Vec::new())
}

pub(crate) fn equilibrium_with_table(
    g: &GameSpec,
    table: &PayoffTable,
    witnesses: Option<&[CipWitness]>,
    part: &InfoPartition,
    eps_eq: f64,
    opts: &EquilibriumOptions,
    mut warnings: Vec<String>,
) -> Result<EquilibriumCertificate> {
    if !(eps_eq >= 0.0) {
        return domain("eps_eq must be nonnegative");
    }
    if part.n_atoms() != g.state_space().len() {
        return domain("partition and state space disagree on the atom count");
    }
    if let Some(ws) = witnesses {
        if ws.len() != g.n_players() {
            return domain("one witness per player");
        }
    }
    let joint = g.joint();
    let atoms = g.state_space().len();

    let mut checks = Vec::new();
    let mut selections: Vec<Selection> = Vec::with_capacity(g.n_players());
    for i in 0..g.n_players() {
        let p = pref_from_table(g, table, i, opts.strict_margin)?;
        check_irreflexive(&p, |x| g.strategy(joint.point(x), i).to_vec(), &format!(", player {i}"))?;
        let canonical;
        let w = match witnesses {
            Some(ws) => &ws[i],
            None => {
                canonical = CipWitness::canonical(&p);
                &canonical
            }
        };
        let cert = caratheodory_select(&p, w, part, &opts.select)?;
        let own = PointSet::new(p.dim(), g.strategy_grid(i).points().to_vec())?;
        let fallback = Corr::constant(g.state_space().clone(), joint.clone(), own);
        let glued = glue(&p, &cert.selection, &fallback, part, w.eps)?;
        let prefix = &g.players()[i];
        checks.extend(cert.checks.into_iter().map(|c| Check { name: format!("{prefix}/{}", c.name), ..c }));
        for c in glued.checks.iter().filter(|c| !c.passed) {
            // the grid cannot keep U open, so these are reported, not certified
            warnings.push(format!("{prefix}: {} failed on {} units at grid resolution", c.name, c.residual));
        }
        selections.push(cert.selection);
    }

    let start = joint.nearest(&{
        let (lo, hi) = joint.bounding_box();
        lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect::<Vec<_>>()
    });
    let found: Vec<(usize, ProfileMethod)> = (0..atoms)
        .into_par_iter()
        .map(|t| solve_atom(g, table, &selections, t, start, opts))
        .collect();

    let mut profile_nodes = Vec::with_capacity(atoms);
    let mut methods = Vec::with_capacity(atoms);
    let mut regrets = Vec::with_capacity(atoms);
    for (t, (x, m)) in found.into_iter().enumerate() {
        profile_nodes.push(x);
        methods.push(m);
        regrets.push((0..g.n_players()).map(|i| table.regret(g, i, t, x)).collect::<Vec<f64>>());
    }
    let worst = regrets.iter().flatten().copied().fold(0.0, f64::max);
    if worst > eps_eq {
        return Err(Error::NoCertificate {
            reason: format!("no grid profile has all regrets within eps_eq = {eps_eq:e}"),
            best: worst,
        });
    }
    checks.push(Check::within("regret", worst, eps_eq));
    // independent restatement: no node beats x* by more than eps_eq
    let oracle_mismatch = (0..atoms)
        .flat_map(|t| (0..g.n_players()).map(move |i| (t, i)))
        .filter(|&(t, i)| {
            let x = profile_nodes[t];
            let u0 = table.u(i, t, x);
            let improvable = (0..g.strategy_grid(i).len()).any(|k| table.u(i, t, g.replace(x, i, k)) - u0 > eps_eq);
            improvable != (regrets[t][i] > eps_eq)
        })
        .count();
    checks.push(Check::count("empty-preference", oracle_mismatch));
    let measurability = if !part.is_finest() && table.is_cellwise(part) {
        let bad = part
            .cells()
            .iter()
            .map(|cell| cell[1..].iter().filter(|&&a| profile_nodes[a] != profile_nodes[cell[0]]).count())
            .sum();
        Check::count("profile-measurability", bad).with_detail("cell-wise constancy")
    } else {
        Check::count("profile-measurability", 0).with_detail("trivially measurable (finest partition)")
    };
    checks.push(measurability);

    Ok(EquilibriumCertificate {
        profile: profile_nodes.iter().map(|&x| joint.point(x).to_vec()).collect(),
        profile_nodes,
        regrets,
        eps_eq,
        measurable_wrt: describe(part),
        methods,
        checks,
        warnings,
    })
}

fn solve_atom(
    g: &GameSpec,
    table: &PayoffTable,
    selections: &[Selection],
    t: usize,
    start: usize,
    opts: &EquilibriumOptions,
) -> (usize, ProfileMethod) {
    let mut x = start;
    let mut seen = HashSet::new();
    for _ in 0..opts.max_rounds {
        if !seen.insert(x) {
            break;
        }
        let mut moved = false;
        for (i, sel) in selections.iter().enumerate() {
            if let Some(target) = sel.value(t, x) {
                let k = g.strategy_grid(i).nearest(target);
                let y = g.replace(x, i, k);
                if y != x {
                    x = y;
                    moved = true;
                }
            }
        }
        if !moved {
            if selections.iter().all(|s| s.value(t, x).is_none()) {
                return (x, ProfileMethod::Iteration);
            }
            break;
        }
    }
    let n = g.joint().len();
    let worst = |x: usize| (0..g.n_players()).map(|i| table.regret(g, i, t, x)).fold(0.0, f64::max);
    let mut best = (0, worst(0));
    for x in 1..n {
        let r = worst(x);
        if r < best.1 {
            best = (x, r);
        }
    }
    (best.0, ProfileMethod::Exhaustive)
}

/// Midpoint quasi-concavity spot checks of `u_i(ω, ·, x_{-i})` along player
/// `i`'s grid; returns the number of failed samples.
pub(crate) fn concavity_failures(g: &GameSpec, table: &PayoffTable, i: usize, seed: u64) -> usize {
    let own = g.strategy_grid(i);
    let Some(axes) = own.axes() else {
        return 0;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let atoms = g.state_space().len();
    let n = g.joint().len();
    let index = |coords: &[usize]| coords.iter().zip(axes).fold(0, |acc, (c, ax)| acc * ax.len() + c);
    let mut failures = 0;
    for _ in 0..CONCAVITY_SAMPLES {
        let t = rng.gen_range(0..atoms);
        let x = rng.gen_range(0..n);
        let mut a = Vec::with_capacity(axes.len());
        let mut b = Vec::with_capacity(axes.len());
        for ax in axes {
            let p = rng.gen_range(0..ax.len());
            let mut q = rng.gen_range(0..ax.len());
            if (p + q) % 2 == 1 {
                q = if q + 1 < ax.len() { q + 1 } else { q - 1 };
            }
            a.push(p);
            b.push(q);
        }
        let m: Vec<usize> = a.iter().zip(&b).map(|(p, q)| (p + q) / 2).collect();
        let u = |c: &[usize]| table.u(i, t, g.replace(x, i, index(c)));
        let (ua, ub, um) = (u(&a), u(&b), u(&m));
        let scale = ua.abs().max(ub.abs()).max(1.0);
        if um < ua.min(ub) - 1e-9 * scale {
            failures += 1;
        }
    }
    failures
}

/// A random Nash equilibrium: preferences are induced by the payoffs, the
/// canonical witnesses are used, and declared quasi-concavity is spot
/// checked (failures become warnings).
pub fn random_nash(
    g: &GameSpec,
    part: &InfoPartition,
    eps_eq: f64,
    opts: &EquilibriumOptions,
) -> Result<EquilibriumCertificate> {
    nash_with_table(g, &g.table(), part, eps_eq, opts)
}

pub(crate) fn nash_with_table(
    g: &GameSpec,
    table: &PayoffTable,
    part: &InfoPartition,
    eps_eq: f64,
    opts: &EquilibriumOptions,
) -> Result<EquilibriumCertificate> {
    if part.n_atoms() != g.state_space().len() {
        return domain("partition and state space disagree on the atom count");
    }
    if !part.is_finest() && !table.is_cellwise(part) {
        return Err(Error::Precondition("payoffs are not constant on the cells of the partition".into()));
    }
    let mut warnings = Vec::new();
    for i in 0..g.n_players() {
        let name = &g.players()[i];
        if !g.concavity_declared(i) {
            warnings.push(format!("{name}: quasi-concavity not declared"));
            continue;
        }
        let bad = concavity_failures(g, table, i, opts.select.seed);
        if bad > 0 {
            warnings.push(format!("{name}: {bad} of {CONCAVITY_SAMPLES} midpoint quasi-concavity samples failed"));
        }
    }
    equilibrium_with_table(g, table, None, part, eps_eq, opts, warnings)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::corr::GridSpace;
    use crate::equilibria::PayoffFn;
    use crate::measure::AtomSpace;

    fn game(atoms: usize, players: usize, payoff: PayoffFn) -> GameSpec {
        let grid = Arc::new(GridSpace::uniform(0.0, 1.0, 21).unwrap());
        GameSpec::new(
            (0..players).map(|i| format!("p{i}")).collect(),
            Arc::new(AtomSpace::uniform(atoms).unwrap()),
            vec![grid; players],
            payoff,
            vec![true; players],
        )
        .unwrap()
    }

    #[test]
    fn independent_quadratics_hit_the_targets() {
        let a = [[0.12, 0.77], [0.5, 0.31]];
        let g = game(2, 2, Arc::new(move |i, t, x: &[f64]| -(x[i] - a[t][i]).powi(2)));
        let c = random_nash(&g, &InfoPartition::singletons(2), 0.05 * 2.0 + 1e-9, &Default::default()).unwrap();
        for t in 0..2 {
            for i in 0..2 {
                let node = (a[t][i] / 0.05).round() * 0.05;
                assert!((c.profile[t][i] - node).abs() < 1e-12, "{t} {i} {:?}", c.profile[t]);
            }
        }
        assert!(c.checks.iter().all(|c| c.passed), "{:?}", c.checks);
    }

    #[test]
    fn zero_payoffs_certify_with_zero_regret() {
        let g = game(3, 2, Arc::new(|_, _, _| 0.0));
        let c = random_nash(&g, &InfoPartition::trivial(3), 1e-9, &Default::default()).unwrap();
        assert_eq!(c.worst_regret(), 0.0);
    }

    #[test]
    fn single_player_linear_goes_to_the_top() {
        let g = game(1, 1, Arc::new(|_, _, x: &[f64]| x[0]));
        let c = random_equilibrium(&g, None, &InfoPartition::singletons(1), 1e-9, &Default::default()).unwrap();
        assert_eq!(c.profile[0], vec![1.0]);
    }

    #[test]
    fn follower_game() {
        let g = game(
            1,
            2,
            Arc::new(|i, _, x: &[f64]| if i == 0 { -(x[0] - x[1]).powi(2) } else { -(x[1] - 0.25).powi(2) }),
        );
        let c = random_nash(&g, &InfoPartition::singletons(1), 0.1 + 1e-9, &Default::default()).unwrap();
        assert!((c.profile[0][0] - 0.25).abs() < 1e-12);
        assert!((c.profile[0][1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn non_concave_payoff_warns_or_fails_irreflexivity() {
        let g = game(1, 1, Arc::new(|_, _, x: &[f64]| (x[0] - 0.5).powi(2)));
        match random_nash(&g, &InfoPartition::singletons(1), 1e-9, &Default::default()) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("irreflexivity")),
            Ok(c) => assert!(!c.warnings.is_empty()),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn non_measurable_payoff_is_rejected() {
        let g = game(2, 1, Arc::new(|_, t, x: &[f64]| -(x[0] - 0.5 * t as f64).powi(2)));
        assert!(matches!(
            random_nash(&g, &InfoPartition::trivial(2), 1e-9, &Default::default()),
            Err(Error::Precondition(_))
        ));
    }
}
