use std::sync::Arc;

use super::game::GameSpec;
use super::nash::{nash_with_table, EquilibriumCertificate, EquilibriumOptions};
use crate::error::{domain, Error, Result};
use crate::measure::{conditional_masses, InfoPartition, Prior};

/// A Bayesian game with a common information partition and per-player
/// priors.
#[derive(Debug, Clone)]
pub struct BayesSpec {
    game: GameSpec,
    partition: InfoPartition,
    priors: Vec<Prior>,
    /// `masses[i][ω]`: conditional probabilities of the atoms of `E(ω)`.
    masses: Vec<Vec<Vec<f64>>>,
}

impl BayesSpec {
    pub fn new(game: GameSpec, partition: InfoPartition, priors: Vec<Prior>) -> Result<Self> {
        let space = game.state_space().clone();
        if priors.len() != game.n_players() {
            return domain("one prior per player");
        }
        if partition.n_atoms() != space.len() {
            return domain("partition and state space disagree on the atom count");
        }
        let masses = priors
            .iter()
            .map(|q| {
                if q.density().len() != space.len() {
                    return domain("prior density has the wrong length");
                }
                (0..space.len()).map(|w| conditional_masses(&space, q, &partition, w)).collect()
            })
            .collect::<Result<_>>()?;
        Ok(BayesSpec { game, partition, priors, masses })
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn partition(&self) -> &InfoPartition {
        &self.partition
    }

    pub fn priors(&self) -> &[Prior] {
        &self.priors
    }

    /// The game whose payoffs are the interim expected utilities `h_i`.
    pub fn derived_game(&self) -> GameSpec {
        let base = self.game.payoff().clone();
        let masses = self.masses.clone();
        let part = self.partition.clone();
        self.game.with_payoff(Arc::new(move |i, w, x| interim(&base, &masses[i][w], part.cell_atoms(w), i, x)))
    }
}

fn interim(u: &super::PayoffFn, m: &[f64], cell: &[usize], i: usize, x: &[f64]) -> f64 {
    cell.iter().map(|&t| m[t] * u(i, t, x)).sum()
}

/// `h_i(ω, x)`: the conditional expectation of `u_i(·, x)` over the cell of
/// `ω`.
pub fn bayes_h(b: &BayesSpec, i: usize, omega: usize, x: &[f64]) -> Result<f64> {
    if i >= b.game.n_players() || omega >= b.partition.n_atoms() {
        return domain("player or atom out of range");
    }
    let cell = b.partition.cell_atoms(omega);
    Ok(interim(b.game.payoff(), &b.masses[i][omega], cell, i, x))
}

/// A Bayesian equilibrium: a random Nash equilibrium of the interim game,
/// checked to be constant on every cell.
pub fn bayes_equilibrium(b: &BayesSpec, eps_eq: f64, opts: &EquilibriumOptions) -> Result<EquilibriumCertificate> {
    let g = b.derived_game();
    let cert = nash_with_table(&g, &g.table(), &b.partition, eps_eq, opts)?;
    for cell in b.partition.cells() {
        if let Some(&a) = cell[1..].iter().find(|&&a| cert.profile_nodes[a] != cert.profile_nodes[cell[0]]) {
            return Err(Error::Construction(format!(
                "profile differs between atoms {} and {a} of one cell",
                cell[0]
            )));
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr::GridSpace;
    use crate::equilibria::random_nash;
    use crate::measure::AtomSpace;

    fn spec(weights: Vec<f64>, part: InfoPartition, q: Vec<f64>, payoff: super::super::PayoffFn) -> BayesSpec {
        let space = Arc::new(AtomSpace::new(vec!["a".into(), "b".into()], weights).unwrap());
        let grid = Arc::new(GridSpace::uniform(0.0, 1.0, 21).unwrap());
        let prior = Prior::new(&space, q).unwrap();
        let g = GameSpec::new(vec!["p".into()], space, vec![grid], payoff, vec![true]).unwrap();
        BayesSpec::new(g, part, vec![prior]).unwrap()
    }

    #[test]
    fn weighted_sum_example() {
        let b = spec(vec![0.5, 0.5], InfoPartition::trivial(2), vec![1.2, 0.8], Arc::new(|_, t, _| (t == 0) as u8 as f64));
        assert!((bayes_h(&b, 0, 0, &[0.0]).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(bayes_h(&b, 0, 0, &[0.3]).unwrap(), bayes_h(&b, 0, 1, &[0.3]).unwrap());
    }

    #[test]
    fn singleton_cells_reproduce_payoffs() {
        let b = spec(vec![0.3, 0.7], InfoPartition::singletons(2), vec![1.0, 1.0], Arc::new(|_, t, x: &[f64]| x[0] * (t as f64 + 1.5)));
        assert_eq!(bayes_h(&b, 0, 1, &[0.4]).unwrap(), 0.4 * 2.5);
    }

    #[test]
    fn averaged_quadratic_picks_the_mean() {
        let b = spec(vec![0.5, 0.5], InfoPartition::trivial(2), vec![1.0, 1.0], Arc::new(|_, t, x: &[f64]| -(x[0] - t as f64).powi(2)));
        let c = bayes_equilibrium(&b, 1e-9, &Default::default()).unwrap();
        assert_eq!(c.profile, vec![vec![0.5], vec![0.5]]);
    }

    #[test]
    fn singleton_cells_match_random_nash() {
        let payoff: super::super::PayoffFn = Arc::new(|_, t, x: &[f64]| -(x[0] - 0.2 - 0.5 * t as f64).powi(2));
        let b = spec(vec![0.5, 0.5], InfoPartition::singletons(2), vec![1.0, 1.0], payoff);
        let opts = EquilibriumOptions::default();
        let via_bayes = bayes_equilibrium(&b, 0.1, &opts).unwrap();
        let direct = random_nash(b.game(), b.partition(), 0.1, &opts).unwrap();
        assert_eq!(via_bayes, direct);
    }
}
