use std::sync::Arc;

use rayon::prelude::*;

use crate::corr::{Corr, GridSpace};
use crate::error::{domain, Result};
use crate::measure::{AtomSpace, InfoPartition};
use crate::setops::PointSet;

/// Largest joint strategy grid a game may use.
pub const MAX_JOINT_NODES: usize = 10_000;

/// `payoff(player, atom, joint strategy vector)`.
pub type PayoffFn = Arc<dyn Fn(usize, usize, &[f64]) -> f64 + Send + Sync>;

/// A finite-player random game on tensor strategy grids.
#[derive(Clone)]
pub struct GameSpec {
    players: Vec<String>,
    state_space: Arc<AtomSpace>,
    strategy_grids: Vec<Arc<GridSpace>>,
    joint: Arc<GridSpace>,
    strides: Vec<usize>,
    offsets: Vec<usize>,
    payoff: PayoffFn,
    concavity_declared: Vec<bool>,
}

impl std::fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameSpec")
            .field("players", &self.players)
            .field("atoms", &self.state_space.len())
            .field("joint_nodes", &self.joint.len())
            .field("concavity_declared", &self.concavity_declared)
            .finish()
    }
}

impl GameSpec {
    pub fn new(
        players: Vec<String>,
        state_space: Arc<AtomSpace>,
        strategy_grids: Vec<Arc<GridSpace>>,
        payoff: PayoffFn,
        concavity_declared: Vec<bool>,
    ) -> Result<Self> {
        if players.is_empty() {
            return domain("a game needs at least one player");
        }
        if strategy_grids.len() != players.len() || concavity_declared.len() != players.len() {
            return domain("one strategy grid and one concavity flag per player");
        }
        let total: usize = strategy_grids.iter().map(|g| g.len()).try_fold(1usize, |acc, n| acc.checked_mul(n)).unwrap_or(usize::MAX);
        if total > MAX_JOINT_NODES {
            return domain(format!("joint grid has {total} nodes, cap is {MAX_JOINT_NODES}"));
        }
        let factors: Vec<&GridSpace> = strategy_grids.iter().map(|g| g.as_ref()).collect();
        let joint = Arc::new(GridSpace::product(&factors)?);
        let mut strides = vec![1; players.len()];
        for i in (0..players.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * strategy_grids[i + 1].len();
        }
        let mut offsets = vec![0; players.len()];
        for i in 1..players.len() {
            offsets[i] = offsets[i - 1] + strategy_grids[i - 1].dim();
        }
        Ok(GameSpec { players, state_space, strategy_grids, joint, strides, offsets, payoff, concavity_declared })
    }

    /// The same game with another payoff function.
    pub fn with_payoff(&self, payoff: PayoffFn) -> Self {
        GameSpec { payoff, ..self.clone() }
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn n_players(&self) -> usize {
        self.players.len()
    }

    pub fn state_space(&self) -> &Arc<AtomSpace> {
        &self.state_space
    }

    pub fn strategy_grid(&self, i: usize) -> &Arc<GridSpace> {
        &self.strategy_grids[i]
    }

    pub fn joint(&self) -> &Arc<GridSpace> {
        &self.joint
    }

    pub fn concavity_declared(&self, i: usize) -> bool {
        self.concavity_declared[i]
    }

    pub fn payoff(&self) -> &PayoffFn {
        &self.payoff
    }

    /// Player `i`'s node index inside joint node `x`.
    pub fn player_node(&self, x: usize, i: usize) -> usize {
        (x / self.strides[i]) % self.strategy_grids[i].len()
    }

    /// Joint node equal to `x` except that player `i` plays node `k`.
    pub fn replace(&self, x: usize, i: usize, k: usize) -> usize {
        x - self.player_node(x, i) * self.strides[i] + k * self.strides[i]
    }

    /// Player `i`'s coordinates inside a joint vector.
    pub fn strategy<'a>(&self, joint: &'a [f64], i: usize) -> &'a [f64] {
        &joint[self.offsets[i]..self.offsets[i] + self.strategy_grids[i].dim()]
    }

    /// Payoffs at every `(player, atom, joint node)`.
    pub fn table(&self) -> PayoffTable {
        let n = self.joint.len();
        let atoms = self.state_space.len();
        let values = (0..self.n_players())
            .map(|i| {
                (0..atoms * n)
                    .into_par_iter()
                    .map(|k| (self.payoff)(i, k / n, self.joint.point(k % n)))
                    .collect()
            })
            .collect();
        PayoffTable { n_nodes: n, values }
    }
}

/// Tabulated payoffs, `values[player][atom * n_nodes + node]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    pub n_nodes: usize,
    pub values: Vec<Vec<f64>>,
}

impl PayoffTable {
    pub fn u(&self, i: usize, t: usize, x: usize) -> f64 {
        self.values[i][t * self.n_nodes + x]
    }

    /// `v_i(t, x, y_i) = u_i(t, y_i, x_{-i}) - u_i(t, x)`.
    pub fn gain(&self, g: &GameSpec, i: usize, t: usize, x: usize, k: usize) -> f64 {
        self.u(i, t, g.replace(x, i, k)) - self.u(i, t, x)
    }

    /// `max_{y_i} v_i(t, x, y_i)`, never negative.
    pub fn regret(&self, g: &GameSpec, i: usize, t: usize, x: usize) -> f64 {
        (0..g.strategy_grid(i).len()).map(|k| self.gain(g, i, t, x, k)).fold(0.0, f64::max)
    }

    /// True when every player's payoff rows agree inside each cell.
    pub fn is_cellwise(&self, part: &InfoPartition) -> bool {
        let n = self.n_nodes;
        self.values.iter().all(|row| part.is_cellwise(|a, b| row[a * n..(a + 1) * n] == row[b * n..(b + 1) * n]))
    }
}

/// `P_i(t, x) = {y_i : v_i(t, x, y_i) > strict_margin}` over the nodes of
/// player `i`'s grid, tabulated on `T x (joint grid)`.
pub fn pref_from_payoff(g: &GameSpec, i: usize, strict_margin: f64) -> Result<Corr> {
    pref_from_table(g, &g.table(), i, strict_margin)
}

pub(crate) fn pref_from_table(g: &GameSpec, table: &PayoffTable, i: usize, strict_margin: f64) -> Result<Corr> {
    let own = g.strategy_grid(i);
    let n = g.joint().len();
    let dim = own.dim();
    let values: Vec<PointSet> = (0..g.state_space().len() * n)
        .into_par_iter()
        .map(|k| {
            let (t, x) = (k / n, k % n);
            let pts = (0..own.len())
                .filter(|&y| table.gain(g, i, t, x, y) > strict_margin)
                .map(|y| own.point(y).to_vec())
                .collect();
            PointSet::new(dim, pts)
        })
        .collect::<Result<_>>()?;
    Corr::new(g.state_space().clone(), g.joint().clone(), dim, values)
}
