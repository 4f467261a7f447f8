//! Gluing of local witnesses, certified Carathéodory-type selections, the
//! interior-point series, and selection/fallback gluing.

mod caratheodory;
mod glue;
mod grid_select;
mod phi;
mod series;

pub use caratheodory::{caratheodory_select, Certified, SelectOptions};
pub use glue::{glue, Glued};
pub use grid_select::{grid_select, modulus_of, AtomSelection, MAX_SWEEPS, SWEEP_TOL};
pub use phi::{construct_phi, PhiReport, PhiResult, PHI_INCLUSION_TOL};
pub use series::{interior_series, DEFAULT_K_MAX};

use crate::corr::{Corr, Domain, GridSpace};
use crate::measure::AtomSpace;
use crate::setops::{dist, PointSet};

/// A single-valued map on a domain `U ⊆ T x Z` with a per-atom Lipschitz
/// bound over adjacent nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub domain: Domain,
    /// Atom-major, `Some` exactly on `domain`.
    pub values: Vec<Option<Vec<f64>>>,
    /// Largest per-atom modulus.
    pub modulus: f64,
    pub atom_modulus: Vec<f64>,
}

impl Selection {
    pub fn new(domain: Domain, values: Vec<Option<Vec<f64>>>, atom_modulus: Vec<f64>) -> Self {
        let modulus = atom_modulus.iter().copied().fold(0.0, f64::max);
        Selection { domain, values, modulus, atom_modulus }
    }

    pub fn value(&self, t: usize, z: usize) -> Option<&[f64]> {
        self.values[t * self.domain.n_nodes() + z].as_deref()
    }

    /// Values of one atom, indexed by node.
    pub fn atom_values(&self, t: usize) -> &[Option<Vec<f64>>] {
        let n = self.domain.n_nodes();
        &self.values[t * n..(t + 1) * n]
    }

    /// Largest `||ψ(t, z) - ψ(t, z')|| - L_t d(z, z')` over adjacent pairs,
    /// clamped at zero.
    pub fn modulus_excess(&self, grid: &GridSpace) -> f64 {
        let mut worst: f64 = 0.0;
        for t in 0..self.domain.n_atoms() {
            let vals = self.atom_values(t);
            for (a, b) in grid.adjacent_pairs() {
                if let (Some(p), Some(q)) = (&vals[a], &vals[b]) {
                    worst = worst.max(dist(p, q) - self.atom_modulus[t] * grid.d(a, b));
                }
            }
        }
        worst
    }

    /// The selection as a singleton-valued correspondence (empty off the
    /// domain).
    pub fn to_corr(&self, space: std::sync::Arc<AtomSpace>, grid: std::sync::Arc<GridSpace>, dim: usize) -> crate::Result<Corr> {
        let values = self
            .values
            .iter()
            .map(|v| match v {
                Some(v) => PointSet::singleton(v.clone()),
                None => PointSet::empty(dim),
            })
            .collect();
        Corr::new(space, grid, dim, values)
    }
}
