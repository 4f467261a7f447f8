use std::sync::Arc;

use super::GridSpace;
use crate::error::{domain, Result};
use crate::measure::AtomSpace;
use crate::setops::{ConvexSet, PointSet};

/// A tabulated correspondence `T x Z -> 2^(R^dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Corr {
    space: Arc<AtomSpace>,
    grid: Arc<GridSpace>,
    dim: usize,
    values: Vec<PointSet>,
}

impl Corr {
    /// Values laid out atom-major: entry `t * grid.len() + z`.
    pub fn new(
        space: Arc<AtomSpace>,
        grid: Arc<GridSpace>,
        dim: usize,
        values: Vec<PointSet>,
    ) -> Result<Self> {
        if values.len() != space.len() * grid.len() {
            return domain(format!(
                "{} values for {} atoms x {} nodes",
                values.len(),
                space.len(),
                grid.len()
            ));
        }
        if let Some(v) = values.iter().find(|v| v.dim() != dim) {
            return domain(format!("value of dim {} in a correspondence of dim {dim}", v.dim()));
        }
        Ok(Corr { space, grid, dim, values })
    }

    pub fn from_fn<F>(space: Arc<AtomSpace>, grid: Arc<GridSpace>, dim: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> PointSet,
    {
        let values =
            (0..space.len()).flat_map(|t| (0..grid.len()).map(move |z| (t, z))).map(|(t, z)| f(t, z)).collect();
        Self::new(space, grid, dim, values)
    }

    pub fn constant(space: Arc<AtomSpace>, grid: Arc<GridSpace>, value: PointSet) -> Self {
        let dim = value.dim();
        let values = vec![value; space.len() * grid.len()];
        Corr { space, grid, dim, values }
    }

    pub fn empty(space: Arc<AtomSpace>, grid: Arc<GridSpace>, dim: usize) -> Self {
        let values = vec![PointSet::empty(dim); space.len() * grid.len()];
        Corr { space, grid, dim, values }
    }

    pub fn space(&self) -> &Arc<AtomSpace> {
        &self.space
    }

    pub fn grid(&self) -> &Arc<GridSpace> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_atoms(&self) -> usize {
        self.space.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn value(&self, t: usize, z: usize) -> &PointSet {
        &self.values[t * self.grid.len() + z]
    }

    pub fn values(&self) -> &[PointSet] {
        &self.values
    }

    /// `con Ψ(t, z)`, or `None` where the value is empty.
    pub fn hull(&self, t: usize, z: usize) -> Option<ConvexSet> {
        ConvexSet::from_points(self.value(t, z)).ok()
    }

    /// `U_Ψ`, the set of `(t, z)` with nonempty value.
    pub fn domain(&self) -> Domain {
        Domain {
            n_atoms: self.n_atoms(),
            n_nodes: self.n_nodes(),
            mask: self.values.iter().map(|v| !v.is_empty()).collect(),
        }
    }

    /// True when both correspondences live on the same atoms and nodes.
    pub fn same_base(&self, other: &Corr) -> bool {
        self.n_atoms() == other.n_atoms() && self.n_nodes() == other.n_nodes()
    }
}

/// A subset of `T x Z`, stored as a mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    n_atoms: usize,
    n_nodes: usize,
    mask: Vec<bool>,
}

impl Domain {
    pub fn from_mask(n_atoms: usize, n_nodes: usize, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != n_atoms * n_nodes {
            return domain("domain mask has the wrong length");
        }
        Ok(Domain { n_atoms, n_nodes, mask })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn contains(&self, t: usize, z: usize) -> bool {
        self.mask[t * self.n_nodes + z]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// `U^t`: nodes `z` with `(t, z)` in the domain.
    pub fn t_section(&self, t: usize) -> Vec<usize> {
        (0..self.n_nodes).filter(|&z| self.contains(t, z)).collect()
    }

    /// `U^z`: atoms `t` with `(t, z)` in the domain.
    pub fn x_section(&self, z: usize) -> Vec<usize> {
        (0..self.n_atoms).filter(|&t| self.contains(t, z)).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    /// Members in atom-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_nodes;
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(move |(i, _)| (i / n, i % n))
    }
}
