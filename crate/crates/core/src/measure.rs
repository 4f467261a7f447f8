//! Finite atomic measure spaces, information partitions and priors.

use crate::error::{domain, Error, Result};

/// A finite measure space in which every atom carries positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl AtomSpace {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return domain("atom space needs at least one atom");
        }
        if labels.len() != weights.len() {
            return domain(format!("{} labels but {} weights", labels.len(), weights.len()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return domain(format!("atom weight {w} is not strictly positive"));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return domain(format!("duplicate atom label {l:?}"));
            }
        }
        Ok(AtomSpace { labels, weights })
    }

    /// `n` atoms labelled `t0, t1, ...` with weight `1/n` each.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("atom space needs at least one atom");
        }
        let labels = (0..n).map(|i| format!("t{i}")).collect();
        AtomSpace::new(labels, vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `sum_t f(t) mu(t)`.
pub fn integrate(space: &AtomSpace, f: impl Fn(usize) -> f64) -> f64 {
    space.weights.iter().enumerate().map(|(t, w)| f(t) * w).sum()
}

/// A partition of the atoms into cells; `cell_of` gives the cell `E(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoPartition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl InfoPartition {
    pub fn new(n_atoms: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut cell_of = vec![usize::MAX; n_atoms];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return domain(format!("partition cell {c} is empty"));
            }
            for &a in cell {
                if a >= n_atoms {
                    return domain(format!("atom index {a} out of range (n = {n_atoms})"));
                }
                if cell_of[a] != usize::MAX {
                    return domain(format!("atom {a} appears in two cells"));
                }
                cell_of[a] = c;
            }
        }
        if let Some(a) = cell_of.iter().position(|&c| c == usize::MAX) {
            return domain(format!("atom {a} is not covered by the partition"));
        }
        let mut cells = cells;
        cells.iter_mut().for_each(|c| c.sort_unstable());
        Ok(InfoPartition { cells, cell_of })
    }

    /// The finest partition: every atom is its own cell.
    pub fn singletons(n_atoms: usize) -> Self {
        InfoPartition { cells: (0..n_atoms).map(|a| vec![a]).collect(), cell_of: (0..n_atoms).collect() }
    }

    /// The coarsest partition: one cell holding every atom.
    pub fn trivial(n_atoms: usize) -> Self {
        InfoPartition { cells: vec![(0..n_atoms).collect()], cell_of: vec![0; n_atoms] }
    }

    pub fn n_atoms(&self) -> usize {
        self.cell_of.len()
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_of(&self, atom: usize) -> usize {
        self.cell_of[atom]
    }

    /// The atoms sharing a cell with `atom`.
    pub fn cell_atoms(&self, atom: usize) -> &[usize] {
        &self.cells[self.cell_of[atom]]
    }

    pub fn is_finest(&self) -> bool {
        self.cells.len() == self.cell_of.len()
    }

    /// True when `f` agrees (per `eq`) on every pair of atoms sharing a cell.
    pub fn is_cellwise<F: Fn(usize, usize) -> bool>(&self, eq: F) -> bool {
        self.cells.iter().all(|cell| cell[1..].iter().all(|&a| eq(cell[0], a)))
    }
}

/// A probability density with respect to the atom weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    density: Vec<f64>,
}

impl Prior {
    pub fn new(space: &AtomSpace, density: Vec<f64>) -> Result<Self> {
        if density.len() != space.len() {
            return domain(format!("{} density values for {} atoms", density.len(), space.len()));
        }
        if let Some(q) = density.iter().find(|q| !(q.is_finite() && **q > 0.0)) {
            return domain(format!("prior density {q} is not strictly positive"));
        }
        let mass = integrate(space, |t| density[t]);
        if (mass - 1.0).abs() > 1e-9 {
            return domain(format!("prior integrates to {mass}, expected 1"));
        }
        Ok(Prior { density })
    }

    /// The density `1 / mu(T)`.
    pub fn uniform(space: &AtomSpace) -> Self {
        Prior { density: vec![1.0 / space.total(); space.len()] }
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }
}

/// Per-atom probabilities `q(t) mu(t) / sum_{s in E(omega)} q(s) mu(s)` on the
/// cell of `omega`, zero elsewhere. The weights sum to exactly one on
/// singleton cells.
pub fn conditional_masses(
    space: &AtomSpace,
    prior: &Prior,
    part: &InfoPartition,
    omega: usize,
) -> Result<Vec<f64>> {
    let cell = part.cell_atoms(omega);
    let mass: f64 = cell.iter().map(|&s| prior.density[s] * space.weights[s]).sum();
    if !(mass > 0.0) {
        return Err(Error::Precondition(format!("cell of atom {omega} has zero prior mass")));
    }
    let mut out = vec![0.0; space.len()];
    for &t in cell {
        out[t] = prior.density[t] * space.weights[t] / mass;
    }
    Ok(out)
}

/// The conditional density `q(t | E(omega))`: zero off the cell of `omega`
/// and `q(t) / sum_{s in E(omega)} q(s) mu(s)` on it.
pub fn conditional_density(
    space: &AtomSpace,
    prior: &Prior,
    part: &InfoPartition,
    omega: usize,
) -> Result<Vec<f64>> {
    let cell = part.cell_atoms(omega);
    let mass: f64 = cell.iter().map(|&s| prior.density[s] * space.weights[s]).sum();
    if !(mass > 0.0) {
        return Err(Error::Precondition(format!("cell of atom {omega} has zero prior mass")));
    }
    let mut out = vec![0.0; space.len()];
    for &t in cell {
        out[t] = prior.density[t] / mass;
    }
    Ok(out)
}
