use crate::corr::{Corr, GridSpace};
use crate::error::{Error, Result};
use crate::setops::{dist, ConvexSet};

/// Sweep cap of the block coordinate descent.
pub const MAX_SWEEPS: usize = 5000;
/// The descent stops once no node moves by more than this in a sweep.
pub const SWEEP_TOL: f64 = 1e-12;

/// A selection on the nodes of one atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSelection {
    /// `Some` exactly on the selected nodes.
    pub values: Vec<Option<Vec<f64>>>,
    /// Largest `||ψ(z) - ψ(z')|| / d(z, z')` over adjacent selected nodes.
    pub modulus: f64,
}

/// Largest difference quotient over adjacent nodes where both values exist.
pub fn modulus_of(grid: &GridSpace, values: &[Option<Vec<f64>>]) -> f64 {
    grid.adjacent_pairs()
        .filter_map(|(a, b)| match (&values[a], &values[b]) {
            (Some(p), Some(q)) => Some(dist(p, q) / grid.d(a, b)),
            _ => None,
        })
        .fold(0.0, f64::max)
}

/// Hulls of `Φ(t, ·)` on the nodes of `nodes`; an empty value there is an
/// inconsistency.
pub(crate) fn hulls_on(phi: &Corr, t: usize, nodes: &[usize]) -> Result<Vec<Option<ConvexSet>>> {
    let mut out = vec![None; phi.n_nodes()];
    for &z in nodes {
        match phi.hull(t, z) {
            Some(c) => out[z] = Some(c),
            None => {
                return Err(Error::Inconsistency(format!(
                    "value at atom {t}, node {z} is empty inside the claimed domain"
                )))
            }
        }
    }
    Ok(out)
}

/// Projected Gauss–Seidel on `sum_{adjacent} ||ψ(z) - ψ(z')||^2 +
/// fidelity * sum_z ||ψ(z) - anchor(z)||^2` with `ψ(z) ∈ hulls[z]`. Nodes
/// are swept in index order.
pub(crate) fn dirichlet_descent(
    grid: &GridSpace,
    hulls: &[Option<ConvexSet>],
    anchor: Option<(&[Option<Vec<f64>>], f64)>,
    max_sweeps: usize,
) -> Vec<Option<Vec<f64>>> {
    let mut values: Vec<Option<Vec<f64>>> = hulls.iter().map(|h| h.as_ref().map(|c| c.centroid())).collect();
    if let Some((a, _)) = anchor {
        for (v, s) in values.iter_mut().zip(a) {
            if let (Some(v), Some(s)) = (v.as_mut(), s) {
                *v = s.clone();
            }
        }
    }
    for _ in 0..max_sweeps {
        let mut moved: f64 = 0.0;
        for z in 0..grid.len() {
            let Some(hull) = &hulls[z] else { continue };
            if hull.vertices().len() == 1 {
                continue;
            }
            let dim = hull.dim();
            let mut target = vec![0.0; dim];
            let mut weight = 0.0;
            for &zp in grid.neighbors(z) {
                if let Some(v) = &values[zp] {
                    target.iter_mut().zip(v).for_each(|(t, x)| *t += x);
                    weight += 1.0;
                }
            }
            if let Some((a, lambda)) = anchor {
                if let Some(s) = &a[z] {
                    target.iter_mut().zip(s).for_each(|(t, x)| *t += lambda * x);
                    weight += lambda;
                }
            }
            if weight == 0.0 {
                continue;
            }
            target.iter_mut().for_each(|t| *t /= weight);
            let next = hull.project(&target);
            let cur = values[z].as_mut().expect("value set on hull nodes");
            moved = moved.max(dist(cur, &next));
            *cur = next;
        }
        if moved <= SWEEP_TOL {
            break;
        }
    }
    values
}

/// Energy-minimal selection from `con Φ(t, ·)` on the nodes where `Φ(t, ·)`
/// is nonempty. Each value is certified to lie within `tol` of its hull.
pub fn grid_select(phi: &Corr, t: usize, tol: f64) -> Result<AtomSelection> {
    let nodes = phi.domain().t_section(t);
    select_on(phi, t, &nodes, tol)
}

pub(crate) fn select_on(phi: &Corr, t: usize, nodes: &[usize], tol: f64) -> Result<AtomSelection> {
    let hulls = hulls_on(phi, t, nodes)?;
    let values = dirichlet_descent(phi.grid(), &hulls, None, MAX_SWEEPS);
    for (z, (v, h)) in values.iter().zip(&hulls).enumerate() {
        if let (Some(v), Some(h)) = (v, h) {
            let r = h.distance(v);
            if r > tol {
                return Err(Error::Construction(format!(
                    "selected value at atom {t}, node {z} misses its set by {r:e}"
                )));
            }
        }
    }
    let modulus = modulus_of(phi.grid(), &values);
    Ok(AtomSelection { values, modulus })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::measure::AtomSpace;
    use crate::setops::PointSet;

    fn line(n: usize) -> (Arc<AtomSpace>, Arc<GridSpace>) {
        (Arc::new(AtomSpace::uniform(1).unwrap()), Arc::new(GridSpace::uniform(0.0, 1.0, n).unwrap()))
    }

    #[test]
    fn singleton_values_are_forced() {
        let (s, g) = line(5);
        let phi = Corr::constant(s, g, PointSet::singleton(vec![0.3, -1.0]));
        let sel = grid_select(&phi, 0, 1e-9).unwrap();
        assert!(sel.values.iter().all(|v| v.as_deref() == Some(&[0.3, -1.0][..])));
        assert_eq!(sel.modulus, 0.0);
    }

    #[test]
    fn shifted_intervals() {
        let (s, g) = line(5);
        let gg = g.clone();
        let phi = Corr::from_fn(s, g, 1, move |_, z| {
            let x = gg.point(z)[0];
            PointSet::new(1, vec![vec![x], vec![x + 1.0]]).unwrap()
        })
        .unwrap();
        let sel = grid_select(&phi, 0, 1e-9).unwrap();
        for (z, v) in sel.values.iter().enumerate() {
            let x = phi.grid().point(z)[0];
            let v = v.as_ref().unwrap()[0];
            assert!(v >= x - 1e-12 && v <= x + 1.0 + 1e-12);
        }
        // the intervals share [1, 1] at every node, so the minimum energy is 0
        assert!(sel.modulus < 1e-6, "modulus {}", sel.modulus);
    }

    #[test]
    fn empty_claimed_node_is_inconsistent() {
        let (s, g) = line(3);
        let phi = Corr::empty(s, g, 1);
        assert!(matches!(select_on(&phi, 0, &[1], 1e-9), Err(Error::Inconsistency(_))));
    }
}
