use std::collections::HashMap;

use super::{CipWitness, Corr};
use crate::error::Result;
use crate::setops::{interior_point_margin, ConvexSet, PointSet};

/// Points of `con v` with positive ambient margin: the samples of `v` that
/// are interior, plus the centroid when it is interior.
pub fn interior_representatives(v: &PointSet) -> Vec<Vec<f64>> {
    let Ok(c) = ConvexSet::from_points(v) else {
        return Vec::new();
    };
    let centroid = c.centroid();
    if interior_point_margin(&centroid, &c) <= 0.0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<f64>> = v.iter().filter(|p| interior_point_margin(p, &c) > 0.0).cloned().collect();
    out.push(centroid);
    out
}

/// `𝕂(Ψ)(t, x)`: the union, over `z` with `(t, z) ∈ U_Ψ` and
/// `x ∈ O_z^t`, of the interior points of `con F_z(t, x)`.
pub fn k_operator(psi: &Corr, w: &CipWitness) -> Result<Corr> {
    let n = psi.n_nodes();
    let mut cache: HashMap<(usize, usize, usize), Vec<Vec<f64>>> = HashMap::new();
    let mut values = Vec::with_capacity(psi.n_atoms() * n);
    for t in 0..psi.n_atoms() {
        for x in 0..n {
            let mut pts = Vec::new();
            for z in w.index_set(psi, t, x) {
                let fam = w.local_of[z];
                let reps = cache
                    .entry((fam, t, x))
                    .or_insert_with(|| interior_representatives(w.families[fam].value(t, x)));
                pts.extend(reps.iter().cloned());
            }
            values.push(PointSet::new(psi.dim(), pts)?);
        }
    }
    Corr::new(psi.space().clone(), psi.grid().clone(), psi.dim(), values)
}

/// A finite union of polytopes, each tagged with the node it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedUnion {
    pub dim: usize,
    pub components: Vec<(usize, ConvexSet)>,
}

impl TaggedUnion {
    /// Pooled vertex list.
    pub fn points(&self) -> PointSet {
        let pts = self.components.iter().flat_map(|(_, c)| c.vertices().iter().cloned()).collect();
        PointSet::new(self.dim, pts).expect("component vertices share one dimension")
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Distance from `y` to the union.
    pub fn distance(&self, y: &[f64]) -> f64 {
        self.components.iter().map(|(_, c)| c.distance(y)).fold(f64::INFINITY, f64::min)
    }
}

/// `N(t, x, C)`: the union over `z ∈ C` of the (closed) hulls of
/// `F_z(t, x)`. Empty nodes of `C` contribute nothing.
pub fn n_operator(psi: &Corr, t: usize, x: usize, c: &[usize], w: &CipWitness) -> TaggedUnion {
    let mut components = Vec::new();
    for &z in c {
        if let Ok(hull) = ConvexSet::from_points(w.local(z).value(t, x)) {
            components.push((z, hull));
        }
    }
    TaggedUnion { dim: psi.dim(), components }
}
