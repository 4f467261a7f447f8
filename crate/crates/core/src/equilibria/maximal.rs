use std::collections::HashSet;

use rayon::prelude::*;

use super::nash::check_irreflexive;
use crate::check::Check;
use crate::corr::{CipWitness, Corr};
use crate::error::{domain, Error, Result};
use crate::measure::InfoPartition;
use crate::selection::{caratheodory_select, glue, SelectOptions, Selection};
use crate::setops::{ConvexSet, PointSet, SET_EQ_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalCertificate {
    /// `x*(ω)` per atom.
    pub values: Vec<Vec<f64>>,
    pub nodes: Vec<usize>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

/// A random maximal element of the preference `P` tabulated on `Ω x X`,
/// with `X` the grid itself: `P(ω, x*(ω))` is empty at every atom.
pub fn maximal_element(p: &Corr, w: &CipWitness, part: &InfoPartition, opts: &SelectOptions) -> Result<MaximalCertificate> {
    let grid = p.grid();
    if p.dim() != grid.dim() {
        return domain("preferences must take values in the grid's space");
    }
    if part.n_atoms() != p.n_atoms() {
        return domain("partition and correspondence disagree on the atom count");
    }
    check_irreflexive(p, |x| grid.point(x).to_vec(), "")?;

    // joint lower measurability of con P, reported next to the witness check
    let hull_eq = |a: usize, b: usize, z: usize| match (p.hull(a, z), p.hull(b, z)) {
        (None, None) => true,
        (Some(x), Some(y)) => hulls_equal(&x, &y),
        _ => false,
    };
    let con_p_measurability = if part.is_finest() {
        Check::count("con-p-measurability", 0).with_detail("trivially measurable (finest partition)")
    } else {
        let bad = (0..p.n_nodes()).filter(|&z| !part.is_cellwise(|a, b| hull_eq(a, b, z))).count();
        Check::count("con-p-measurability", bad).with_detail("cell-wise constancy")
    };

    let cert = caratheodory_select(p, w, part, opts)?;
    let x_all = PointSet::new(grid.dim(), grid.points().to_vec())?;
    let glued = glue(p, &cert.selection, &Corr::constant(p.space().clone(), grid.clone(), x_all), part, w.eps)?;
    let mut warnings = Vec::new();
    for c in glued.checks.iter().filter(|c| !c.passed) {
        warnings.push(format!("{} failed on {} units at grid resolution", c.name, c.residual));
    }

    let nodes: Vec<Option<usize>> =
        (0..p.n_atoms()).into_par_iter().map(|t| solve_atom(p, &cert.selection, t)).collect();
    let mut out = Vec::with_capacity(nodes.len());
    for (t, x) in nodes.into_iter().enumerate() {
        match x {
            Some(x) => out.push(x),
            None => {
                return Err(Error::NoCertificate {
                    reason: format!("every grid node has a nonempty preference set at atom {t}"),
                    best: f64::INFINITY,
                })
            }
        }
    }
    let mut checks = cert.checks;
    checks.push(con_p_measurability);
    let nonempty = out.iter().enumerate().filter(|&(t, &x)| !p.value(t, x).is_empty()).count();
    checks.push(Check::count("empty-preference", nonempty));
    Ok(MaximalCertificate {
        values: out.iter().map(|&x| grid.point(x).to_vec()).collect(),
        nodes: out,
        checks,
        warnings,
    })
}

fn hulls_equal(a: &ConvexSet, b: &ConvexSet) -> bool {
    a.vertices().iter().all(|v| b.distance(v) <= SET_EQ_TOL) && b.vertices().iter().all(|v| a.distance(v) <= SET_EQ_TOL)
}

fn solve_atom(p: &Corr, sel: &Selection, t: usize) -> Option<usize> {
    let grid = p.grid();
    let (lo, hi) = grid.bounding_box();
    let centre: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut x = grid.nearest(&centre);
    let mut seen = HashSet::new();
    while let Some(target) = sel.value(t, x) {
        if !seen.insert(x) {
            return (0..grid.len()).find(|&z| p.value(t, z).is_empty());
        }
        x = grid.nearest(target);
    }
    Some(x)
}
