use super::Selection;
use crate::check::Check;
use crate::corr::{lsc_check, usc_check, Corr};
use crate::error::{domain, Error, Result};
use crate::measure::InfoPartition;
use crate::setops::{PointSet, SET_EQ_TOL};

/// The glued correspondence and its preservation checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Glued {
    pub g: Corr,
    /// `glue-usc`, `glue-lsc`, `glue-joint-measurability`,
    /// `glue-section-measurability`: each counts the atoms (or nodes) where
    /// the premise on the fallback held but the conclusion on `G` failed.
    pub checks: Vec<Check>,
}

/// `G(t, x) = {ψ(t, x)}` on `U_Ψ`, `fallback(t, x)` elsewhere.
pub fn glue(psi: &Corr, sel: &Selection, fallback: &Corr, part: &InfoPartition, eps: f64) -> Result<Glued> {
    let dom = psi.domain();
    if sel.domain != dom {
        return domain("selection domain differs from the correspondence domain");
    }
    if !fallback.same_base(psi) {
        return domain("fallback correspondence lives on a different base");
    }
    if part.n_atoms() != psi.n_atoms() {
        return domain("partition and correspondence disagree on the atom count");
    }
    let n = psi.n_nodes();
    let mut values = Vec::with_capacity(psi.n_atoms() * n);
    for t in 0..psi.n_atoms() {
        for x in 0..n {
            match sel.value(t, x) {
                Some(v) => values.push(PointSet::singleton(v.to_vec())),
                None => {
                    let f = fallback.value(t, x);
                    if f.is_empty() {
                        return Err(Error::Precondition(format!(
                            "fallback is empty at atom {t}, node {x} outside the domain"
                        )));
                    }
                    values.push(f.clone());
                }
            }
        }
    }
    let dim = values.first().map(|v| v.dim()).unwrap_or(fallback.dim());
    let g = Corr::new(psi.space().clone(), psi.grid().clone(), dim, values)?;

    let implication_failures = |premise: &dyn Fn(&Corr, usize) -> bool, units: usize| {
        (0..units).filter(|&u| premise(fallback, u) && !premise(&g, u)).count()
    };
    let usc = implication_failures(&|c, t| usc_check(c, t, eps).ok, psi.n_atoms());
    let lsc = implication_failures(&|c, t| lsc_check(c, t, eps).ok, psi.n_atoms());
    let cellwise_at = |c: &Corr, x: usize| part.is_cellwise(|a, b| c.value(a, x).approx_eq(c.value(b, x), SET_EQ_TOL));
    let joint_premise = (0..n).all(|x| cellwise_at(fallback, x));
    let joint = usize::from(joint_premise && !(0..n).all(|x| cellwise_at(&g, x)));
    let section = implication_failures(&|c, x| cellwise_at(c, x), n);

    let checks = vec![
        Check::count("glue-usc", usc),
        Check::count("glue-lsc", lsc),
        Check::count("glue-joint-measurability", joint),
        Check::count("glue-section-measurability", section),
    ];
    Ok(Glued { g, checks })
}
