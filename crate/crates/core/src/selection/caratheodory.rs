use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::grid_select::{dirichlet_descent, hulls_on, modulus_of, MAX_SWEEPS};
use super::phi::{construct_phi, inputs_cellwise, PhiResult};
use super::series::{selection_series, DEFAULT_K_MAX};
use super::Selection;
use crate::check::Check;
use crate::corr::{cip_verify, scip_verify, CipOptions, CipWitness, Corr, Mode};
use crate::error::{Error, Result};
use crate::measure::InfoPartition;
use crate::setops::{distance_to_hull, ConvexSet, DEFAULT_MEMBERSHIP_TOL};

/// Sweep cap for the perturbed family members; they only need to be
/// feasible, not converged.
const RESTART_SWEEPS: usize = 200;
/// Weight of the pull toward the random support points in a restart.
const RESTART_FIDELITY: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectOptions {
    /// Take the closed-valued branch: a single energy-minimal selection.
    pub closed_valued: bool,
    /// Membership tolerance certified for every selected value.
    pub tol: f64,
    pub k_max: usize,
    /// Perturbed family members beyond the energy-minimal one.
    pub restarts: usize,
    pub seed: u64,
    /// Check witness condition (ii) on the whole grid.
    pub strict_cip: bool,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions {
            closed_valued: false,
            tol: DEFAULT_MEMBERSHIP_TOL,
            k_max: DEFAULT_K_MAX,
            restarts: 8,
            seed: 0,
            strict_cip: false,
        }
    }
}

/// A certified selection with the glued correspondence it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Certified {
    pub selection: Selection,
    pub phi: PhiResult,
    /// Witness check, the (A)–(E) checks of `Φ`, then `membership`,
    /// `modulus` and `measurability`.
    pub checks: Vec<Check>,
    pub max_membership_residual: f64,
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return d.into_iter().map(|v| v / n).collect();
        }
    }
}

fn support_point(c: &ConvexSet, d: &[f64]) -> Vec<f64> {
    let score = |v: &Vec<f64>| v.iter().zip(d).map(|(a, b)| a * b).sum::<f64>();
    // first maximizer in vertex order
    let mut best = &c.vertices()[0];
    let mut bs = score(best);
    for v in &c.vertices()[1..] {
        let s = score(v);
        if s > bs {
            best = v;
            bs = s;
        }
    }
    best.clone()
}

/// Selection for one atom: the energy-minimal member alone on the closed
/// branch, otherwise the series over the perturbed family.
fn select_atom(phi: &Corr, t: usize, nodes: &[usize], opts: &SelectOptions) -> Result<Vec<Option<Vec<f64>>>> {
    let grid = phi.grid();
    let hulls = hulls_on(phi, t, nodes)?;
    let base = dirichlet_descent(grid, &hulls, None, MAX_SWEEPS);
    if opts.closed_valued || opts.restarts == 0 {
        return Ok(base);
    }
    // Directions depend on the seed only, so atoms with equal data produce
    // equal selections.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut family = vec![base];
    for _ in 0..opts.restarts {
        let d = unit_direction(&mut rng, phi.dim());
        let anchor: Vec<Option<Vec<f64>>> = hulls.iter().map(|h| h.as_ref().map(|c| support_point(c, &d))).collect();
        family.push(dirichlet_descent(grid, &hulls, Some((&anchor, RESTART_FIDELITY)), RESTART_SWEEPS));
    }
    let mut out = vec![None; grid.len()];
    for &z in nodes {
        let members: Vec<&[f64]> = family.iter().map(|f| f[z].as_deref().expect("node in domain")).collect();
        out[z] = Some(selection_series(&members, opts.k_max));
    }
    Ok(out)
}

/// Builds `Φ` from the witness, selects from it atom by atom, and certifies
/// the result against `con Ψ`.
pub fn caratheodory_select(
    psi: &Corr,
    w: &CipWitness,
    part: &InfoPartition,
    opts: &SelectOptions,
) -> Result<Certified> {
    let cip_opts = CipOptions { strict: opts.strict_cip, membership_tol: DEFAULT_MEMBERSHIP_TOL };
    let witness_check = if w.mode == Mode::Atomic {
        let r = cip_verify(psi, w, w.eps, cip_opts)?;
        if let Some(f) = r.failures.first() {
            return Err(Error::Precondition(format!(
                "witness fails the inclusion property at atom {}, z = {}, x = {} ({:?})",
                f.atom, f.z, f.x, f.kind
            )));
        }
        Check::count("witness-cip", 0)
    } else {
        let r = scip_verify(psi, w, part, w.eps, cip_opts)?;
        if !r.ok {
            let what = match r.cip.failures.first() {
                Some(f) => format!("at atom {}, z = {}, x = {} ({:?})", f.atom, f.z, f.x, f.kind),
                None => {
                    let names: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                    names.join(", ")
                }
            };
            return Err(Error::Precondition(format!("witness fails the strong inclusion property: {what}")));
        }
        Check::count("witness-scip", 0).with_detail(format!("mode {}", w.mode))
    };

    let phi = construct_phi(psi, w, part)?;
    let dom = psi.domain();
    let per_atom: Vec<Vec<Option<Vec<f64>>>> = (0..psi.n_atoms())
        .into_par_iter()
        .map(|t| select_atom(&phi.phi, t, &dom.t_section(t), opts))
        .collect::<Result<_>>()?;

    let n = psi.n_nodes();
    let mut values = Vec::with_capacity(psi.n_atoms() * n);
    let mut atom_modulus = Vec::with_capacity(psi.n_atoms());
    let mut max_res: f64 = 0.0;
    for (t, vals) in per_atom.into_iter().enumerate() {
        for (z, v) in vals.iter().enumerate() {
            if let Some(v) = v {
                let r = distance_to_hull(psi.value(t, z).points(), v);
                if r > opts.tol {
                    return Err(Error::Construction(format!(
                        "selected value at atom {t}, node {z} misses con Ψ by {r:e}"
                    )));
                }
                max_res = max_res.max(r);
            }
        }
        atom_modulus.push(modulus_of(psi.grid(), &vals));
        values.extend(vals);
    }
    let selection = Selection::new(dom, values, atom_modulus);
    let modulus_excess = selection.modulus_excess(psi.grid());

    let measurability = if !part.is_finest() && inputs_cellwise(psi, w, part) {
        let bad = part
            .cells()
            .iter()
            .map(|cell| {
                cell[1..]
                    .iter()
                    .flat_map(|&a| (0..n).map(move |z| (a, z)))
                    .filter(|&(a, z)| !same_value(selection.value(cell[0], z), selection.value(a, z)))
                    .count()
            })
            .sum();
        Check::count("measurability", bad).with_detail("cell-wise constancy")
    } else {
        Check::count("measurability", 0).with_detail("trivially measurable (finest partition)")
    };

    let mut checks = vec![witness_check];
    checks.extend(phi.checks.iter().cloned());
    checks.push(Check::within("membership", max_res, opts.tol));
    checks.push(
        Check::within("modulus", modulus_excess, 1e-9).with_detail(format!("L = {:e}", selection.modulus)),
    );
    checks.push(measurability);
    Ok(Certified { selection, phi, checks, max_membership_residual: max_res })
}

fn same_value(a: Option<&[f64]>, b: Option<&[f64]>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12),
        _ => false,
    }
}
