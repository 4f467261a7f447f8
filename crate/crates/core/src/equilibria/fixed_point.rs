use rayon::prelude::*;

use crate::check::Check;
use crate::corr::{CipWitness, Corr, GridSpace};
use crate::error::{Error, Result};
use crate::measure::InfoPartition;
use crate::selection::{caratheodory_select, Certified, SelectOptions};
use crate::setops::dist;

/// Damping factor of the fixed-point iteration.
pub const DAMPING: f64 = 0.5;
pub const MAX_ITERATIONS: usize = 10_000;

/// How a per-atom fixed point was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedPointMethod {
    Iteration,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointProfile {
    /// `x*(t)` per atom.
    pub values: Vec<Vec<f64>>,
    /// `||x*(t) - ψ(t, x*(t))||` per atom.
    pub residuals: Vec<f64>,
    pub methods: Vec<FixedPointMethod>,
    pub selection: Certified,
    pub checks: Vec<Check>,
}

/// A random fixed point of `Ψ`: a measurable `x*` with `x*(t)` within `tol`
/// of `ψ(t, x*(t))` for a certified selection `ψ`.
pub fn random_fixed_point(
    psi: &Corr,
    w: &CipWitness,
    part: &InfoPartition,
    tol: f64,
    opts: &SelectOptions,
) -> Result<FixedPointProfile> {
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let grid = psi.grid();
    if psi.dim() != grid.dim() {
        return Err(Error::Domain(format!(
            "values live in R^{} but the grid is in R^{}",
            psi.dim(),
            grid.dim()
        )));
    }
    let (lo, hi) = grid.bounding_box();
    for t in 0..psi.n_atoms() {
        for z in 0..psi.n_nodes() {
            let v = psi.value(t, z);
            if v.is_empty() {
                return Err(Error::Precondition(format!("Ψ is empty at atom {t}, node {z}")));
            }
            let outside = v.iter().any(|p| p.iter().zip(lo.iter().zip(&hi)).any(|(x, (a, b))| *x < a - 1e-9 || *x > b + 1e-9));
            if outside {
                return Err(Error::Precondition(format!(
                    "Ψ(atom {t}, node {z}) leaves the grid's bounding box"
                )));
            }
        }
    }

    let selection = caratheodory_select(psi, w, part, opts)?;
    let solved: Vec<(Vec<f64>, f64, FixedPointMethod)> = (0..psi.n_atoms())
        .into_par_iter()
        .map(|t| {
            let vals: Vec<Vec<f64>> =
                selection.selection.atom_values(t).iter().map(|v| v.clone().expect("full domain")).collect();
            solve_atom(grid, &vals, tol)
        })
        .collect();

    let mut values = Vec::new();
    let mut residuals = Vec::new();
    let mut methods = Vec::new();
    for (t, (x, r, m)) in solved.into_iter().enumerate() {
        if r > tol {
            return Err(Error::NoCertificate {
                reason: format!("fixed-point residual at atom {t} exceeds the tolerance"),
                best: r,
            });
        }
        values.push(x);
        residuals.push(r);
        methods.push(m);
    }
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let mut checks = selection.checks.clone();
    checks.push(Check::within("fixed-point-residual", worst, tol));
    let bad = part
        .cells()
        .iter()
        .map(|cell| cell[1..].iter().filter(|&&a| values[a] != values[cell[0]]).count())
        .sum();
    let cellwise = part.is_cellwise(|a, b| psi.values()[a * psi.n_nodes()..(a + 1) * psi.n_nodes()] == psi.values()[b * psi.n_nodes()..(b + 1) * psi.n_nodes()]);
    if cellwise && !part.is_finest() {
        checks.push(Check::count("fixed-point-measurability", bad).with_detail("cell-wise constancy"));
    } else {
        checks.push(Check::count("fixed-point-measurability", 0).with_detail("trivially measurable (finest partition)"));
    }
    Ok(FixedPointProfile { values, residuals, methods, selection, checks })
}

fn residual(grid: &GridSpace, vals: &[Vec<f64>], x: &[f64]) -> f64 {
    dist(x, &grid.interpolate(vals, x))
}

fn iterate(grid: &GridSpace, vals: &[Vec<f64>], start: Vec<f64>, tol: f64) -> (Vec<f64>, f64) {
    let mut x = start;
    let mut best = (x.clone(), residual(grid, vals, &x));
    for _ in 0..MAX_ITERATIONS {
        if best.1 <= tol * 1e-3 {
            break;
        }
        let fx = grid.interpolate(vals, &x);
        x = x.iter().zip(&fx).map(|(a, b)| (1.0 - DAMPING) * a + DAMPING * b).collect();
        let r = residual(grid, vals, &x);
        if r < best.1 {
            best = (x.clone(), r);
        }
    }
    best
}

fn solve_atom(grid: &GridSpace, vals: &[Vec<f64>], tol: f64) -> (Vec<f64>, f64, FixedPointMethod) {
    let (lo, hi) = grid.bounding_box();
    let centre: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let (x, r) = iterate(grid, vals, centre, tol);
    if r <= tol {
        return (x, r, FixedPointMethod::Iteration);
    }
    // exhaustive search over the nodes, then iterate from the best one
    let mut node = 0;
    let mut node_r = f64::INFINITY;
    for (z, v) in vals.iter().enumerate() {
        let d = dist(grid.point(z), v);
        if d < node_r {
            node = z;
            node_r = d;
        }
    }
    let (y, s) = iterate(grid, vals, grid.point(node).to_vec(), tol);
    let mut best = if s < node_r { (y, s) } else { (grid.point(node).to_vec(), node_r) };
    if r < best.1 {
        best = (x, r);
    }
    (best.0, best.1, FixedPointMethod::Exhaustive)
}
