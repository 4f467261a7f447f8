use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::semicontinuity::{hull_lsc_modulus, hull_lsc_violations, Violation};
use super::Corr;
use crate::check::Check;
use crate::error::{domain, Result};
use crate::measure::InfoPartition;
use crate::setops::{distance_to_hull, hull_hausdorff, DEFAULT_MEMBERSHIP_TOL, SET_EQ_TOL};

/// Structural form of a witness family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Plain continuous inclusion property on an atomic space.
    Atomic,
    /// One local correspondence shared by every node.
    Shared,
    /// A countable (here finite) family with measurable neighbourhood graphs.
    Countable,
    /// Finite index sets with Hausdorff-continuous dependence on the node.
    Indexed,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "atomic" => Ok(Mode::Atomic),
            "shared" => Ok(Mode::Shared),
            "countable" => Ok(Mode::Countable),
            "indexed" => Ok(Mode::Indexed),
            other => domain(format!("unknown witness mode {other:?}")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Atomic => "atomic",
            Mode::Shared => "shared",
            Mode::Countable => "countable",
            Mode::Indexed => "indexed",
        })
    }
}

/// Local correspondences `F_z` and ball neighbourhoods `O_z^t = B(z, r)`
/// witnessing the continuous inclusion property of a correspondence.
#[derive(Debug, Clone, PartialEq)]
pub struct CipWitness {
    pub mode: Mode,
    /// Distinct local correspondences.
    pub families: Vec<Corr>,
    /// Node `z` uses `families[local_of[z]]` as `F_z`.
    pub local_of: Vec<usize>,
    /// Ball radius per `(t, z)`, atom-major; `Some` exactly on `U_Ψ`.
    pub radii: Vec<Option<f64>>,
    /// Tolerance at which the hulls of the locals are certified l.s.c.
    pub eps: f64,
    /// Box `[lo, hi]` holding every local value (indexed mode).
    pub bounds: Option<(Vec<f64>, Vec<f64>)>,
}

impl CipWitness {
    /// One local correspondence for every node.
    pub fn shared(f: Corr, radii: Vec<Option<f64>>, eps: f64) -> Self {
        let n = f.n_nodes();
        CipWitness { mode: Mode::Shared, families: vec![f], local_of: vec![0; n], radii, eps, bounds: None }
    }

    /// Node `z` uses `families[z]`.
    pub fn per_node(mode: Mode, families: Vec<Corr>, radii: Vec<Option<f64>>, eps: f64) -> Self {
        let local_of = (0..families.len()).collect();
        CipWitness { mode, families, local_of, radii, eps, bounds: None }
    }

    pub fn with_bounds(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        self.bounds = Some((lo, hi));
        self
    }

    /// `F_z`.
    pub fn local(&self, z: usize) -> &Corr {
        &self.families[self.local_of[z]]
    }

    pub fn radius(&self, t: usize, z: usize) -> Option<f64> {
        self.radii[t * self.local_of.len() + z]
    }

    /// `x ∈ O_z^t`.
    pub fn in_ball(&self, psi: &Corr, t: usize, z: usize, x: usize) -> bool {
        matches!(self.radius(t, z), Some(r) if psi.grid().d(x, z) < r)
    }

    /// `J(t, x) = {z : x ∈ O_z^t}`, in index order.
    pub fn index_set(&self, psi: &Corr, t: usize, x: usize) -> Vec<usize> {
        (0..self.local_of.len()).filter(|&z| self.in_ball(psi, t, z, x)).collect()
    }

    /// The witness read off an l.s.c. correspondence: `F_z = Ψ`, and
    /// `O_z^t` the largest ball around `z` inside `U_Ψ^t`. The recorded
    /// `eps` sits just above the measured hull l.s.c. modulus of `Ψ`.
    pub fn canonical(psi: &Corr) -> Self {
        let grid = psi.grid();
        let dom = psi.domain();
        let big = 2.0 * grid.diameter() + 1.0;
        let mut radii = vec![None; psi.n_atoms() * psi.n_nodes()];
        for (t, z) in dom.iter() {
            let r = (0..grid.len())
                .filter(|&x| !dom.contains(t, x))
                .map(|x| grid.d(x, z))
                .fold(big, f64::min);
            radii[t * grid.len() + z] = Some(r);
        }
        let modulus = (0..psi.n_atoms()).map(|t| hull_lsc_modulus(psi, t)).fold(0.0, f64::max);
        Self::shared(psi.clone(), radii, certified_eps(modulus))
    }
}

/// A tolerance strictly above a measured modulus.
pub fn certified_eps(modulus: f64) -> f64 {
    modulus * (1.0 + 1e-9) + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CipOptions {
    /// Check condition (ii) on the whole grid for every atom.
    pub strict: bool,
    pub membership_tol: f64,
}

impl Default for CipOptions {
    fn default() -> Self {
        CipOptions { strict: false, membership_tol: DEFAULT_MEMBERSHIP_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// `F_z(t, x)` is empty inside the ball.
    EmptyLocal,
    /// `F_z(t, x)` leaves `con Ψ(t, x)`.
    NotIncluded,
    /// `con F_z(t, ·)` fails the l.s.c. check.
    NotLsc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CipFailure {
    pub atom: usize,
    pub z: usize,
    pub x: usize,
    pub kind: FailureKind,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CipReport {
    pub ok: bool,
    pub failures: Vec<CipFailure>,
    /// Largest inclusion residual seen on condition (i).
    pub max_inclusion_residual: f64,
}

pub(crate) fn check_structure(psi: &Corr, w: &CipWitness) -> Result<()> {
    let n = psi.n_nodes();
    if w.local_of.len() != n {
        return domain(format!("witness indexes {} nodes, grid has {n}", w.local_of.len()));
    }
    if let Some(&k) = w.local_of.iter().find(|&&k| k >= w.families.len()) {
        return domain(format!("witness refers to missing local correspondence {k}"));
    }
    for f in &w.families {
        if !f.same_base(psi) || f.dim() != psi.dim() {
            return domain("local correspondence does not match the base correspondence");
        }
    }
    if w.radii.len() != psi.n_atoms() * n {
        return domain("witness radius table has the wrong size");
    }
    let dom = psi.domain();
    for t in 0..psi.n_atoms() {
        for z in 0..n {
            match (dom.contains(t, z), w.radius(t, z)) {
                (true, Some(r)) if r > 0.0 && !r.is_nan() => {}
                (true, Some(r)) => return domain(format!("radius {r} at ({t}, {z}) is not positive")),
                (true, None) => return domain(format!("radius missing at ({t}, {z}) in the domain")),
                (false, Some(_)) => return domain(format!("radius given at ({t}, {z}) outside the domain")),
                (false, None) => {}
            }
        }
    }
    if w.mode == Mode::Shared && w.families.len() != 1 {
        return domain("shared witness must hold exactly one local correspondence");
    }
    if !(w.eps.is_finite() && w.eps > 0.0) {
        return domain(format!("witness eps {} must be positive", w.eps));
    }
    Ok(())
}

/// Verifies conditions (i) and (ii) of the continuous inclusion property
/// for a witness, at l.s.c. tolerance `eps`.
pub fn cip_verify(psi: &Corr, w: &CipWitness, eps: f64, opts: CipOptions) -> Result<CipReport> {
    check_structure(psi, w)?;
    let grid = psi.grid();
    let dom = psi.domain();
    let n = grid.len();
    // Inclusion residuals depend on (family, t, x) only, and ball-restricted
    // l.s.c. violations are a filter of the whole-grid ones.
    let mut inclusion: HashMap<(usize, usize, usize), f64> = HashMap::new();
    let mut lsc: HashMap<(usize, usize), Vec<Violation>> = HashMap::new();
    let mut failures = Vec::new();
    let mut max_res: f64 = 0.0;
    for t in 0..psi.n_atoms() {
        for z in 0..n {
            let fam = w.local_of[z];
            let f = &w.families[fam];
            if let Some(r) = w.radius(t, z) {
                for x in grid.ball(z, r) {
                    let res = *inclusion.entry((fam, t, x)).or_insert_with(|| {
                        let fv = f.value(t, x);
                        let pv = psi.value(t, x);
                        if fv.is_empty() || pv.is_empty() {
                            f64::INFINITY
                        } else {
                            fv.iter().map(|p| distance_to_hull(pv.points(), p)).fold(0.0, f64::max)
                        }
                    });
                    if f.value(t, x).is_empty() {
                        failures.push(CipFailure { atom: t, z, x, kind: FailureKind::EmptyLocal, residual: res });
                        continue;
                    }
                    max_res = max_res.max(res);
                    if res > opts.membership_tol {
                        failures.push(CipFailure { atom: t, z, x, kind: FailureKind::NotIncluded, residual: res });
                    }
                }
            }
            let all = lsc.entry((fam, t)).or_insert_with(|| hull_lsc_violations(f, t, eps, |_, _| true));
            let whole = opts.strict || !dom.contains(t, z);
            let r = w.radius(t, z).unwrap_or(0.0);
            for v in all.iter().filter(|v| whole || (grid.d(v.z, z) < r && grid.d(v.z_prime, z) < r)) {
                failures.push(CipFailure { atom: t, z, x: v.z, kind: FailureKind::NotLsc, residual: v.gap });
            }
        }
    }
    Ok(CipReport { ok: failures.is_empty(), failures, max_inclusion_residual: max_res })
}

/// Result of the strong-CIP check: the plain report plus named checks for
/// joint measurability and the mode conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScipReport {
    pub ok: bool,
    pub cip: CipReport,
    pub checks: Vec<Check>,
}

fn cellwise_violations(part: &InfoPartition, n_nodes: usize, same: impl Fn(usize, usize, usize) -> bool) -> usize {
    let mut bad = 0;
    for cell in part.cells() {
        for &a in &cell[1..] {
            for x in 0..n_nodes {
                if !same(cell[0], a, x) {
                    bad += 1;
                }
            }
        }
    }
    bad
}

/// Verifies the strong continuous inclusion property: CIP, joint lower
/// measurability of `con F_z` (as cell-wise constancy) and the condition of
/// the witness mode.
pub fn scip_verify(
    psi: &Corr,
    w: &CipWitness,
    part: &InfoPartition,
    eps: f64,
    opts: CipOptions,
) -> Result<ScipReport> {
    if w.mode == Mode::Atomic {
        return domain("strong CIP needs a shared, countable or indexed witness");
    }
    let cip = cip_verify(psi, w, eps, opts)?;
    if part.n_atoms() != psi.n_atoms() {
        return domain("partition and correspondence disagree on the atom count");
    }
    let n = psi.n_nodes();
    let grid = psi.grid();
    let mut checks = vec![Check::count("cip", cip.failures.len())];

    let joint = w
        .families
        .iter()
        .map(|f| cellwise_violations(part, n, |a, b, x| hull_equal(f, a, b, x)))
        .sum();
    checks.push(Check::count("joint-lower-measurability", joint).with_detail(super::LOWER_MEASURABLE_LABEL));

    match w.mode {
        Mode::Shared => {
            let distinct = w.local_of.iter().filter(|&&k| k != w.local_of[0]).count();
            checks.push(Check::count("shared-local", distinct));
        }
        Mode::Countable => {
            let bad = (0..n)
                .map(|z| cellwise_violations(part, n, |a, b, x| w.in_ball(psi, a, z, x) == w.in_ball(psi, b, z, x)))
                .sum();
            checks.push(Check::count("neighbourhood-graph-measurability", bad));
        }
        Mode::Indexed => {
            let dom = psi.domain();
            let bad_u = cellwise_violations(part, n, |a, b, z| dom.contains(a, z) == dom.contains(b, z));
            checks.push(Check::count("domain-measurability", bad_u));
            let bad_i = cellwise_violations(part, n, |a, b, x| w.index_set(psi, a, x) == w.index_set(psi, b, x));
            checks.push(Check::count("index-set-measurability", bad_i));

            let mut worst: f64 = 0.0;
            let mut mismatched = 0;
            for t in 0..psi.n_atoms() {
                for (z, zp) in grid.adjacent_pairs() {
                    for x in 0..n {
                        let (a, b) = (w.local(z).value(t, x), w.local(zp).value(t, x));
                        match (a.is_empty(), b.is_empty()) {
                            (true, true) => {}
                            (false, false) => worst = worst.max(hull_hausdorff(a, b)?),
                            _ => mismatched += 1,
                        }
                    }
                }
            }
            let residual = if mismatched > 0 { f64::INFINITY } else { worst };
            checks.push(
                Check { name: "local-continuity".into(), residual, tolerance: eps, passed: residual < eps, detail: String::new() }
                    .with_detail("adjacent-node Hausdorff distance of local hulls"),
            );

            let Some((lo, hi)) = &w.bounds else {
                return domain("indexed witness needs an explicit bounding box");
            };
            if lo.len() != psi.dim() || hi.len() != psi.dim() {
                return domain("bounding box dimension does not match the values");
            }
            let mut excess: f64 = 0.0;
            for f in &w.families {
                for v in f.values() {
                    for p in v.iter() {
                        for k in 0..p.len() {
                            excess = excess.max(lo[k] - p[k]).max(p[k] - hi[k]);
                        }
                    }
                }
            }
            checks.push(Check::within("values-in-bounds", excess.max(0.0), 1e-9));
        }
        Mode::Atomic => unreachable!("rejected above"),
    }
    let ok = cip.ok && checks.iter().all(|c| c.passed);
    Ok(ScipReport { ok, cip, checks })
}

fn hull_equal(f: &Corr, a: usize, b: usize, x: usize) -> bool {
    let (va, vb) = (f.value(a, x), f.value(b, x));
    match (va.is_empty(), vb.is_empty()) {
        (true, true) => true,
        (false, false) => hull_hausdorff(va, vb).map(|h| h <= SET_EQ_TOL).unwrap_or(false),
        _ => false,
    }
}
