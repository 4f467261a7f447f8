use serde::Serialize;

use crate::check::Check;
use crate::corr::{check_structure, hull_lsc_violations, k_operator, CipWitness, Corr, Mode};
use crate::error::Result;
use crate::measure::InfoPartition;
use crate::setops::{distance_to_hull, interior_point_margin, ConvexSet, PointSet, SET_EQ_TOL};

/// Inclusion tolerance for property (A).
pub const PHI_INCLUSION_TOL: f64 = 1e-9;

/// The glued correspondence `Φ` and the executed property checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiResult {
    /// `Φ(t, x)` stored as the extreme points of its hull.
    pub phi: Corr,
    /// `𝕂(Ψ)`, computed for property (E).
    pub k: Corr,
    /// Checks named `A-inclusion`, `B-domain`, `C-lsc`, `D-measurability`,
    /// `E-interiority`, in that order.
    pub checks: Vec<Check>,
    pub report: PhiReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiReport {
    pub max_inclusion_residual: f64,
    pub domain_mismatches: usize,
    /// l.s.c. violations of `Φ(t, ·)` per atom at the witness eps.
    pub lsc_violations: Vec<usize>,
    /// Whether property (D) was checked on cells or holds trivially.
    pub measurability: String,
    /// Number of `(t, x)` with `𝕂(Ψ)(t, x) ≠ ∅`.
    pub k_nonempty: usize,
    pub k_empty: bool,
}

impl PhiResult {
    pub fn all_passed(&self) -> bool {
        crate::check::all_passed(&self.checks)
    }
}

/// True when the witness data (locals, radii) and `Ψ` do not vary inside
/// any cell of `part`.
pub(crate) fn inputs_cellwise(psi: &Corr, w: &CipWitness, part: &InfoPartition) -> bool {
    let n = psi.n_nodes();
    let same_psi = part.is_cellwise(|a, b| (0..n).all(|x| psi.value(a, x).approx_eq(psi.value(b, x), SET_EQ_TOL)));
    let same_radii = part.is_cellwise(|a, b| (0..n).all(|z| w.radius(a, z) == w.radius(b, z)));
    let same_locals = w.families.iter().all(|f| {
        part.is_cellwise(|a, b| (0..n).all(|x| f.value(a, x).approx_eq(f.value(b, x), SET_EQ_TOL)))
    });
    same_psi && same_radii && same_locals
}

/// Glues the local witnesses into `Φ(t, x) = con ⋃ {con F_z(t, x) : z ∈ J(t, x)}`
/// (for a shared witness this is `con F(t, x)`), empty where `J(t, x) = ∅`,
/// and runs the property checks (A)–(E).
pub fn construct_phi(psi: &Corr, w: &CipWitness, part: &InfoPartition) -> Result<PhiResult> {
    check_structure(psi, w)?;
    if part.n_atoms() != psi.n_atoms() {
        return crate::error::domain("partition and correspondence disagree on the atom count");
    }
    let n = psi.n_nodes();
    let dim = psi.dim();
    let mut values = Vec::with_capacity(psi.n_atoms() * n);
    for t in 0..psi.n_atoms() {
        for x in 0..n {
            let j = w.index_set(psi, t, x);
            let pooled: Vec<Vec<f64>> = if j.is_empty() {
                Vec::new()
            } else if w.mode == Mode::Shared {
                w.families[0].value(t, x).points().to_vec()
            } else {
                let mut fams: Vec<usize> = j.iter().map(|&z| w.local_of[z]).collect();
                fams.sort_unstable();
                fams.dedup();
                fams.iter().flat_map(|&f| w.families[f].value(t, x).points().iter().cloned()).collect()
            };
            let ps = PointSet::new(dim, pooled)?;
            let value = match ConvexSet::from_points(&ps) {
                Ok(c) => c.extreme_points().to_point_set(),
                Err(_) => ps,
            };
            values.push(value);
        }
    }
    let phi = Corr::new(psi.space().clone(), psi.grid().clone(), dim, values)?;
    let k = k_operator(psi, w)?;

    let dom_psi = psi.domain();
    let dom_phi = phi.domain();

    let mut max_res: f64 = 0.0;
    for (t, x) in dom_psi.iter() {
        let pv = psi.value(t, x);
        for v in phi.value(t, x).iter() {
            max_res = max_res.max(distance_to_hull(pv.points(), v));
        }
    }
    let mismatches = dom_psi.mask().iter().zip(dom_phi.mask()).filter(|(a, b)| a != b).count();

    // (C) on adjacent pairs whose index sets nest: the grid form of "x has a
    // neighbourhood inside every ball that contains it"
    let lsc: Vec<usize> = (0..psi.n_atoms())
        .map(|t| {
            let j: Vec<Vec<usize>> = (0..n).map(|x| w.index_set(psi, t, x)).collect();
            let nested = |x: usize, xp: usize| j[x].iter().all(|z| j[xp].binary_search(z).is_ok());
            hull_lsc_violations(&phi, t, w.eps, nested).len()
        })
        .collect();

    let (d_check, measurability) = if part.is_finest() || !inputs_cellwise(psi, w, part) {
        let label = "trivially measurable (finest partition)";
        (Check::count("D-measurability", 0).with_detail(label), label.to_string())
    } else {
        let bad = part
            .cells()
            .iter()
            .map(|cell| {
                cell[1..]
                    .iter()
                    .flat_map(|&a| (0..n).map(move |x| (a, x)))
                    .filter(|&(a, x)| !phi.value(cell[0], x).approx_eq(phi.value(a, x), SET_EQ_TOL))
                    .count()
            })
            .sum();
        let label = "cell-wise constancy";
        (Check::count("D-measurability", bad).with_detail(label), label.to_string())
    };

    let k_dom = k.domain();
    let mut e_bad = 0;
    for (t, x) in k_dom.iter() {
        let margin = phi.hull(t, x).map(|c| interior_point_margin(&c.centroid(), &c)).unwrap_or(0.0);
        if margin <= 0.0 {
            e_bad += 1;
        }
    }
    let k_nonempty = k_dom.len();

    let checks = vec![
        Check::within("A-inclusion", max_res, PHI_INCLUSION_TOL),
        Check::count("B-domain", mismatches),
        Check::count("C-lsc", lsc.iter().sum()).with_detail(format!("eps = {:e}", w.eps)),
        d_check,
        Check::count("E-interiority", e_bad).with_detail(if k_nonempty == 0 {
            "K is empty".to_string()
        } else {
            format!("K nonempty at {k_nonempty} nodes")
        }),
    ];
    let report = PhiReport {
        max_inclusion_residual: max_res,
        domain_mismatches: mismatches,
        lsc_violations: lsc,
        measurability,
        k_nonempty,
        k_empty: k_nonempty == 0,
    };
    Ok(PhiResult { phi, k, checks, report })
}
