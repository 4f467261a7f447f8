use serde::Serialize;

use super::Corr;
use crate::measure::InfoPartition;
use crate::setops::{hull_excess, SET_EQ_TOL};

/// Label attached to cell-wise constancy results: constancy on cells is a
/// sufficient condition for lower measurability, not a characterization.
pub const LOWER_MEASURABLE_LABEL: &str = "sufficient-condition check";

/// A discrete semicontinuity failure: `point` of the value at `z` escapes the
/// `eps`-neighbourhood of the value at `z_prime` (`gap` is its distance).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub z: usize,
    pub z_prime: usize,
    pub point: Vec<f64>,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl SemiReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        SemiReport { ok: violations.is_empty(), violations }
    }

    /// The violation with the largest gap (lowest indices on ties).
    pub fn worst(&self) -> Option<&Violation> {
        self.violations.iter().fold(None, |best: Option<&Violation>, v| match best {
            Some(b) if b.gap >= v.gap => Some(b),
            _ => Some(v),
        })
    }
}

/// Discrete lower semicontinuity of `Ψ(t, ·)`: for every adjacent pair of
/// nodes with nonempty values, each point of `Ψ(t, z)` lies within `eps`
/// (strictly) of `Ψ(t, z')`.
pub fn lsc_check(psi: &Corr, t: usize, eps: f64) -> SemiReport {
    let grid = psi.grid();
    let mut out = Vec::new();
    for z in 0..grid.len() {
        let a = psi.value(t, z);
        if a.is_empty() {
            continue;
        }
        for &zp in grid.neighbors(z) {
            let b = psi.value(t, zp);
            if b.is_empty() || b == a {
                continue;
            }
            for p in a.iter() {
                let gap = b.dist_to(p);
                if gap >= eps {
                    out.push(Violation { z, z_prime: zp, point: p.clone(), gap });
                }
            }
        }
    }
    SemiReport::from_violations(out)
}

/// Discrete upper semicontinuity of `Ψ(t, ·)`.
///
/// A point `y` of a neighbour's value that escapes `N_eps(Ψ(t, z))` is a
/// violation only when it persists: `y` must lie within `eps` of the values
/// at a strict majority of the nonempty neighbours of `z`. A single
/// neighbour carrying an isolated spike is what happens near a point where
/// the value jumps up, which upper semicontinuity allows.
pub fn usc_check(psi: &Corr, t: usize, eps: f64) -> SemiReport {
    let grid = psi.grid();
    let mut out = Vec::new();
    for z in 0..grid.len() {
        let a = psi.value(t, z);
        if a.is_empty() {
            continue;
        }
        let ring: Vec<usize> =
            grid.neighbors(z).iter().copied().filter(|&zp| !psi.value(t, zp).is_empty()).collect();
        for &zp in &ring {
            if psi.value(t, zp) == a {
                continue;
            }
            for y in psi.value(t, zp).iter() {
                let gap = a.dist_to(y);
                if gap < eps {
                    continue;
                }
                let support = ring.iter().filter(|&&w| psi.value(t, w).dist_to(y) < eps).count();
                if 2 * support > ring.len() {
                    out.push(Violation { z: zp, z_prime: z, point: y.clone(), gap });
                }
            }
        }
    }
    SemiReport::from_violations(out)
}

/// Lower semicontinuity of `con Ψ(t, ·)` on the adjacent pairs accepted by
/// `keep`: the value hull at `z` must lie within `eps` (strictly) of the
/// hull at `z'`.
pub fn hull_lsc_violations(
    psi: &Corr,
    t: usize,
    eps: f64,
    keep: impl Fn(usize, usize) -> bool,
) -> Vec<Violation> {
    let grid = psi.grid();
    let mut out = Vec::new();
    for z in 0..grid.len() {
        let a = psi.value(t, z);
        if a.is_empty() {
            continue;
        }
        for &zp in grid.neighbors(z) {
            let b = psi.value(t, zp);
            if b.is_empty() || b == a || !keep(z, zp) {
                continue;
            }
            let gap = hull_excess(a, b);
            if gap >= eps {
                let point = a
                    .iter()
                    .max_by(|p, q| {
                        crate::setops::distance_to_hull(b.points(), p)
                            .total_cmp(&crate::setops::distance_to_hull(b.points(), q))
                    })
                    .cloned()
                    .unwrap_or_default();
                out.push(Violation { z, z_prime: zp, point, gap });
            }
        }
    }
    out
}

/// Lower semicontinuity check of `con Ψ(t, ·)` on the whole grid.
pub fn hull_lsc_check(psi: &Corr, t: usize, eps: f64) -> SemiReport {
    SemiReport::from_violations(hull_lsc_violations(psi, t, eps, |_, _| true))
}

/// Smallest `eps` such that `Ψ(t, ·)` fails the point-level check at no
/// threshold above it: the largest adjacent escape distance.
pub fn lsc_modulus(psi: &Corr, t: usize) -> f64 {
    let grid = psi.grid();
    let mut m: f64 = 0.0;
    for (a, b) in grid.adjacent_pairs() {
        let (va, vb) = (psi.value(t, a), psi.value(t, b));
        if va.is_empty() || vb.is_empty() {
            continue;
        }
        for p in va.iter() {
            m = m.max(vb.dist_to(p));
        }
        for p in vb.iter() {
            m = m.max(va.dist_to(p));
        }
    }
    m
}

/// Hull version of [`lsc_modulus`].
pub fn hull_lsc_modulus(psi: &Corr, t: usize) -> f64 {
    let grid = psi.grid();
    let mut m: f64 = 0.0;
    for (a, b) in grid.adjacent_pairs() {
        let (va, vb) = (psi.value(t, a), psi.value(t, b));
        if va.is_empty() || vb.is_empty() {
            continue;
        }
        m = m.max(hull_excess(va, vb)).max(hull_excess(vb, va));
    }
    m
}

/// Cell-wise constancy of `t -> Ψ(t, z)` (set equality within 1e-9); see
/// [`LOWER_MEASURABLE_LABEL`].
pub fn lower_measurable_check(psi: &Corr, part: &InfoPartition, z: usize) -> bool {
    part.is_cellwise(|a, b| psi.value(a, z).approx_eq(psi.value(b, z), SET_EQ_TOL))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::corr::GridSpace;
    use crate::measure::AtomSpace;
    use crate::setops::PointSet;

    fn jump_at_origin() -> Corr {
        let space = Arc::new(AtomSpace::uniform(4).unwrap());
        let grid = Arc::new(GridSpace::uniform(-1.0, 1.0, 21).unwrap());
        let zero = grid.nearest(&[0.0]);
        let unit = PointSet::segment(&[0.0], &[1.0], 11).unwrap();
        Corr::from_fn(space, grid, 1, move |_, z| {
            if z == zero {
                unit.clone()
            } else {
                PointSet::singleton(vec![0.0])
            }
        })
        .unwrap()
    }

    #[test]
    fn example_is_not_lsc_but_usc() {
        let psi = jump_at_origin();
        for t in 0..4 {
            let r = lsc_check(&psi, t, 0.1);
            assert!(!r.ok);
            let w = r.worst().unwrap();
            assert_eq!(w.z, 10);
            assert_eq!(w.point, vec![1.0]);
            assert!(usc_check(&psi, t, 0.1).ok);
        }
    }

    #[test]
    fn spike_down_is_not_usc() {
        let space = Arc::new(AtomSpace::uniform(1).unwrap());
        let grid = Arc::new(GridSpace::uniform(-1.0, 1.0, 21).unwrap());
        let psi = Corr::from_fn(space, grid, 1, |_, z| PointSet::singleton(vec![(z == 10) as u8 as f64]))
            .unwrap();
        assert!(!usc_check(&psi, 0, 0.5).ok);
    }

    #[test]
    fn growing_interval_is_lsc() {
        let space = Arc::new(AtomSpace::uniform(1).unwrap());
        let grid = Arc::new(GridSpace::uniform(0.0, 1.0, 11).unwrap());
        let g = grid.clone();
        let psi = Corr::from_fn(space, grid, 1, move |_, z| {
            let x = g.point(z)[0];
            if x == 0.0 {
                PointSet::singleton(vec![0.0])
            } else {
                PointSet::segment(&[0.0], &[x], 11).unwrap()
            }
        })
        .unwrap();
        assert!(lsc_check(&psi, 0, 2.0 * psi.grid().mesh()).ok);
    }

    #[test]
    fn constant_is_semicontinuous() {
        let space = Arc::new(AtomSpace::uniform(2).unwrap());
        let grid = Arc::new(GridSpace::uniform(0.0, 1.0, 5).unwrap());
        let psi = Corr::constant(space, grid, PointSet::segment(&[0.0, 0.0], &[1.0, 1.0], 3).unwrap());
        assert!(lsc_check(&psi, 1, 1e-9).ok);
        assert!(usc_check(&psi, 1, 1e-9).ok);
        assert_eq!(lsc_modulus(&psi, 0), 0.0);
    }

    #[test]
    fn measurability_examples() {
        let space = Arc::new(AtomSpace::uniform(2).unwrap());
        let grid = Arc::new(GridSpace::uniform(0.0, 1.0, 3).unwrap());
        let varying =
            Corr::from_fn(space.clone(), grid.clone(), 1, |t, _| PointSet::singleton(vec![t as f64])).unwrap();
        assert!(lower_measurable_check(&varying, &InfoPartition::singletons(2), 0));
        assert!(!lower_measurable_check(&varying, &InfoPartition::trivial(2), 0));
        let same = Corr::constant(space, grid, PointSet::singleton(vec![0.5]));
        assert!(lower_measurable_check(&same, &InfoPartition::trivial(2), 1));
    }
}
