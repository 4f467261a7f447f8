//! Finite set geometry for correspondence values.
//!
//! A [`PointSet`] is a finite (possibly empty) list of points in `R^n`; it is
//! the representation of every set value in the crate. When a value is read
//! as a convex set it is the V-polytope spanned by its points, see
//! [`ConvexSet`].

mod hull;
mod limits;

pub use hull::{
    convex_membership, distance_to_hull, hull_excess, hull_hausdorff, interior_point_margin,
    membership_residual, project_onto_hull, ConvexSet,
};
pub use limits::{li_limit, ls_limit, SetSequence};

use crate::error::{domain, Result};

/// Points closer than this are treated as duplicates.
pub const DUPLICATE_TOL: f64 = 1e-12;
/// Default Euclidean residual accepted by convex membership tests.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;
/// Default cluster radius for the finite Li/Ls surrogates.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;
/// Tolerance for set equality in measurability checks.
pub const SET_EQ_TOL: f64 = 1e-9;

/// A finite set of points in `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointSet {
    /// Builds a point set, dropping points within [`DUPLICATE_TOL`] of an
    /// earlier one.
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return domain("point set dimension must be positive");
        }
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return domain(format!("point of length {} in a set of dim {dim}", p.len()));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return domain("point set coordinates must be finite");
            }
            if !kept.iter().any(|q| dist(q, &p) <= DUPLICATE_TOL) {
                kept.push(p);
            }
        }
        Ok(PointSet { dim, points: kept })
    }

    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0, "point set dimension must be positive");
        PointSet { dim, points: Vec::new() }
    }

    pub fn singleton(point: Vec<f64>) -> Self {
        assert!(!point.is_empty(), "point set dimension must be positive");
        PointSet { dim: point.len(), points: vec![point] }
    }

    /// Evenly spaced samples of the segment `[a, b]` (`n >= 2`).
    pub fn segment(a: &[f64], b: &[f64], n: usize) -> Result<Self> {
        if a.len() != b.len() || n < 2 {
            return domain("segment needs equal-length endpoints and n >= 2");
        }
        let pts = (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
            })
            .collect();
        PointSet::new(a.len(), pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        if self.dim != other.dim {
            return domain("union of point sets of different dimension");
        }
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        PointSet::new(self.dim, pts)
    }

    /// Arithmetic mean of the points; `None` for the empty set.
    pub fn centroid(&self) -> Option<Vec<f64>> {
        if self.points.is_empty() {
            return None;
        }
        let mut c = vec![0.0; self.dim];
        for p in &self.points {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let n = self.points.len() as f64;
        c.iter_mut().for_each(|v| *v /= n);
        Some(c)
    }

    /// Set equality up to `tol`: both empty, or Hausdorff distance `<= tol`.
    pub fn approx_eq(&self, other: &PointSet, tol: f64) -> bool {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => true,
            (false, false) => {
                self.dim == other.dim
                    && directed(&self.points, other) <= tol
                    && directed(&other.points, self) <= tol
            }
            _ => false,
        }
    }

    /// Distance from `x` to the nearest point; `+inf` for the empty set.
    pub fn dist_to(&self, x: &[f64]) -> f64 {
        self.points.iter().map(|p| dist(p, x)).fold(f64::INFINITY, f64::min)
    }

    /// Axis-aligned bounding box, `None` for the empty set.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let first = self.points.first()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for p in &self.points[1..] {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some((lo, hi))
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn directed(a: &[Vec<f64>], b: &PointSet) -> f64 {
    a.iter().map(|p| b.dist_to(p)).fold(0.0, f64::max)
}

/// Hausdorff distance between two nonempty finite sets:
/// `max(sup_{x in a} dist(x, b), sup_{y in b} dist(y, a))`.
pub fn hausdorff_dist(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("Hausdorff distance is undefined on the empty set");
    }
    if a.dim != b.dim {
        return domain(format!("dimension mismatch {} vs {}", a.dim, b.dim));
    }
    Ok(directed(&a.points, b).max(directed(&b.points, a)))
}

/// The same metric through its threshold form,
/// `inf { eps > 0 : a ⊆ N_eps(b) and b ⊆ N_eps(a) }`.
///
/// On finite sets the infimum is one of the pairwise distances, so the
/// candidates are sorted and the smallest one admitting mutual closed
/// containment is located by bisection.
pub fn hausdorff_dist_inf_eps(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("Hausdorff distance is undefined on the empty set");
    }
    if a.dim != b.dim {
        return domain(format!("dimension mismatch {} vs {}", a.dim, b.dim));
    }
    let pair: Vec<Vec<f64>> =
        a.points.iter().map(|p| b.points.iter().map(|q| dist(p, q)).collect()).collect();
    let mut candidates: Vec<f64> = pair.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let covers = |eps: f64| {
        let a_in_b = pair.iter().all(|row| row.iter().any(|&d| d <= eps));
        let b_in_a = (0..b.len()).all(|j| pair.iter().any(|row| row[j] <= eps));
        a_in_b && b_in_a
    };
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if covers(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// `a ⊆ N_eps(b)`: every point of `a` lies at distance `< eps` from `b`.
/// Vacuously true for empty `a`; false for nonempty `a` against empty `b`.
pub fn eps_neighborhood_contains(a: &PointSet, b: &PointSet, eps: f64) -> bool {
    a.points.iter().all(|p| b.dist_to(p) < eps)
}
