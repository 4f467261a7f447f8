use nalgebra::{DMatrix, DVector};

use super::{dist, norm, PointSet};
use crate::error::{domain, Result};

/// Relative tolerance on the Wolfe optimality gap.
const WOLFE_Z1: f64 = 1e-12;
/// Barycentric weights at or below this are dropped from the corral.
const WOLFE_Z2: f64 = 1e-10;
const WOLFE_MAX_ITER: usize = 500;
/// Projection residuals below `RESIDUAL_FLOOR * scale` are roundoff and
/// reported as exact membership.
const RESIDUAL_FLOOR: f64 = 1e-14;

/// A V-polytope: the convex hull of a nonempty finite vertex list.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSet {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl ConvexSet {
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        let ps = PointSet::new(dim, vertices)?;
        Self::from_points(&ps)
    }

    pub fn from_points(ps: &PointSet) -> Result<Self> {
        if ps.is_empty() {
            return domain("convex set needs at least one vertex");
        }
        Ok(ConvexSet { dim: ps.dim(), vertices: ps.points().to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let n = self.vertices.len() as f64;
        c.iter_mut().for_each(|v| *v /= n);
        c
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(dist(a, b));
            }
        }
        d
    }

    /// Nearest point of the hull to `x`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        project_onto_hull(&self.vertices, x)
    }

    /// Euclidean distance from `x` to the hull.
    pub fn distance(&self, x: &[f64]) -> f64 {
        distance_to_hull(&self.vertices, x)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Vertices that are extreme points of the hull, in input order.
    pub fn extreme_points(&self) -> ConvexSet {
        ConvexSet { dim: self.dim, vertices: extreme_points(&self.vertices) }
    }

    /// Dimension of the affine hull of the vertices.
    pub fn affine_rank(&self) -> usize {
        affine_rank(&self.vertices)
    }

    pub fn to_point_set(&self) -> PointSet {
        PointSet::new(self.dim, self.vertices.clone()).expect("vertices already validated")
    }
}

fn scale_of(vertices: &[Vec<f64>], x: &[f64]) -> f64 {
    let m = vertices.iter().map(|v| norm(v)).fold(norm(x), f64::max);
    m.max(1.0)
}

/// Nearest point of `con(vertices)` to `x`, by Wolfe's minimum-norm-point
/// method applied to the translated points `v - x`.
pub fn project_onto_hull(vertices: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    assert!(!vertices.is_empty(), "projection onto an empty hull");
    let n = x.len();
    if vertices.len() == 1 {
        return vertices[0].clone();
    }
    if n == 1 {
        let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        return vec![x[0].clamp(lo, hi)];
    }
    if let Some(v) = vertices.iter().find(|v| v.as_slice() == x) {
        return v.clone();
    }
    let p: Vec<Vec<f64>> =
        vertices.iter().map(|v| v.iter().zip(x).map(|(a, b)| a - b).collect()).collect();
    let w = min_norm_point(&p);
    w.iter().zip(x).map(|(a, b)| a + b).collect()
}

pub fn distance_to_hull(vertices: &[Vec<f64>], x: &[f64]) -> f64 {
    let proj = project_onto_hull(vertices, x);
    let d = dist(&proj, x);
    if d <= RESIDUAL_FLOOR * scale_of(vertices, x) {
        0.0
    } else {
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(p: &[Vec<f64>], idx: &[usize], lambda: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; p[0].len()];
    for (&i, &l) in idx.iter().zip(lambda) {
        for (wk, pk) in w.iter_mut().zip(&p[i]) {
            *wk += l * pk;
        }
    }
    w
}

/// Minimizer of `||sum a_i p_i||` subject to `sum a_i = 1` over the
/// points indexed by `idx` (weights may be negative).
fn affine_min(p: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let k = idx.len();
    if k == 1 {
        return vec![1.0];
    }
    let n = p[0].len();
    let base = &p[idx[0]];
    let q = DMatrix::from_fn(n, k - 1, |r, c| p[idx[c + 1]][r] - base[r]);
    let rhs = DVector::from_fn(n, |r, _| -base[r]);
    let svd = q.svd(true, true);
    let beta = svd.solve(&rhs, 1e-13).unwrap_or_else(|_| DVector::zeros(k - 1));
    let mut alpha = Vec::with_capacity(k);
    alpha.push(1.0 - beta.iter().sum::<f64>());
    alpha.extend(beta.iter().copied());
    alpha
}

fn min_norm_point(p: &[Vec<f64>]) -> Vec<f64> {
    let max_sq = p.iter().map(|v| dot(v, v)).fold(0.0, f64::max);
    let start = (0..p.len())
        .min_by(|&a, &b| dot(&p[a], &p[a]).total_cmp(&dot(&p[b], &p[b])))
        .expect("nonempty");
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut w = p[start].clone();
    for _ in 0..WOLFE_MAX_ITER {
        let (j, wpj) = (0..p.len())
            .map(|i| (i, dot(&w, &p[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let ww = dot(&w, &w);
        if ww - wpj <= WOLFE_Z1 * max_sq || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lambda.push(0.0);
        loop {
            let alpha = affine_min(p, &corral);
            if alpha.iter().all(|&a| a > WOLFE_Z2) {
                lambda = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= WOLFE_Z2 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            let mut keep_c = Vec::with_capacity(corral.len());
            let mut keep_l = Vec::with_capacity(corral.len());
            for (&c, &l) in corral.iter().zip(&lambda) {
                if l > WOLFE_Z2 {
                    keep_c.push(c);
                    keep_l.push(l);
                }
            }
            if keep_c.is_empty() {
                // numerical breakdown: restart from the best single point
                keep_c.push(j);
                keep_l.push(1.0);
            }
            let s: f64 = keep_l.iter().sum();
            keep_l.iter_mut().for_each(|l| *l /= s);
            corral = keep_c;
            lambda = keep_l;
            if corral.len() == 1 {
                break;
            }
        }
        w = combine(p, &corral, &lambda);
    }
    w
}

/// `dist(x, con(c.vertices)) <= tol`.
pub fn convex_membership(x: &[f64], c: &ConvexSet, tol: f64) -> Result<bool> {
    Ok(membership_residual(x, c)? <= tol)
}

/// Euclidean residual of the best convex combination of `c.vertices`
/// reproducing `x`.
pub fn membership_residual(x: &[f64], c: &ConvexSet) -> Result<f64> {
    if x.len() != c.dim {
        return domain(format!("point of dim {} against a set of dim {}", x.len(), c.dim));
    }
    Ok(c.distance(x))
}

/// Largest `r >= 0` with `B(x, r) ⊆ c`; zero when `c` is lower-dimensional
/// or `x` lies outside `c`.
pub fn interior_point_margin(x: &[f64], c: &ConvexSet) -> f64 {
    if x.len() != c.dim {
        return 0.0;
    }
    let n = c.dim;
    let verts = extreme_points(&c.vertices);
    if verts.len() <= n || affine_rank(&verts) < n {
        return 0.0;
    }
    let scale = scale_of(&verts, x);
    if distance_to_hull(&verts, x) > 1e-12 * scale {
        return 0.0;
    }
    let mut margin = f64::INFINITY;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        if let Some((a, b)) = supporting_plane(&verts, &subset, scale) {
            margin = margin.min(b - dot(&a, x));
        }
        if !next_combination(&mut subset, verts.len()) {
            break;
        }
    }
    if !margin.is_finite() || margin <= 1e-12 * scale {
        0.0
    } else {
        margin
    }
}

/// Outward unit normal `a` and offset `b` (`a·v <= b` for all vertices) of
/// the hyperplane through the vertices in `subset`, if it supports the hull.
fn supporting_plane(verts: &[Vec<f64>], subset: &[usize], scale: f64) -> Option<(Vec<f64>, f64)> {
    let n = verts[0].len();
    let base = &verts[subset[0]];
    let dirs: Vec<Vec<f64>> = subset[1..]
        .iter()
        .map(|&i| verts[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut a = generalized_cross(&dirs, n);
    let len = norm(&a);
    if len <= 1e-12 * scale.powi(n as i32 - 1).max(1.0) {
        return None;
    }
    a.iter_mut().for_each(|v| *v /= len);
    let b = dot(&a, base);
    let tol = 1e-10 * scale;
    let (mut above, mut below) = (false, false);
    for v in verts {
        let s = dot(&a, v) - b;
        above |= s > tol;
        below |= s < -tol;
    }
    match (above, below) {
        (true, true) => None,
        (true, false) => Some((a.iter().map(|v| -v).collect(), -b)),
        _ => Some((a, b)),
    }
}

/// Vector orthogonal to the `n-1` given vectors in `R^n`, with components
/// given by signed cofactors.
fn generalized_cross(dirs: &[Vec<f64>], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|k| {
            let m = DMatrix::from_fn(n - 1, n - 1, |r, c| {
                let col = if c < k { c } else { c + 1 };
                dirs[r][col]
            });
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * m.determinant()
        })
        .collect()
}

fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn affine_rank(verts: &[Vec<f64>]) -> usize {
    if verts.len() <= 1 {
        return 0;
    }
    let n = verts[0].len();
    let base = &verts[0];
    let m = DMatrix::from_fn(n, verts.len() - 1, |r, c| verts[c + 1][r] - base[r]);
    let scale = m.amax().max(1e-300);
    m.svd(false, false).rank(1e-10 * scale)
}

fn extreme_points(verts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if verts.len() <= 2 {
        return verts.to_vec();
    }
    let n = verts[0].len();
    if n == 1 {
        let lo = verts.iter().min_by(|a, b| a[0].total_cmp(&b[0])).expect("nonempty");
        let hi = verts.iter().max_by(|a, b| a[0].total_cmp(&b[0])).expect("nonempty");
        let mut out: Vec<Vec<f64>> = Vec::new();
        for v in verts {
            if (v == lo || v == hi) && !out.contains(v) {
                out.push(v.clone());
            }
        }
        return out;
    }
    let scale = scale_of(verts, &verts[0]);
    let tol = 1e-10 * scale;
    let c = {
        let mut c = vec![0.0; n];
        for v in verts {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        c.iter_mut().for_each(|x| *x /= verts.len() as f64);
        c
    };
    // far points first: they are likely extreme and make the hull grow fast
    let mut order: Vec<usize> = (0..verts.len()).collect();
    order.sort_by(|&a, &b| dist(&verts[b], &c).total_cmp(&dist(&verts[a], &c)).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let hull: Vec<Vec<f64>> = kept.iter().map(|&k| verts[k].clone()).collect();
        if hull.is_empty() || distance_to_hull(&hull, &verts[i]) > tol {
            kept.push(i);
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for pos in 0..kept.len() {
            let others: Vec<Vec<f64>> = kept
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != pos)
                .map(|(_, &k)| verts[k].clone())
                .collect();
            if !others.is_empty() && distance_to_hull(&others, &verts[kept[pos]]) <= tol {
                kept.remove(pos);
                changed = true;
                break;
            }
        }
    }
    kept.sort_unstable();
    kept.into_iter().map(|k| verts[k].clone()).collect()
}

/// `max_{a in a} dist(a, con b)`: the one-sided excess of `con a` over
/// `con b` (exact, since distance to a convex set is convex). Zero for empty
/// `a`, `+inf` for nonempty `a` against empty `b`.
pub fn hull_excess(a: &PointSet, b: &PointSet) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if b.is_empty() {
        return f64::INFINITY;
    }
    a.iter().map(|p| distance_to_hull(b.points(), p)).fold(0.0, f64::max)
}

/// Hausdorff distance between `con a` and `con b`.
pub fn hull_hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("Hausdorff distance is undefined on the empty set");
    }
    if a.dim() != b.dim() {
        return domain(format!("dimension mismatch {} vs {}", a.dim(), b.dim()));
    }
    Ok(hull_excess(a, b).max(hull_excess(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexSet {
        ConvexSet::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]])
            .unwrap()
    }

    #[test]
    fn membership_examples() {
        let c = square();
        assert!(convex_membership(&[0.5, 0.5], &c, 0.0).unwrap());
        assert!(!convex_membership(&[2.0, 0.0], &c, 1e-9).unwrap());
        for v in c.vertices() {
            assert!(convex_membership(v, &c, 0.0).unwrap());
        }
        assert!(convex_membership(&[0.0], &c, 1.0).is_err());
    }

    #[test]
    fn residual_is_distance() {
        let c = square();
        let r = membership_residual(&[2.0, 0.5], &c).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let r = membership_residual(&[2.0, 2.0], &c).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn margin_examples() {
        let seg = ConvexSet::new(1, vec![vec![0.0], vec![1.0]]).unwrap();
        assert!((interior_point_margin(&[0.5], &seg) - 0.5).abs() < 1e-12);
        let pt = ConvexSet::new(1, vec![vec![0.0]]).unwrap();
        assert_eq!(interior_point_margin(&[0.0], &pt), 0.0);
        assert_eq!(interior_point_margin(&[0.0, 0.0], &square()), 0.0);
        assert!((interior_point_margin(&[0.5, 0.5], &square()) - 0.5).abs() < 1e-12);
        assert!((interior_point_margin(&[0.2, 0.5], &square()) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn flat_sets_have_no_interior() {
        let seg = ConvexSet::new(2, vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(interior_point_margin(&[0.5, 0.5], &seg), 0.0);
        let tri = ConvexSet::new(3, vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
            .unwrap();
        assert_eq!(interior_point_margin(&[0.2, 0.2, 0.0], &tri), 0.0);
    }

    #[test]
    fn simplex_margin_3d() {
        let s = ConvexSet::new(
            3,
            vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        )
        .unwrap();
        // inradius of the corner simplex is 1 / (3 + sqrt 3)
        let r = 1.0 / (3.0 + 3f64.sqrt());
        assert!((interior_point_margin(&[r, r, r], &s) - r).abs() < 1e-12);
    }

    #[test]
    fn extreme_points_drop_interior() {
        let mut v = square().vertices().to_vec();
        v.push(vec![0.5, 0.5]);
        v.push(vec![0.5, 0.0]);
        let c = ConvexSet::new(2, v).unwrap().extreme_points();
        assert_eq!(c.vertices().len(), 4);
    }

    #[test]
    fn hull_hausdorff_uses_hulls() {
        let a = PointSet::new(1, vec![vec![0.0], vec![2.0]]).unwrap();
        let b = PointSet::new(1, vec![vec![1.0]]).unwrap();
        assert_eq!(hull_excess(&b, &a), 0.0);
        assert_eq!(hull_hausdorff(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn projection_onto_triangle_face() {
        let tri = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let p = project_onto_hull(&tri, &[0.25, 0.25, 3.0]);
        assert!(dist(&p, &[0.25, 0.25, 0.0]) < 1e-12);
        let p = project_onto_hull(&tri, &[1.0, 1.0, 0.0]);
        assert!(dist(&p, &[0.5, 0.5, 0.0]) < 1e-12);
    }
}
