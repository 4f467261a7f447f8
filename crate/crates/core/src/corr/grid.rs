use crate::error::{domain, Result};
use crate::setops::dist;

/// Relative shrink applied to the adjacency radius so that nodes at exactly
/// `adjacency_radius` (up to roundoff) are not adjacent.
const ADJ_SHRINK: f64 = 1e-9;

/// A finite ε-net of a metric space, embedded in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpace {
    points: Vec<Vec<f64>>,
    /// Row-major distance matrix for user-supplied metrics; Euclidean
    /// distances are computed on demand.
    metric: Option<Vec<f64>>,
    diameter: f64,
    mesh: f64,
    adjacency_radius: f64,
    neighbors: Vec<Vec<usize>>,
    axes: Option<Vec<Vec<f64>>>,
}

impl GridSpace {
    /// Euclidean grid on arbitrary points. The mesh defaults to the largest
    /// nearest-neighbour distance.
    pub fn euclidean(points: Vec<Vec<f64>>, mesh: Option<f64>) -> Result<Self> {
        check_points(&points)?;
        Self::assemble(points, None, mesh)
    }

    /// Grid with a user-supplied distance matrix (row-major, `n x n`).
    pub fn with_metric(points: Vec<Vec<f64>>, metric: Vec<f64>, mesh: Option<f64>) -> Result<Self> {
        check_points(&points)?;
        let n = points.len();
        if metric.len() != n * n {
            return domain(format!("distance matrix has {} entries, expected {}", metric.len(), n * n));
        }
        for i in 0..n {
            if metric[i * n + i] != 0.0 {
                return domain(format!("distance matrix diagonal at {i} is nonzero"));
            }
            for j in 0..n {
                let v = metric[i * n + j];
                if !v.is_finite() || v < 0.0 || (i != j && v == 0.0) {
                    return domain(format!("invalid distance {v} at ({i}, {j})"));
                }
                if (v - metric[j * n + i]).abs() > 1e-9 {
                    return domain(format!("distance matrix not symmetric at ({i}, {j})"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if metric[i * n + k] > metric[i * n + j] + metric[j * n + k] + 1e-9 {
                        return domain(format!("triangle inequality fails at ({i}, {j}, {k})"));
                    }
                }
            }
        }
        Self::assemble(points, Some(metric), mesh)
    }

    /// Tensor-product grid; the last axis varies fastest.
    pub fn tensor(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
            return domain("tensor grid needs nonempty axes");
        }
        for a in &axes {
            if a.windows(2).any(|w| !(w[1] > w[0])) {
                return domain("tensor grid axes must be strictly increasing");
            }
        }
        let mut points: Vec<Vec<f64>> = vec![Vec::new()];
        for a in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    a.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        let spacing = axes
            .iter()
            .flat_map(|a| a.windows(2).map(|w| w[1] - w[0]))
            .fold(0.0, f64::max);
        let mesh = if spacing > 0.0 { Some(spacing) } else { Some(1.0) };
        let mut g = Self::euclidean(points, mesh)?;
        g.axes = Some(axes);
        Ok(g)
    }

    /// `n` equally spaced nodes on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::tensor(vec![linspace(lo, hi, n)?])
    }

    /// Tensor grid on the box `[lo, hi]` with `n` nodes per axis.
    pub fn box_grid(lo: &[f64], hi: &[f64], n: usize) -> Result<Self> {
        if lo.len() != hi.len() {
            return domain("box corners differ in dimension");
        }
        let axes = lo.iter().zip(hi).map(|(&a, &b)| linspace(a, b, n)).collect::<Result<_>>()?;
        Self::tensor(axes)
    }

    /// Product of tensor grids; the first factor varies slowest.
    pub fn product(factors: &[&GridSpace]) -> Result<Self> {
        let mut axes = Vec::new();
        for f in factors {
            match &f.axes {
                Some(a) => axes.extend(a.iter().cloned()),
                None => return domain("product grids are only formed from tensor grids"),
            }
        }
        Self::tensor(axes)
    }

    /// Same nodes and metric with a different adjacency radius.
    pub fn with_adjacency_radius(mut self, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return domain(format!("adjacency radius {r} must be positive"));
        }
        self.adjacency_radius = r;
        self.neighbors = neighbors_of(&self, r);
        Ok(self)
    }

    fn assemble(points: Vec<Vec<f64>>, metric: Option<Vec<f64>>, mesh: Option<f64>) -> Result<Self> {
        let mut g = GridSpace {
            points,
            metric,
            diameter: 0.0,
            mesh: 1.0,
            adjacency_radius: 2.0,
            neighbors: Vec::new(),
            axes: None,
        };
        let n = g.len();
        let mut nearest = vec![f64::INFINITY; n];
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let v = g.d(i, j);
                diameter = diameter.max(v);
                nearest[i] = nearest[i].min(v);
                nearest[j] = nearest[j].min(v);
            }
        }
        g.diameter = diameter;
        g.mesh = match mesh {
            Some(h) if h.is_finite() && h > 0.0 => h,
            Some(h) => return domain(format!("mesh {h} must be positive")),
            None => {
                let nn = nearest.into_iter().filter(|v| v.is_finite()).fold(0.0, f64::max);
                if nn > 0.0 {
                    nn
                } else {
                    1.0
                }
            }
        };
        g.adjacency_radius = 2.0 * g.mesh;
        g.neighbors = neighbors_of(&g, g.adjacency_radius);
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, z: usize) -> &[f64] {
        &self.points[z]
    }

    pub fn d(&self, a: usize, b: usize) -> f64 {
        match &self.metric {
            Some(m) => m[a * self.points.len() + b],
            None => dist(&self.points[a], &self.points[b]),
        }
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn adjacency_radius(&self) -> f64 {
        self.adjacency_radius
    }

    /// Nodes adjacent to `z` (excluding `z`), in index order.
    pub fn neighbors(&self, z: usize) -> &[usize] {
        &self.neighbors[z]
    }

    /// Axes of a tensor grid.
    pub fn axes(&self) -> Option<&[Vec<f64>]> {
        self.axes.as_deref()
    }

    /// Unordered adjacent pairs `(a, b)` with `a < b`.
    pub fn adjacent_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Nodes strictly within `r` of node `z`.
    pub fn ball(&self, z: usize, r: f64) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.d(x, z) < r).collect()
    }

    /// Nearest node to an arbitrary point (Euclidean; lowest index on ties).
    pub fn nearest(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = dist(p, x);
            if d < bd {
                best = i;
                bd = d;
            }
        }
        best
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.dim();
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        for p in &self.points {
            for k in 0..m {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &b in &self.neighbors[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Extends node values to an arbitrary point: multilinear interpolation
    /// on tensor grids (the point is clamped into the box), inverse-distance
    /// weighting over the adjacency radius otherwise.
    pub fn interpolate(&self, values: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.len(), "one value per node");
        match &self.axes {
            Some(axes) => multilinear(axes, values, x),
            None => self.shepard(values, x),
        }
    }

    fn shepard(&self, values: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        let m = values[0].len();
        let mut acc = vec![0.0; m];
        let mut wsum = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            let d = dist(p, x);
            if d == 0.0 {
                return values[i].clone();
            }
            if d < self.adjacency_radius {
                let w = 1.0 / (d * d);
                wsum += w;
                for (a, v) in acc.iter_mut().zip(&values[i]) {
                    *a += w * v;
                }
            }
        }
        if wsum == 0.0 {
            return values[self.nearest(x)].clone();
        }
        acc.iter_mut().for_each(|a| *a /= wsum);
        acc
    }
}

fn check_points(points: &[Vec<f64>]) -> Result<()> {
    let Some(first) = points.first() else {
        return domain("grid needs at least one node");
    };
    let m = first.len();
    if m == 0 {
        return domain("grid nodes must have positive dimension");
    }
    if points.iter().any(|p| p.len() != m || p.iter().any(|v| !v.is_finite())) {
        return domain("grid nodes must be finite vectors of one length");
    }
    Ok(())
}

fn neighbors_of(g: &GridSpace, r: f64) -> Vec<Vec<usize>> {
    let cut = r * (1.0 - ADJ_SHRINK);
    let n = g.len();
    (0..n).map(|i| (0..n).filter(|&j| j != i && g.d(i, j) < cut).collect()).collect()
}

/// `n` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 1 {
        return Ok(vec![lo]);
    }
    if n == 0 || !(hi > lo) {
        return domain(format!("linspace needs n >= 1 and lo < hi, got n={n}, [{lo}, {hi}]"));
    }
    Ok((0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect())
}

fn multilinear(axes: &[Vec<f64>], values: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let m = values[0].len();
    // per axis: (lower index, upper index, weight of upper)
    let mut brackets = Vec::with_capacity(axes.len());
    for (a, &xi) in axes.iter().zip(x) {
        if a.len() == 1 {
            brackets.push((0, 0, 0.0));
            continue;
        }
        let xi = xi.clamp(a[0], a[a.len() - 1]);
        let hi = a.partition_point(|&v| v < xi).clamp(1, a.len() - 1);
        let lo = hi - 1;
        let w = (xi - a[lo]) / (a[hi] - a[lo]);
        brackets.push((lo, hi, w));
    }
    let strides: Vec<usize> = {
        let mut s = vec![1; axes.len()];
        for k in (0..axes.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * axes[k + 1].len();
        }
        s
    };
    let mut out = vec![0.0; m];
    for corner in 0..(1usize << axes.len()) {
        let mut weight = 1.0;
        let mut idx = 0;
        for (k, &(lo, hi, w)) in brackets.iter().enumerate() {
            if corner >> k & 1 == 1 {
                weight *= w;
                idx += hi * strides[k];
            } else {
                weight *= 1.0 - w;
                idx += lo * strides[k];
            }
        }
        if weight != 0.0 {
            for (o, v) in out.iter_mut().zip(&values[idx]) {
                *o += weight * v;
            }
        }
    }
    out
}
