use crate::error::{Error, Result};
use crate::setops::{dist, ConvexSet};

/// Default truncation index of the selection and interior series.
pub const DEFAULT_K_MAX: usize = 40;

/// Truncated series `sum_{i <= k_max} 2^{-i} z_i + 2^{-k_max} z_1` with
/// `z_i = y_i + (y_i - y_1) / max{1, ||y_i - y_1||}`, where `y_i` runs
/// through `dense` cyclically.
///
/// The remaining mass `2^{-k_max}` goes to `z_1`, so the weights sum to one;
/// the truncation error against the full series is at most
/// `2^{1-k_max} diam(b)`.
pub fn interior_series(b: &ConvexSet, dense: &[Vec<f64>], k_max: usize) -> Result<Vec<f64>> {
    if dense.len() < 2 {
        return Err(Error::Precondition("the dense sequence needs at least two points".into()));
    }
    if k_max == 0 {
        return Err(Error::Precondition("k_max must be positive".into()));
    }
    for (i, y) in dense.iter().enumerate() {
        if y.len() != b.dim() {
            return crate::error::domain(format!("dense point {i} has the wrong dimension"));
        }
        let r = b.distance(y);
        if r > 1e-9 {
            return Err(Error::Precondition(format!("dense point {i} lies {r:e} outside the set")));
        }
    }
    let y1 = &dense[0];
    let term = |y: &[f64]| -> Vec<f64> {
        let s = dist(y, y1).max(1.0);
        y.iter().zip(y1).map(|(yi, y1i)| yi + (yi - y1i) / s).collect()
    };
    let mut out: Vec<f64> = y1.iter().map(|v| v * 0.5f64.powi(k_max as i32)).collect();
    let mut w = 1.0;
    for i in 1..=k_max {
        w *= 0.5;
        let z = term(&dense[(i - 1) % dense.len()]);
        out.iter_mut().zip(&z).for_each(|(o, zi)| *o += w * zi);
    }
    Ok(out)
}

/// `φ_1 + (φ_k - φ_1) / max{1, ||φ_k - φ_1||}`.
pub(crate) fn pulled_toward(base: &[f64], other: &[f64]) -> Vec<f64> {
    let s = dist(other, base).max(1.0);
    base.iter().zip(other).map(|(b, o)| b + (o - b) / s).collect()
}

/// `sum_{k <= k_max} 2^{-k} ψ_k + 2^{-k_max} ψ_1` with
/// `ψ_k = pulled_toward(φ_1, φ_k)` and the family cycled.
pub(crate) fn selection_series(family: &[&[f64]], k_max: usize) -> Vec<f64> {
    let base = family[0];
    let mut out: Vec<f64> = base.iter().map(|v| v * 0.5f64.powi(k_max as i32)).collect();
    let mut w = 1.0;
    for k in 1..=k_max {
        w *= 0.5;
        let psi_k = pulled_toward(base, family[(k - 1) % family.len()]);
        out.iter_mut().zip(&psi_k).for_each(|(o, p)| *o += w * p);
    }
    out
}
