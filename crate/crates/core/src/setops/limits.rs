use super::{dist, PointSet};
use crate::error::{domain, Result};

/// An ordered, finite sequence of point sets sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSequence {
    dim: usize,
    terms: Vec<PointSet>,
}

impl SetSequence {
    pub fn new(dim: usize, terms: Vec<PointSet>) -> Result<Self> {
        if terms.iter().any(|t| t.dim() != dim) {
            return domain("all terms of a set sequence must share one dimension");
        }
        Ok(SetSequence { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[PointSet] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn window(s: &SetSequence, tail: usize) -> Result<&[PointSet]> {
    if s.terms.is_empty() {
        return domain("set sequence has no terms");
    }
    if tail == 0 || tail > s.terms.len() {
        return domain(format!("tail {tail} outside 1..={}", s.terms.len()));
    }
    Ok(&s.terms[s.terms.len() - tail..])
}

fn hits(terms: &[PointSet], x: &[f64], tol: f64) -> usize {
    terms.iter().filter(|t| t.iter().any(|p| dist(p, x) <= tol)).count()
}

fn filtered(s: &SetSequence, tail: usize, tol: f64, need: usize) -> Result<PointSet> {
    let terms = window(s, tail)?;
    let candidates: Vec<Vec<f64>> = terms
        .iter()
        .flat_map(|t| t.iter().cloned())
        .filter(|x| hits(terms, x, tol) >= need)
        .collect();
    PointSet::new(s.dim, candidates)
}

/// Finite surrogate of the lower limit: candidate points from the last
/// `tail` terms that every one of those terms approaches within `tol`.
pub fn li_limit(s: &SetSequence, tail: usize, tol: f64) -> Result<PointSet> {
    filtered(s, tail, tol, tail)
}

/// Finite surrogate of the upper limit: candidate points approached within
/// `tol` by at least `ceil(tail / 2)` of the last `tail` terms.
pub fn ls_limit(s: &SetSequence, tail: usize, tol: f64) -> Result<PointSet> {
    filtered(s, tail, tol, tail.div_ceil(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(values: &[f64]) -> SetSequence {
        let terms = values.iter().map(|&v| PointSet::singleton(vec![v])).collect();
        SetSequence::new(1, terms).unwrap()
    }

    #[test]
    fn alternating_sequence() {
        let vals: Vec<f64> = (0..20).map(|n| (n % 2) as f64).collect();
        let s = seq(&vals);
        assert!(li_limit(&s, 10, 1e-6).unwrap().is_empty());
        let ls = ls_limit(&s, 10, 1e-6).unwrap();
        assert_eq!(ls.len(), 2);
    }

    #[test]
    fn constant_sequence() {
        let a = PointSet::new(2, vec![vec![0.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let s = SetSequence::new(2, vec![a.clone(); 7]).unwrap();
        assert!(li_limit(&s, 5, 1e-6).unwrap().approx_eq(&a, 0.0));
        assert!(ls_limit(&s, 5, 1e-6).unwrap().approx_eq(&a, 0.0));
    }

    #[test]
    fn harmonic_sequence() {
        let vals: Vec<f64> = (1..=20).map(|n| 1.0 / n as f64).collect();
        let s = seq(&vals);
        let li = li_limit(&s, 10, 0.05).unwrap();
        let ls = ls_limit(&s, 10, 0.05).unwrap();
        assert!(!li.is_empty());
        assert!(li.iter().all(|p| ls.dist_to(p) == 0.0));
    }

    #[test]
    fn bad_tail() {
        let s = seq(&[0.0, 1.0]);
        assert!(li_limit(&s, 0, 1e-6).is_err());
        assert!(ls_limit(&s, 3, 1e-6).is_err());
        assert!(li_limit(&SetSequence::new(1, vec![]).unwrap(), 1, 1e-6).is_err());
    }
}
