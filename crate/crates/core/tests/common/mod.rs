//! Random instance generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::sync::Arc;

use carasel::corr::{certified_eps, hull_lsc_modulus, CipWitness, Corr, GridSpace, Mode};
use carasel::measure::AtomSpace;
use carasel::setops::PointSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub psi: Corr,
    pub witness: CipWitness,
}

fn random_grid(rng: &mut ChaCha8Rng) -> GridSpace {
    if rng.gen_bool(0.5) {
        GridSpace::uniform(0.0, 1.0, rng.gen_range(5..=25)).unwrap()
    } else {
        let n = rng.gen_range(3..=5);
        GridSpace::box_grid(&[0.0, 0.0], &[1.0, 1.0], n).unwrap()
    }
}

/// A correspondence `Ψ(t, z) = a_t + B_t z + s_t(z) V` on a random domain,
/// with a witness whose locals shrink `Ψ` toward an interior point and whose
/// ball radii are random fractions of the distance to the complement.
pub fn random_cip(rng: &mut ChaCha8Rng, atoms: usize) -> Instance {
    let grid = Arc::new(random_grid(rng));
    let space = Arc::new(AtomSpace::uniform(atoms).unwrap());
    let m = rng.gen_range(1..=3);
    let gd = grid.dim();
    let base: Vec<Vec<f64>> = (0..m + 2).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let centre: Vec<f64> = (0..m).map(|k| base.iter().map(|v| v[k]).sum::<f64>() / base.len() as f64).collect();
    struct Atom {
        a: Vec<f64>,
        b: Vec<Vec<f64>>,
        freq: Vec<f64>,
        cut: Option<(Vec<f64>, f64)>,
    }
    let per_atom: Vec<Atom> = (0..atoms)
        .map(|_| Atom {
            a: (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            b: (0..m).map(|_| (0..gd).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect(),
            freq: (0..gd).map(|_| rng.gen_range(0.0..3.0)).collect(),
            cut: rng.gen_bool(0.6).then(|| {
                ((0..gd).map(|_| rng.gen_range(-1.0..1.0)).collect(), rng.gen_range(-0.3..0.6))
            }),
        })
        .collect();
    let inside = |t: usize, z: &[f64]| match &per_atom[t].cut {
        Some((n, c)) => n.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + c > 0.0,
        None => true,
    };
    let shift = |t: usize, z: &[f64]| -> (Vec<f64>, f64) {
        let at = &per_atom[t];
        let off: Vec<f64> =
            (0..m).map(|k| at.a[k] + at.b[k].iter().zip(z).map(|(p, q)| p * q).sum::<f64>()).collect();
        let s = 0.5 + 0.5 * at.freq.iter().zip(z).map(|(f, x)| f * x).sum::<f64>().cos().abs();
        (off, s)
    };
    let value = |t: usize, z: &[f64], lambda: f64| -> PointSet {
        if !inside(t, z) {
            return PointSet::empty(m);
        }
        let (off, s) = shift(t, z);
        let pts = base
            .iter()
            .map(|v| (0..m).map(|k| off[k] + s * (centre[k] + lambda * (v[k] - centre[k]))).collect())
            .collect();
        PointSet::new(m, pts).unwrap()
    };
    let g = grid.clone();
    let psi = Corr::from_fn(space.clone(), grid.clone(), m, |t, z| value(t, g.point(z), 1.0)).unwrap();

    let n = grid.len();
    let dom = psi.domain();
    let big = 2.0 * grid.diameter() + 1.0;
    let mut radii = vec![None; atoms * n];
    for (t, z) in dom.iter() {
        let r = (0..n).filter(|&x| !dom.contains(t, x)).map(|x| grid.d(x, z)).fold(big, f64::min);
        radii[t * n + z] = Some(r * rng.gen_range(0.3..=1.0));
    }
    let witness = if rng.gen_bool(0.5) {
        let modulus = (0..atoms).map(|t| hull_lsc_modulus(&psi, t)).fold(0.0, f64::max);
        CipWitness::shared(psi.clone(), radii, certified_eps(modulus))
    } else {
        let families: Vec<Corr> = (0..n)
            .map(|_| {
                let lambda = rng.gen_range(0.5..=1.0);
                Corr::from_fn(space.clone(), grid.clone(), m, |t, z| value(t, g.point(z), lambda)).unwrap()
            })
            .collect();
        let modulus = families
            .iter()
            .flat_map(|f| (0..atoms).map(move |t| hull_lsc_modulus(f, t)))
            .fold(0.0, f64::max);
        CipWitness::per_node(Mode::Atomic, families, radii, certified_eps(modulus))
    };
    Instance { psi, witness }
}

/// Random full-dimensional polytope in `R^m`.
pub fn random_polytope(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<f64>> {
    (0..m + 1 + rng.gen_range(0..4)).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}
