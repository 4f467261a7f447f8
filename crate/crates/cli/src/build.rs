//! Conversion of problem-file sections into library objects.

use std::sync::Arc;

use carasel::corr::{certified_eps, hull_lsc_modulus, CipWitness, Corr, GridSpace, Mode};
use carasel::equilibria::{GameSpec, PayoffFn};
use carasel::measure::{AtomSpace, InfoPartition, Prior};
use carasel::setops::PointSet;
use carasel::Error;

use crate::problem::{CorrSpec, GameFile, GridSpec, PayoffSpec, SpaceSpec, WitnessSpec};

type Result<T> = std::result::Result<T, Error>;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub fn space(s: &SpaceSpec) -> Result<Arc<AtomSpace>> {
    let labels = match &s.labels {
        Some(l) => l.clone(),
        None => (0..s.weights.len()).map(|t| format!("t{t}")).collect(),
    };
    Ok(Arc::new(AtomSpace::new(labels, s.weights.clone())?))
}

pub fn partition(cells: Option<&Vec<Vec<usize>>>, atoms: usize) -> Result<InfoPartition> {
    match cells {
        Some(c) => InfoPartition::new(atoms, c.clone()),
        None => Ok(InfoPartition::singletons(atoms)),
    }
}

pub fn grid(g: &GridSpec, mesh: Option<f64>) -> Result<Arc<GridSpace>> {
    let built = match g {
        GridSpec::Uniform { lo, hi, n } => GridSpace::uniform(*lo, *hi, *n)?,
        GridSpec::Box { lo, hi, n } => GridSpace::box_grid(lo, hi, *n)?,
        GridSpec::Axes(axes) => GridSpace::tensor(axes.clone())?,
        GridSpec::Points(points) => return Ok(Arc::new(GridSpace::euclidean(points.clone(), mesh)?)),
    };
    Ok(Arc::new(match mesh {
        Some(h) => built.with_adjacency_radius(2.0 * h)?,
        None => built,
    }))
}

pub fn corr(spec: &CorrSpec, space: &Arc<AtomSpace>, grid: &Arc<GridSpace>, dim: usize) -> Result<Corr> {
    let n = grid.len();
    let default = PointSet::new(dim, spec.default.clone())?;
    let mut values = vec![default; space.len() * n];
    let mut seen = vec![false; values.len()];
    for r in &spec.records {
        if r.atom >= space.len() || r.node >= n {
            return invalid(format!("record (atom {}, node {}) is out of range", r.atom, r.node));
        }
        let k = r.atom * n + r.node;
        if std::mem::replace(&mut seen[k], true) {
            return invalid(format!("duplicate record for atom {}, node {}", r.atom, r.node));
        }
        values[k] = PointSet::new(dim, r.vertices.clone())?;
    }
    Corr::new(space.clone(), grid.clone(), dim, values)
}

pub fn witness(spec: &WitnessSpec, psi: &Corr, mode_override: Option<Mode>) -> Result<CipWitness> {
    let mut w = match spec {
        WitnessSpec::Canonical => CipWitness::canonical(psi),
        WitnessSpec::Explicit { mode, families, local_of, radius, radii, eps, bounds } => {
            let fams: Vec<Corr> =
                families.iter().map(|f| corr(f, psi.space(), psi.grid(), psi.dim())).collect::<Result<_>>()?;
            let n = psi.n_nodes();
            let local_of = match local_of {
                Some(l) => l.clone(),
                None if fams.len() == 1 => vec![0; n],
                None if fams.len() == n => (0..n).collect(),
                None => return invalid("local_of is required unless there is one family or one per node"),
            };
            if local_of.iter().any(|&f| f >= fams.len()) {
                return invalid("local_of names a missing family");
            }
            let dom = psi.domain();
            let mut table = vec![None; psi.n_atoms() * n];
            match (radius, radii) {
                (Some(_), Some(_)) => return invalid("give either radius or radii, not both"),
                (Some(r), None) => {
                    for (t, z) in dom.iter() {
                        table[t * n + z] = Some(*r);
                    }
                }
                (None, Some(list)) => {
                    for r in list {
                        if r.atom >= psi.n_atoms() || r.node >= n {
                            return invalid(format!("radius record (atom {}, node {}) is out of range", r.atom, r.node));
                        }
                        table[r.atom * n + r.node] = Some(r.radius);
                    }
                }
                (None, None) => {
                    table = CipWitness::canonical(psi).radii;
                }
            }
            let eps = match eps {
                Some(e) => *e,
                None => {
                    let m = fams
                        .iter()
                        .flat_map(|f| (0..psi.n_atoms()).map(move |t| hull_lsc_modulus(f, t)))
                        .fold(0.0, f64::max);
                    certified_eps(m)
                }
            };
            let w = CipWitness { mode: *mode, families: fams, local_of, radii: table, eps, bounds: None };
            match bounds {
                Some(b) => w.with_bounds(b.lo.clone(), b.hi.clone()),
                None => w,
            }
        }
    };
    if let Some(m) = mode_override {
        w.mode = m;
    }
    Ok(w)
}

pub fn game(spec: &GameFile, space: &Arc<AtomSpace>, mesh: Option<f64>) -> Result<GameSpec> {
    if spec.players.is_empty() {
        return invalid("a game needs at least one player");
    }
    let grids: Vec<Arc<GridSpace>> = spec.players.iter().map(|p| grid(&p.grid, mesh)).collect::<Result<_>>()?;
    let dims: Vec<usize> = grids.iter().map(|g| g.dim()).collect();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let players = spec.players.len();
    let atoms = space.len();
    let joint_dim: usize = dims.iter().sum();
    let payoff: PayoffFn = match &spec.payoff {
        PayoffSpec::Zero => Arc::new(|_, _, _| 0.0),
        PayoffSpec::Quadratic { target, coupling } => {
            if target.len() != players || target.iter().enumerate().any(|(i, a)| a.len() != atoms || a.iter().any(|v| v.len() != dims[i])) {
                return invalid("quadratic target must be [player][atom][own coordinate]");
            }
            let c = coupling.clone().unwrap_or_else(|| vec![0.0; players]);
            if c.len() != players {
                return invalid("one coupling coefficient per player");
            }
            if c.iter().any(|&v| v != 0.0) && dims.iter().any(|&d| d != dims[0]) {
                return invalid("coupled quadratic payoffs need equal strategy dimensions");
            }
            let target = target.clone();
            let (dims, offsets) = (dims.clone(), offsets.clone());
            Arc::new(move |i, t, x: &[f64]| {
                let d = dims[i];
                let mut s = 0.0;
                for k in 0..d {
                    let mean = if players > 1 {
                        (0..players).filter(|&j| j != i).map(|j| x[offsets[j] + k]).sum::<f64>() / (players - 1) as f64
                    } else {
                        0.0
                    };
                    let r = x[offsets[i] + k] - target[i][t][k] - c[i] * mean;
                    s += r * r;
                }
                -s
            })
        }
        PayoffSpec::Linear { coef } => {
            if coef.len() != players || coef.iter().any(|a| a.len() != atoms || a.iter().any(|v| v.len() != joint_dim)) {
                return invalid("linear coefficients must be [player][atom][joint coordinate]");
            }
            let coef = coef.clone();
            Arc::new(move |i, t, x: &[f64]| coef[i][t].iter().zip(x).map(|(a, b)| a * b).sum())
        }
        PayoffSpec::Table { values } => {
            let n: usize = grids.iter().map(|g| g.len()).product();
            if values.len() != players || values.iter().any(|a| a.len() != atoms || a.iter().any(|v| v.len() != n)) {
                return invalid("payoff table must be [player][atom][joint node]");
            }
            if values.iter().flatten().flatten().any(|v| !v.is_finite()) {
                return invalid("payoff table entries must be finite");
            }
            let joint = GridSpace::product(&grids.iter().map(|g| g.as_ref()).collect::<Vec<_>>())?;
            let values = values.clone();
            Arc::new(move |i, t, x: &[f64]| values[i][t][joint.nearest(x)])
        }
    };
    GameSpec::new(
        spec.players.iter().map(|p| p.name.clone()).collect(),
        space.clone(),
        grids,
        payoff,
        spec.players.iter().map(|p| p.concave).collect(),
    )
}

pub fn priors(spec: Option<&Vec<Vec<f64>>>, space: &AtomSpace, players: usize) -> Result<Vec<Prior>> {
    match spec {
        None => Ok(vec![Prior::uniform(space); players]),
        Some(list) if list.len() == players => list.iter().map(|q| Prior::new(space, q.clone())).collect(),
        Some(_) => invalid("one prior per player"),
    }
}
