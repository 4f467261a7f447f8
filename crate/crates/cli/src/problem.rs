//! Serialized problem files.

use carasel::corr::Mode;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CipCheck,
    Select,
    Fixpoint,
    Nash,
    Bayes,
    Maximal,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::CipCheck => "cip-check",
            Kind::Select => "select",
            Kind::Fixpoint => "fixpoint",
            Kind::Nash => "nash",
            Kind::Bayes => "bayes",
            Kind::Maximal => "maximal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Dimension of the correspondence values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corr: Option<CorrSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameFile>,
    /// Prior densities, one per player (bayes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    /// Atom masses; the number of atoms is their count.
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// `n` equally spaced nodes on `[lo, hi]`.
    Uniform { lo: f64, hi: f64, n: usize },
    /// `n` nodes per axis on the box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64>, n: usize },
    /// Tensor grid from explicit axes, last axis fastest.
    Axes(Vec<Vec<f64>>),
    /// Scattered nodes with the Euclidean metric.
    Points(Vec<Vec<f64>>),
}

/// A tabulated correspondence: `default` everywhere, overridden by records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrSpec {
    #[serde(default)]
    pub default: Vec<Vec<f64>>,
    #[serde(default)]
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub atom: usize,
    pub node: usize,
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WitnessSpec {
    /// `F_z = Ψ` with the largest balls inside the domain.
    Canonical,
    Explicit {
        mode: Mode,
        families: Vec<CorrSpec>,
        /// Family used at each node; defaults to family 0 everywhere when
        /// there is one family and to family `z` at node `z` otherwise.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        local_of: Option<Vec<usize>>,
        /// One radius for every `(t, z)` in the domain.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radii: Option<Vec<RadiusRecord>>,
        /// Defaults to just above the measured hull l.s.c. modulus of the
        /// families.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bounds: Option<Bounds>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusRecord {
    pub atom: usize,
    pub node: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: Vec<PlayerSpec>,
    pub payoff: PayoffSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerSpec {
    pub name: String,
    pub grid: GridSpec,
    /// Declared (quasi-)concavity of the payoff in the own strategy.
    #[serde(default = "yes")]
    pub concave: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PayoffSpec {
    Zero,
    /// `u_i = -||x_i - a_i(ω) - c_i m_i||^2`, `m_i` the mean of the other
    /// players' strategies.
    Quadratic {
        /// `target[player][atom]`.
        target: Vec<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coupling: Option<Vec<f64>>,
    },
    /// `u_i = <coef[i][ω], x>` over the joint strategy vector.
    Linear { coef: Vec<Vec<Vec<f64>>> },
    /// `values[player][atom][joint node]`.
    Table { values: Vec<Vec<Vec<f64>>> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_eq: Option<f64>,
    /// Grid spacing used for adjacency (`2 * mesh`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict_cip: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_valued: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict_margin: Option<f64>,
}

impl ProblemFile {
    /// Canonical serialization: pretty JSON of the parsed document.
    pub fn canonical(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize") + "\n"
    }
}
