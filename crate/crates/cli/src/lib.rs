//! Batch front end: problem files in, certificates out.

pub mod build;
pub mod problem;

use std::path::{Path, PathBuf};

use carasel::corr::{cip_verify, lsc_check, scip_verify, usc_check, CipOptions, Mode};
use carasel::equilibria::{
    bayes_equilibrium, maximal_element, pref_from_payoff, random_fixed_point, random_nash, BayesSpec,
    EquilibriumCertificate, EquilibriumOptions,
};
use carasel::selection::{caratheodory_select, SelectOptions};
use carasel::setops::DEFAULT_MEMBERSHIP_TOL;
use carasel::{Check, Error};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error as ThisError;

pub use problem::{Kind, Options, ProblemFile};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_FIXPOINT_TOL: f64 = 1e-6;
pub const DEFAULT_EPS_EQ: f64 = 1e-9;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {msg}")]
    Parse { path: String, line: usize, column: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Library(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::Library(Error::Domain(_)) => 2,
            CliError::Library(Error::Precondition(_)) => 3,
            CliError::Library(Error::NoCertificate { .. }) => 4,
            CliError::Library(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Failed,
    NoCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub tool_version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: Status,
    pub kind: Kind,
    pub checks: Vec<Check>,
    pub outputs: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize") + "\n"
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::NoCertificate => 4,
        }
    }
}

/// Command-line overrides applied on top of the file's options.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub eps_eq: Option<f64>,
    pub mesh: Option<f64>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub strict_cip: bool,
    /// `key=value` pairs for any option; values are read as JSON, falling
    /// back to strings.
    pub set: Vec<String>,
}

fn parse_error(path: &str, e: serde_json::Error) -> CliError {
    CliError::Parse { path: path.to_string(), line: e.line(), column: e.column(), msg: e.to_string() }
}

pub fn parse_problem(text: &str, path: &str) -> Result<ProblemFile, CliError> {
    serde_json::from_str(text).map_err(|e| parse_error(path, e))
}

pub fn apply_overrides(mut opts: Options, o: &Overrides) -> Result<Options, CliError> {
    if !o.set.is_empty() {
        let mut v = serde_json::to_value(&opts).expect("options serialize");
        let map = v.as_object_mut().expect("options are an object");
        for kv in &o.set {
            let (k, raw) = kv.split_once('=').ok_or_else(|| CliError::Invalid(format!("--set expects key=value, got {kv:?}")))?;
            let val = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            map.insert(k.trim().to_string(), val);
        }
        opts = serde_json::from_value(v).map_err(|e| CliError::Invalid(format!("bad --set: {e}")))?;
    }
    opts.tol = o.tol.or(opts.tol);
    opts.eps_eq = o.eps_eq.or(opts.eps_eq);
    opts.mesh = o.mesh.or(opts.mesh);
    opts.seed = o.seed.or(opts.seed);
    opts.mode = o.mode.or(opts.mode);
    if o.strict_cip {
        opts.strict_cip = Some(true);
    }
    Ok(opts)
}

fn validate(p: &ProblemFile) -> Result<(), CliError> {
    let o = &p.options;
    for (name, v) in [("tol", o.tol), ("eps_eq", o.eps_eq), ("mesh", o.mesh)] {
        if let Some(v) = v {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Invalid(format!("option {name} must be strictly positive")));
            }
        }
    }
    if matches!(o.strict_margin, Some(m) if !(m >= 0.0)) {
        return Err(CliError::Invalid("option strict_margin must be nonnegative".into()));
    }
    let randomized = p.kind == Kind::Select && !o.closed_valued.unwrap_or(false) && o.restarts.unwrap_or(8) > 0;
    if randomized && o.seed.is_none() {
        return Err(CliError::Invalid("randomized restarts are enabled: options.seed is required".into()));
    }
    let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(CliError::Invalid(format!("kind {} needs {what}", p.kind.as_str()))) };
    match p.kind {
        Kind::CipCheck | Kind::Select | Kind::Fixpoint => {
            need(p.grid.is_some(), "a grid")?;
            need(p.corr.is_some(), "a corr table")?;
            need(p.dim.is_some(), "dim")?;
        }
        Kind::Nash | Kind::Bayes => need(p.game.is_some(), "a game")?,
        Kind::Maximal => need(p.game.is_some() || (p.grid.is_some() && p.corr.is_some() && p.dim.is_some()), "a game or grid, dim and corr")?,
    }
    Ok(())
}

fn select_options(o: &Options, closed_default: bool, tol: f64) -> SelectOptions {
    let d = SelectOptions::default();
    SelectOptions {
        closed_valued: o.closed_valued.unwrap_or(closed_default),
        tol,
        k_max: o.k_max.unwrap_or(d.k_max),
        restarts: o.restarts.unwrap_or(d.restarts),
        seed: o.seed.unwrap_or(0),
        strict_cip: o.strict_cip.unwrap_or(false),
    }
}

fn equilibrium_outputs(c: &EquilibriumCertificate) -> Value {
    json!({
        "profile": c.profile,
        "profile_nodes": c.profile_nodes,
        "regrets": c.regrets,
        "eps_eq": c.eps_eq,
        "measurable_wrt": c.measurable_wrt,
        "methods": c.methods,
    })
}

/// Result of a pipeline before provenance is attached.
struct Outcome {
    checks: Vec<Check>,
    outputs: Value,
    warnings: Vec<String>,
}

fn run_pipeline(p: &ProblemFile) -> Result<Outcome, CliError> {
    let o = &p.options;
    let space = build::space(&p.space)?;
    let part = build::partition(p.partition.as_ref(), space.len())?;
    let psi = || -> Result<_, CliError> {
        let grid = build::grid(p.grid.as_ref().expect("validated"), o.mesh)?;
        Ok(build::corr(p.corr.as_ref().expect("validated"), &space, &grid, p.dim.expect("validated"))?)
    };
    let witness = |psi: &carasel::corr::Corr| -> Result<_, CliError> {
        let spec = p.witness.clone().unwrap_or(problem::WitnessSpec::Canonical);
        Ok(build::witness(&spec, psi, o.mode)?)
    };
    let eq_opts = || EquilibriumOptions {
        strict_margin: o.strict_margin.unwrap_or(0.0),
        select: select_options(o, true, DEFAULT_MEMBERSHIP_TOL),
        ..EquilibriumOptions::default()
    };

    match p.kind {
        Kind::CipCheck => {
            let psi = psi()?;
            let w = witness(&psi)?;
            let eps = w.eps;
            let cip_opts = CipOptions { strict: o.strict_cip.unwrap_or(false), membership_tol: DEFAULT_MEMBERSHIP_TOL };
            let (checks, report) = if w.mode == Mode::Atomic {
                let r = cip_verify(&psi, &w, eps, cip_opts)?;
                (vec![Check::count("cip", r.failures.len())], r)
            } else {
                let r = scip_verify(&psi, &w, &part, eps, cip_opts)?;
                (r.checks.clone(), r.cip)
            };
            let semi: Vec<Value> = (0..psi.n_atoms())
                .map(|t| {
                    let l = lsc_check(&psi, t, eps);
                    let u = usc_check(&psi, t, eps);
                    json!({
                        "atom": t,
                        "lsc": l.ok,
                        "lsc_worst": l.worst(),
                        "usc": u.ok,
                    })
                })
                .collect();
            let failures: Vec<Value> = report
                .failures
                .iter()
                .take(20)
                .map(|f| json!({"atom": f.atom, "z": f.z, "x": f.x, "kind": format!("{:?}", f.kind), "residual": f.residual}))
                .collect();
            Ok(Outcome {
                checks,
                outputs: json!({
                    "mode": w.mode,
                    "eps": eps,
                    "cip": report.ok,
                    "failures": failures,
                    "max_inclusion_residual": report.max_inclusion_residual,
                    "semicontinuity": semi,
                }),
                warnings: Vec::new(),
            })
        }
        Kind::Select => {
            let psi = psi()?;
            let w = witness(&psi)?;
            let cert = caratheodory_select(&psi, &w, &part, &select_options(o, false, o.tol.unwrap_or(DEFAULT_MEMBERSHIP_TOL)))?;
            let table: Vec<Value> = cert
                .selection
                .domain
                .iter()
                .map(|(t, z)| json!({"atom": t, "node": z, "value": cert.selection.value(t, z)}))
                .collect();
            Ok(Outcome {
                checks: cert.checks.clone(),
                outputs: json!({
                    "selection": table,
                    "modulus": cert.selection.modulus,
                    "atom_modulus": cert.selection.atom_modulus,
                    "max_membership_residual": cert.max_membership_residual,
                    "phi": cert.phi.report,
                }),
                warnings: Vec::new(),
            })
        }
        Kind::Fixpoint => {
            let psi = psi()?;
            let w = witness(&psi)?;
            let tol = o.tol.unwrap_or(DEFAULT_FIXPOINT_TOL);
            let fp = random_fixed_point(&psi, &w, &part, tol, &select_options(o, true, DEFAULT_MEMBERSHIP_TOL))?;
            Ok(Outcome {
                checks: fp.checks.clone(),
                outputs: json!({"values": fp.values, "residuals": fp.residuals, "methods": fp.methods}),
                warnings: Vec::new(),
            })
        }
        Kind::Nash => {
            let g = build::game(p.game.as_ref().expect("validated"), &space, o.mesh)?;
            let eps = o.eps_eq.unwrap_or(DEFAULT_EPS_EQ);
            let c = random_nash(&g, &part, eps, &eq_opts())?;
            Ok(Outcome { checks: c.checks.clone(), outputs: equilibrium_outputs(&c), warnings: c.warnings })
        }
        Kind::Bayes => {
            let g = build::game(p.game.as_ref().expect("validated"), &space, o.mesh)?;
            let priors = build::priors(p.priors.as_ref(), &space, g.n_players())?;
            let b = BayesSpec::new(g, part, priors)?;
            let eps = o.eps_eq.unwrap_or(DEFAULT_EPS_EQ);
            let c = bayes_equilibrium(&b, eps, &eq_opts())?;
            Ok(Outcome { checks: c.checks.clone(), outputs: equilibrium_outputs(&c), warnings: c.warnings })
        }
        Kind::Maximal => {
            let (pref, w) = match &p.game {
                Some(gf) => {
                    let g = build::game(gf, &space, o.mesh)?;
                    if g.n_players() != 1 {
                        return Err(CliError::Invalid("maximal problems take a single-player game".into()));
                    }
                    let margin = o.strict_margin.or(o.eps_eq).unwrap_or(0.0);
                    let pref = pref_from_payoff(&g, 0, margin)?;
                    let w = witness(&pref)?;
                    (pref, w)
                }
                None => {
                    let pref = psi()?;
                    let w = witness(&pref)?;
                    (pref, w)
                }
            };
            let c = maximal_element(&pref, &w, &part, &select_options(o, true, DEFAULT_MEMBERSHIP_TOL))?;
            Ok(Outcome {
                checks: c.checks.clone(),
                outputs: json!({"values": c.values, "nodes": c.nodes}),
                warnings: c.warnings,
            })
        }
    }
}

fn now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Runs a parsed problem. Library failures other than "no certificate" are
/// returned as errors; "no certificate" becomes a certificate with that
/// status.
pub fn run_problem(p: &ProblemFile, input: &[u8]) -> Result<Certificate, CliError> {
    validate(p)?;
    let provenance = Provenance {
        input_sha256: hex::encode(Sha256::digest(input)),
        tool_version: TOOL_VERSION.to_string(),
        seed: p.options.seed.unwrap_or(0),
        timestamp: now(),
    };
    match run_pipeline(p) {
        Ok(out) => {
            let status = if carasel::check::all_passed(&out.checks) { Status::Ok } else { Status::Failed };
            Ok(Certificate { status, kind: p.kind, checks: out.checks, outputs: out.outputs, warnings: out.warnings, provenance })
        }
        Err(CliError::Library(Error::NoCertificate { reason, best })) => {
            let tol = match p.kind {
                Kind::Nash | Kind::Bayes | Kind::Maximal => p.options.eps_eq.unwrap_or(DEFAULT_EPS_EQ),
                Kind::Fixpoint => p.options.tol.unwrap_or(DEFAULT_FIXPOINT_TOL),
                _ => p.options.tol.unwrap_or(DEFAULT_MEMBERSHIP_TOL),
            };
            let residual = if best.is_finite() { best } else { f64::MAX };
            Ok(Certificate {
                status: Status::NoCertificate,
                kind: p.kind,
                checks: vec![Check::within("certificate", residual, tol).with_detail(reason.clone())],
                outputs: json!({ "reason": reason, "best_residual": residual }),
                warnings: Vec::new(),
                provenance,
            })
        }
        Err(e) => Err(e),
    }
}

/// Default certificate path: the input path with `.cert.json` appended to
/// its stem.
pub fn certificate_path(input: &Path) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    input.with_file_name(format!("{stem}.cert.json"))
}

/// Reads, runs and writes the certificate; returns it with the path
/// written.
pub fn run_file(input: &Path, overrides: &Overrides, out: Option<&Path>) -> Result<(Certificate, PathBuf), CliError> {
    let shown = input.display().to_string();
    let bytes = std::fs::read(input).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Invalid(format!("{shown}: not UTF-8: {e}")))?;
    let mut problem = parse_problem(text, &shown)?;
    problem.options = apply_overrides(problem.options, overrides)?;
    let cert = run_problem(&problem, &bytes)?;
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| certificate_path(input));
    std::fs::write(&path, cert.to_json()).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok((cert, path))
}

fn shape(v: &Value) -> String {
    match v {
        Value::Array(a) => match a.first() {
            Some(f @ Value::Array(_)) => format!("[{}]{}", a.len(), shape(f)),
            Some(Value::Object(_)) => format!("[{}] records", a.len()),
            _ => format!("[{}]", a.len()),
        },
        Value::Object(_) => "object".into(),
        _ => "scalar".into(),
    }
}

/// Human-readable summary; failing checks are listed first.
pub fn report(cert: &Certificate) -> String {
    let mut rows: Vec<&Check> = cert.checks.iter().filter(|c| !c.passed).collect();
    rows.extend(cert.checks.iter().filter(|c| c.passed));
    let width = rows.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!("kind: {}\nstatus: {:?}\n\n", cert.kind.as_str(), cert.status);
    s += &format!("{:<width$}  {:>12}  {:>12}  result\n", "check", "residual", "tolerance");
    for c in &rows {
        s += &format!(
            "{:<width$}  {:>12.4e}  {:>12.4e}  {}\n",
            c.name,
            c.residual,
            c.tolerance,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    if let Value::Object(map) = &cert.outputs {
        s += "\noutputs:\n";
        for (k, v) in map {
            s += &format!("  {k}: {}\n", shape(v));
        }
    }
    for w in &cert.warnings {
        s += &format!("warning: {w}\n");
    }
    let failed = cert.checks.iter().filter(|c| !c.passed).count();
    if failed == 0 && cert.status == Status::Ok {
        s += "ALL CHECKS PASSED\n";
    } else {
        s += &format!("{failed} CHECK(S) FAILED\n");
    }
    s
}

pub fn read_certificate(path: &Path) -> Result<Certificate, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    serde_json::from_str(&text).map_err(|e| parse_error(&shown, e))
}
