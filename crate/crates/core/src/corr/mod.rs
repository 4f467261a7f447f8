//! Tabulated correspondences on `T x Z`, their discrete semicontinuity and
//! measurability checks, and continuous-inclusion-property witnesses.

mod cip;
mod correspondence;
mod grid;
mod operators;
mod semicontinuity;

pub(crate) use cip::check_structure;
pub use cip::{
    certified_eps, cip_verify, scip_verify, CipFailure, CipOptions, CipReport, CipWitness, FailureKind, Mode,
    ScipReport,
};
pub use correspondence::{Corr, Domain};
pub use grid::{linspace, GridSpace};
pub use operators::{interior_representatives, k_operator, n_operator, TaggedUnion};
pub use semicontinuity::{
    hull_lsc_check, hull_lsc_modulus, hull_lsc_violations, lower_measurable_check, lsc_check, lsc_modulus,
    usc_check, SemiReport, Violation, LOWER_MEASURABLE_LABEL,
};
