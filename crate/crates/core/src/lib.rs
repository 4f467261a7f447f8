//! Carathéodory-type selections on finite atomic measure spaces.
//!
//! The crate works at desk scale: a state space is a finite list of weighted
//! atoms, the metric space `Z` is a finite grid, and set values are finite
//! point lists in `R^n` (read as V-polytopes when convexity matters). On that
//! footing it
//!
//! * checks discrete lower/upper semicontinuity and the continuous inclusion
//!   property (plain and strong) of tabulated correspondences,
//! * glues local witnesses into a lower-semicontinuous sub-correspondence and
//!   extracts certified Carathéodory-type selections from it,
//! * solves for random fixed points, random (Nash) equilibria,
//!   common-information Bayesian equilibria and random maximal elements, and
//!   certifies every output against an exhaustive grid oracle.
//!
//! Modules map one-to-one onto those layers: [`setops`] and [`measure`] are
//! the finite geometry and measure primitives, [`corr`] holds correspondences
//! and their checks, [`selection`] builds selections and [`equilibria`] the
//! applications.

pub mod check;
pub mod corr;
pub mod equilibria;
pub mod error;
pub mod measure;
pub mod selection;
pub mod setops;

pub use check::Check;
pub use error::{Error, Result};
