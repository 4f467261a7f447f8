//! Random fixed points, random games and Bayesian games on finite grids.

mod bayes;
mod fixed_point;
mod game;
mod maximal;
mod nash;

pub use bayes::{bayes_equilibrium, bayes_h, BayesSpec};
pub use fixed_point::{random_fixed_point, FixedPointMethod, FixedPointProfile, DAMPING, MAX_ITERATIONS};
pub use game::{pref_from_payoff, GameSpec, PayoffFn, PayoffTable, MAX_JOINT_NODES};
pub use maximal::{maximal_element, MaximalCertificate};
pub use nash::{
    random_equilibrium, random_nash, EquilibriumCertificate, EquilibriumOptions, ProfileMethod, CONCAVITY_SAMPLES,
    IRREFLEXIVITY_TOL,
};
