//! CRRA utility, the logistic random-utility choice model, and its
//! maximum-likelihood fit.

mod crra;
mod fit;
mod gamble;
mod likelihood;
mod monotone;
pub mod optimize;

pub use crra::{crra_utility, option_utility};
pub use fit::{fit_multistart, fit_prepared, fit_rum, summarize_starts, FitConfig, RumFit, StartResult};
pub use gamble::{
    choice_probability, classify_gamble, Gamble, GambleClass, OmegaGrid, Outcome, RumParams, PROBABILITY_SUM_TOL,
    TIE_TOL,
};
pub use likelihood::{log_likelihood, LikelihoodData, Observation};
pub use monotone::{
    allowable_domain, diagnose_omega_validity, in_allowable_domain, monotone_segments, monotonic_domain, Direction,
    MonotoneSegment,
};
pub use optimize::ConvergenceStatus;
