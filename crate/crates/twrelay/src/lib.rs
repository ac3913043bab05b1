//! Reproducible parallel Monte Carlo estimation and the experiment CLI for
//! the multipair two-way AF relay model in `twrelay-core`.

pub mod experiment;
pub mod montecarlo;
pub mod plotdata;
pub mod sweep;
pub mod validate;

pub use experiment::{ExperimentSpec, FadingMode, ParamGrid, ParseError};
pub use montecarlo::{
    estimate_jensen_bound, estimate_se, lln_convergence_suite, ConvergenceReport, SEEstimate,
};
pub use sweep::{run_sweep, write_csv, SweepRow};
