//! Command-line orchestration and convergence studies.

mod cli;
mod convergence;

pub use cli::run;
pub use convergence::{run_convergence, ConvergenceRow, SweepAxis, EXACT_REMAINDER};
