//! The least-squares functional `E`, its descent pair, and the damped Newton iteration.

pub mod diagnostics;
pub mod functional;
pub mod line_search;
pub mod order;
pub mod problem;
pub mod solve;

pub use diagnostics::{analytic_lambda, diagnostic_constants, Diagnostics};
pub use functional::{compute_e, descent_direction, residual, Descent, InnerReport};
pub use line_search::{line_search, LineSearchConfig, LineSearchOutcome};
pub use order::{estimate_order, OrderEstimate};
pub use problem::{InnerConfig, LsProblem, LsState};
pub use solve::{initialize, ls_solve, InitStrategy, IterateRecord, LsConfig, LsOutcome, MethodTag, Status};
