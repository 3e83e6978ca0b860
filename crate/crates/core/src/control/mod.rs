//! Minimal-norm controls for the linear wave equation with a potential.

pub mod cg;
pub mod gap;
pub mod gramian;
pub mod null_control;
pub mod oracle;

pub use cg::{conjugate_gradient, CgOptions, CgOutcome};
pub use gap::{perturbation_gap, GapReport};
pub use gramian::{adjoint_field, gramian_apply};
pub use null_control::{default_eps_reg, solve_null_control, ControlSolution, LinearControlProblem};
pub use oracle::{assemble_dense_system, dense_oracle_control, dense_oracle_vector, DenseSystem};
