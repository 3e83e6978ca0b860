use crate::control::null_control::solve_null_control;
use crate::error::Result;
use crate::least_squares::problem::{LsProblem, LsState};
use crate::wave::field::{SpaceTimeField, StatePair};
use crate::wave::norms::{l2_qt_sq, linf_v};
use crate::wave::residual::residual_field;

/// Residual `y_tt − Δy + g(y) − f χ_ω` of the pair.
pub fn residual(problem: &LsProblem, state: &LsState) -> Result<SpaceTimeField> {
    residual_field(&state.y, &state.f, &problem.nonlinearity, &problem.region, problem.initial.velocity())
}

/// `E(y, f) = ½ ‖y_tt − Δy + g(y) − f χ_ω‖²_{L²(Q_T)}`.
pub fn compute_e(problem: &LsProblem, state: &LsState) -> Result<f64> {
    Ok(0.5 * l2_qt_sq(&residual(problem, state)?))
}

/// Outcome of the inner control solve behind a descent direction.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerReport {
    pub terminal_defect: f64,
    pub cg_iterations: usize,
    pub converged: bool,
    /// `‖F¹‖_{L²(q_T)}`.
    pub control_norm: f64,
    pub geometric_condition: Option<bool>,
}

/// The descent pair `(Y¹, F¹)`.
#[derive(Debug, Clone)]
pub struct Descent {
    pub dy: SpaceTimeField,
    pub df: SpaceTimeField,
    pub report: InnerReport,
}

impl Descent {
    /// `‖(Y¹, ∂_t Y¹)‖_{L^∞(0,T;𝑽)}`.
    pub fn state_norm(&self) -> f64 {
        linf_v(&self.dy)
    }
}

/// Minimal-norm null-controlled solution of
/// `Y_tt − ΔY + g′(y) Y = F χ_ω + r(y, f)` with zero data at both ends.
///
/// Along `(y, f) − λ(Y¹, F¹)` the residual becomes `(1 − λ) r` plus the
/// second-order Taylor remainder of `g`, so `E′(y, f)·(Y¹, F¹) = 2E(y, f)`.
pub fn descent_direction(problem: &LsProblem, state: &LsState) -> Result<Descent> {
    let r = residual(problem, state)?;
    descent_from_residual(problem, state, r)
}

pub(crate) fn descent_from_residual(problem: &LsProblem, state: &LsState, r: SpaceTimeField) -> Result<Descent> {
    let grid = problem.grid;
    let lin = problem.linear_problem(
        problem.gprime_of(&state.y),
        r,
        StatePair::zeros(&grid),
        StatePair::zeros(&grid),
    )?;
    let sol = solve_null_control(&lin)?;
    let report = InnerReport {
        terminal_defect: sol.terminal_defect,
        cg_iterations: sol.cg_iterations,
        converged: sol.converged,
        control_norm: sol.control_norm,
        geometric_condition: sol.geometric_condition,
    };
    Ok(Descent { dy: sol.trajectory, df: sol.control, report })
}
