use serde::Serialize;

use crate::control::null_control::{solve_null_control, LinearControlProblem};
use crate::error::{Error, Result};
use crate::wave::field::SpaceTimeField;
use crate::wave::norms::{l2_qt, linf_h1, linf_lp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    /// `‖y − z‖_{L^∞(0,T;H¹₀)}` for the controlled solutions with potentials `A` and `A + a`.
    pub gap_norm: f64,
    /// `C‖a‖_{L^∞L^{d+1}} (‖B‖₂ + ‖(u₀,u₁)‖_𝑽) e^{C‖A+a‖²_{L^∞L^d}} e^{C‖A‖²_{L^∞L^d}}`.
    pub bound_rhs: f64,
    pub converged: bool,
}

/// Compares the HUM controlled solutions of `problem` and of the same problem
/// with potential `A + a`. The bound uses the caller's constant `c`.
pub fn perturbation_gap(problem: &LinearControlProblem, a: &SpaceTimeField, c: f64) -> Result<GapReport> {
    a.check_shape(&problem.grid)?;
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("gap bound needs C > 0, got {c}")));
    }
    let d = problem.grid.dim() as f64;
    let base = solve_null_control(problem)?;
    let mut shifted = problem.clone();
    shifted.potential = problem.potential.add_scaled(1.0, a);
    let gap_norm = if a.max_abs() == 0.0 {
        0.0
    } else {
        let other = solve_null_control(&shifted)?;
        linf_h1(&base.trajectory.add_scaled(-1.0, &other.trajectory))
    };
    let a_norm = linf_lp(a, d + 1.0);
    let data = l2_qt(&problem.source) + problem.initial.v_norm();
    let pa = linf_lp(&shifted.potential, d);
    let p0 = linf_lp(&problem.potential, d);
    let bound_rhs = c * a_norm * data * (c * pa * pa).exp() * (c * p0 * p0).exp();
    Ok(GapReport { gap_norm, bound_rhs, converged: base.converged })
}
