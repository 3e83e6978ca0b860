//! Competing linearizations: Picard on `ĝ`, undamped Newton, and the
//! frozen-coefficient variant. All share the functional `E` and the record
//! format of the least-squares iteration.

use std::time::Instant;

use crate::control::null_control::solve_null_control;
use crate::error::{Error, Result};
use crate::least_squares::functional::compute_e;
use crate::least_squares::problem::{LsProblem, LsState};
use crate::least_squares::solve::{
    base_record, initialize, interior_constant, ls_solve, noise_floor, LsConfig, LsOutcome, MethodTag, Status,
    DIVERGENCE_THRESHOLD,
};
use crate::wave::field::SpaceTimeField;
use crate::wave::norms::{linf_h1, linf_l1, linf_lp};

/// The least-squares iteration with `λ_k = 1`.
pub fn newton_classic_solve(problem: &LsProblem, config: &LsConfig) -> Result<LsOutcome> {
    ls_solve(problem, &LsConfig { force_unit_step: true, ..*config })
}

/// `y_{k+1} = K(y_k)`: the controlled solution with potential `ĝ(y_k)` and source `−g(0)`.
pub fn picard_solve(problem: &LsProblem, config: &LsConfig) -> Result<LsOutcome> {
    let g = &problem.nonlinearity;
    let source = interior_constant(&problem.grid, -g.g0());
    fixed_point(problem, config, MethodTag::Picard, |y| (y.map(|r| g.hat(r)), source.clone()))
}

/// Potential `g′(y_k)` and source `g′(y_k) y_k − g(y_k)`.
pub fn variant_solve(problem: &LsProblem, config: &LsConfig) -> Result<LsOutcome> {
    fixed_point(problem, config, MethodTag::Variant, |y| {
        let a = problem.gprime_of(y);
        let b = a.mul(y).add_scaled(-1.0, &problem.g_of(y));
        (a, b)
    })
}

/// Dispatch by tag.
pub fn solve_with(method: MethodTag, problem: &LsProblem, config: &LsConfig) -> Result<LsOutcome> {
    match method {
        MethodTag::LeastSquares => ls_solve(problem, &LsConfig { force_unit_step: false, ..*config }),
        MethodTag::NewtonClassic => newton_classic_solve(problem, config),
        MethodTag::Picard => picard_solve(problem, config),
        MethodTag::Variant => variant_solve(problem, config),
    }
}

fn fixed_point(
    problem: &LsProblem,
    config: &LsConfig,
    method: MethodTag,
    coefficients: impl Fn(&SpaceTimeField) -> (SpaceTimeField, SpaceTimeField),
) -> Result<LsOutcome> {
    config.validate()?;
    let started = Instant::now();
    let mut state = initialize(problem, config.init)?;
    let mut records = Vec::new();
    let mut m_run = 0.0_f64;
    let mut geometric_condition = None;
    let mut e = compute_e(problem, &state)?;
    let threshold = config.tol * (2.0 * e).sqrt();
    let mut stalled = false;

    let status = loop {
        let mut rec = base_record(problem, &state, e, &mut m_run, started);
        if !e.is_finite() || rec.y_linf_l1 > DIVERGENCE_THRESHOLD {
            records.push(rec);
            break Status::Diverged;
        }
        if (2.0 * e).sqrt() <= threshold.max(noise_floor(problem, &state.y)) {
            records.push(rec);
            break Status::Converged;
        }
        if stalled {
            records.push(rec);
            break Status::Stagnated;
        }
        if state.k >= config.max_iter {
            records.push(rec);
            break Status::CapReached;
        }
        let (potential, source) = coefficients(&state.y);
        let lin = problem.linear_problem(potential, source, problem.initial.clone(), problem.target.clone())?;
        let sol = match solve_null_control(&lin) {
            Ok(s) => s,
            Err(err @ (Error::Blowup { .. } | Error::CgBreakdown { .. })) => {
                log::warn!("{} inner solve failed at k = {}: {err}", method.as_str(), state.k);
                records.push(rec);
                break Status::InnerFailure;
            }
            Err(err) => return Err(err),
        };
        geometric_condition = sol.geometric_condition;
        let next = LsState { y: sol.trajectory, f: sol.control, k: state.k + 1 };
        let step = linf_l1(&next.y.add_scaled(-1.0, &state.y));
        rec.f1_norm = Some(sol.control_norm);
        rec.inner_defect = Some(sol.terminal_defect);
        rec.cg_iterations = Some(sol.cg_iterations);
        rec.inner_converged = Some(sol.converged);
        rec.step_norm = Some(step);
        records.push(rec);
        stalled = step <= config.tol * linf_l1(&next.y).max(f64::MIN_POSITIVE);
        state = next;
        e = compute_e(problem, &state)?;
        log::info!("{} k = {} √(2E) = {:e}", method.as_str(), state.k, (2.0 * e).sqrt());
    };
    Ok(LsOutcome { method, records, state, status, wall_time: started.elapsed().as_secs_f64(), geometric_condition })
}

/// The Picard operator `K(ξ)`.
pub fn picard_map(problem: &LsProblem, xi: &SpaceTimeField) -> Result<SpaceTimeField> {
    let g = &problem.nonlinearity;
    let lin = problem.linear_problem(
        xi.map(|r| g.hat(r)),
        interior_constant(&problem.grid, -g.g0()),
        problem.initial.clone(),
        problem.target.clone(),
    )?;
    Ok(solve_null_control(&lin)?.trajectory)
}

/// `‖K(ξ²) − K(ξ¹)‖_{L^∞(0,T;H¹₀)} / ‖ξ² − ξ¹‖_{L^∞(0,T;L^{d+1})}`.
pub fn contraction_ratio(problem: &LsProblem, xi1: &SpaceTimeField, xi2: &SpaceTimeField) -> Result<f64> {
    let diff = xi2.add_scaled(-1.0, xi1);
    let denom = linf_lp(&diff, problem.grid.dim() as f64 + 1.0);
    if denom == 0.0 {
        return Err(Error::Precondition("contraction ratio needs ξ¹ ≠ ξ²".into()));
    }
    let k1 = picard_map(problem, xi1)?;
    let k2 = picard_map(problem, xi2)?;
    Ok(linf_h1(&k2.add_scaled(-1.0, &k1)) / denom)
}
