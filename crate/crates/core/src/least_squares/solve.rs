use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::control::null_control::solve_null_control;
use crate::error::{Error, Result};
use crate::least_squares::diagnostics::{analytic_lambda, c_of, d_of, gprime_norm};
use crate::least_squares::functional::{compute_e, descent_from_residual, residual};
use crate::least_squares::line_search::{line_search, LineSearchConfig};
use crate::least_squares::order::{estimate_order, OrderEstimate, DEFAULT_ORDER_WINDOW};
use crate::least_squares::problem::{LsProblem, LsState};
use crate::wave::field::SpaceTimeField;
use crate::wave::norms::{l2_qt_sq, linf_l1};

/// Iterates with `‖y‖_{L^∞(0,T;L¹)}` above this are declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Minimal-norm controlled pair of the problem with `g ≡ 0`.
    Linear,
    /// Same with potential `g′(0)` and source `−g(0)`.
    LinearFrozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LsConfig {
    /// Line-search interval `[0, m]`.
    #[serde(default = "default_m")]
    pub m: f64,
    /// Stop once `√(2E) ≤ tol · √(2E₀)`.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub line_search: LineSearchConfig,
    /// Observability constant used only by the diagnostics.
    #[serde(default = "default_c")]
    pub diag_c: f64,
    #[serde(default = "default_init")]
    pub init: InitStrategy,
    /// Skip the line search and take `λ = 1` (the undamped Newton iteration).
    #[serde(default)]
    pub force_unit_step: bool,
}

fn default_m() -> f64 {
    2.0
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    50
}
fn default_c() -> f64 {
    1.0
}
fn default_init() -> InitStrategy {
    InitStrategy::Linear
}

impl Default for LsConfig {
    fn default() -> Self {
        LsConfig {
            m: default_m(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            line_search: LineSearchConfig::default(),
            diag_c: default_c(),
            init: default_init(),
            force_unit_step: false,
        }
    }
}

impl LsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 1.0) {
            return Err(Error::Config(format!("m must be at least 1, got {}", self.m)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.diag_c > 0.0) {
            return Err(Error::Config(format!("diag_c must be positive, got {}", self.diag_c)));
        }
        if !(self.line_search.rel_width > 0.0) || self.line_search.scan_points < 3 {
            return Err(Error::Config("line_search needs rel_width > 0 and at least 3 scan points".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    Stagnated,
    CapReached,
    InnerFailure,
    Diverged,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Stagnated => "stagnated",
            Status::CapReached => "cap_reached",
            Status::InnerFailure => "inner_failure",
            Status::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    LeastSquares,
    NewtonClassic,
    Picard,
    Variant,
}

impl MethodTag {
    pub const ALL: [MethodTag; 4] = [MethodTag::LeastSquares, MethodTag::NewtonClassic, MethodTag::Picard, MethodTag::Variant];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::LeastSquares => "least_squares",
            MethodTag::NewtonClassic => "newton_classic",
            MethodTag::Picard => "picard",
            MethodTag::Variant => "variant",
        }
    }
}

/// One row per iterate `(y_k, f_k)`; step fields describe the move to `k + 1`
/// and are empty on the last row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterateRecord {
    pub k: usize,
    pub e: f64,
    pub sqrt_e: f64,
    pub lambda: Option<f64>,
    pub lambda_tilde: Option<f64>,
    /// `‖F¹_k‖_{L²(q_T)}` (the new control's norm for fixed-point methods).
    pub f1_norm: Option<f64>,
    /// `‖(Y¹_k, ∂_t Y¹_k)‖_{L^∞(0,T;𝑽)}`.
    pub y1_linf_v: Option<f64>,
    pub y_linf_l1: f64,
    pub gprime_linf_ld: f64,
    pub inner_defect: Option<f64>,
    pub cg_iterations: Option<usize>,
    pub inner_converged: Option<bool>,
    /// `𝑽`-distance of the iterate's initial state to `(u₀, u₁)`.
    pub init_defect: f64,
    /// `𝑽`-distance of the iterate's terminal state to `(z₀, z₁)`.
    pub terminal_defect: f64,
    /// `max_{j ≤ k} ‖y_j‖_{L^∞(0,T;L¹)}`.
    pub m_run: f64,
    /// `‖y_{k+1} − y_k‖_{L^∞(0,T;L¹)}`.
    pub step_norm: Option<f64>,
    /// `‖f_k‖_{L²(q_T)}`.
    pub control_norm: f64,
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct LsOutcome {
    pub method: MethodTag,
    pub records: Vec<IterateRecord>,
    pub state: LsState,
    pub status: Status,
    pub wall_time: f64,
    pub geometric_condition: Option<bool>,
}

impl LsOutcome {
    pub fn final_e(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.e)
    }

    pub fn e_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.e).collect()
    }

    pub fn order(&self) -> Result<OrderEstimate> {
        estimate_order(&self.e_values(), DEFAULT_ORDER_WINDOW)
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }
}

/// Initial pair `(y₀, f₀)` for the chosen strategy.
pub fn initialize(problem: &LsProblem, strategy: InitStrategy) -> Result<LsState> {
    let grid = problem.grid;
    let (potential, source) = match strategy {
        InitStrategy::Linear => (SpaceTimeField::zeros(&grid), SpaceTimeField::zeros(&grid)),
        InitStrategy::LinearFrozen => {
            let g = &problem.nonlinearity;
            (SpaceTimeField::constant(&grid, g.deriv(0.0)), interior_constant(&grid, -g.g0()))
        }
    };
    let lin = problem.linear_problem(potential, source, problem.initial.clone(), problem.target.clone())?;
    let sol = solve_null_control(&lin)?;
    Ok(LsState { y: sol.trajectory, f: sol.control, k: 0 })
}

/// Constant on interior nodes, zero on the boundary.
pub(crate) fn interior_constant(grid: &crate::wave::grid::SpaceTimeGrid, value: f64) -> SpaceTimeField {
    let mut field = SpaceTimeField::zeros(grid);
    let interior: Vec<usize> = grid.interior().collect();
    for n in 0..grid.n_levels() {
        let level = field.level_mut(n);
        for &k in &interior {
            level[k] = value;
        }
    }
    field
}

/// Rounding floor of `√(2E)`: second differences of `y` over `dt²` lose
/// about `eps·max|y|/dt²` per node.
pub(crate) fn noise_floor(problem: &LsProblem, y: &SpaceTimeField) -> f64 {
    let grid = &problem.grid;
    let dt = grid.dt();
    let qt = grid.domain().measure() * grid.t_final();
    10.0 * f64::EPSILON * y.max_abs().max(1.0) / (dt * dt) * qt.sqrt()
}

/// Per-iterate quantities shared by all methods.
pub(crate) fn base_record(problem: &LsProblem, state: &LsState, e: f64, m_run: &mut f64, started: Instant) -> IterateRecord {
    let y_l1 = linf_l1(&state.y);
    *m_run = m_run.max(y_l1);
    let (init_defect, terminal_defect) = state.membership_defects(problem);
    IterateRecord {
        k: state.k,
        e,
        sqrt_e: e.sqrt(),
        lambda: None,
        lambda_tilde: None,
        f1_norm: None,
        y1_linf_v: None,
        y_linf_l1: y_l1,
        gprime_linf_ld: gprime_norm(problem, &state.y),
        inner_defect: None,
        cg_iterations: None,
        inner_converged: None,
        init_defect,
        terminal_defect,
        m_run: *m_run,
        step_norm: None,
        control_norm: crate::wave::norms::l2_q(&state.f, &problem.region),
        wall_time: started.elapsed().as_secs_f64(),
    }
}

fn is_solver_failure(e: &Error) -> bool {
    matches!(e, Error::Blowup { .. } | Error::CgBreakdown { .. })
}

/// The damped Newton least-squares iteration
/// `(y_{k+1}, f_{k+1}) = (y_k, f_k) − λ_k (Y¹_k, F¹_k)` with
/// `λ_k = argmin_{[0, m]} E`, from the configured initialization.
pub fn ls_solve(problem: &LsProblem, config: &LsConfig) -> Result<LsOutcome> {
    config.validate()?;
    let started = Instant::now();
    let state = initialize(problem, config.init)?;
    let method = if config.force_unit_step { MethodTag::NewtonClassic } else { MethodTag::LeastSquares };
    run_from(problem, config, state, method, started)
}

pub(crate) fn run_from(
    problem: &LsProblem,
    config: &LsConfig,
    mut state: LsState,
    method: MethodTag,
    started: Instant,
) -> Result<LsOutcome> {
    let g = &problem.nonlinearity;
    let s = g.holder_exponent();
    let mut records = Vec::new();
    let mut m_run = 0.0_f64;
    let mut geometric_condition = None;

    let mut r = residual(problem, &state)?;
    let mut e = 0.5 * l2_qt_sq(&r);
    let threshold = config.tol * (2.0 * e).sqrt();

    let status = loop {
        let mut rec = base_record(problem, &state, e, &mut m_run, started);
        if !e.is_finite() || rec.y_linf_l1 > DIVERGENCE_THRESHOLD {
            records.push(rec);
            break Status::Diverged;
        }
        let floor = noise_floor(problem, &state.y);
        if (2.0 * e).sqrt() <= threshold.max(floor) {
            records.push(rec);
            break Status::Converged;
        }
        if state.k >= config.max_iter {
            records.push(rec);
            break Status::CapReached;
        }
        let descent = match descent_from_residual(problem, &state, r) {
            Ok(d) => d,
            Err(err) if is_solver_failure(&err) => {
                log::warn!("inner solve failed at k = {}: {err}", state.k);
                records.push(rec);
                break Status::InnerFailure;
            }
            Err(err) => return Err(err),
        };
        geometric_condition = descent.report.geometric_condition;
        if !descent.report.converged {
            log::warn!(
                "inner CG hit its cap at k = {} (terminal defect {:e}); using the best iterate",
                state.k,
                descent.report.terminal_defect
            );
        }
        let trial = |lam: f64| compute_e(problem, &state.stepped(lam, &descent.dy, &descent.df));
        let lambda = if config.force_unit_step {
            1.0
        } else {
            let ls = line_search(trial, e, config.m, &config.line_search)?;
            if ls.stagnated {
                records.push(rec);
                break Status::Stagnated;
            }
            ls.lambda
        };

        rec.lambda = Some(lambda);
        rec.lambda_tilde = g.seminorm().map(|sem| {
            let cy = c_of(config.diag_c, s, sem, d_of(config.diag_c, rec.gprime_linf_ld));
            analytic_lambda(e, cy, s).unwrap_or(f64::NAN)
        });
        rec.f1_norm = Some(descent.report.control_norm);
        rec.y1_linf_v = Some(descent.state_norm());
        rec.inner_defect = Some(descent.report.terminal_defect);
        rec.cg_iterations = Some(descent.report.cg_iterations);
        rec.inner_converged = Some(descent.report.converged);
        rec.step_norm = Some(lambda * linf_l1(&descent.dy));
        records.push(rec);

        state = state.stepped(lambda, &descent.dy, &descent.df);
        r = residual(problem, &state)?;
        e = 0.5 * l2_qt_sq(&r);
        log::info!("{} k = {} √(2E) = {:e} λ = {lambda}", method.as_str(), state.k, (2.0 * e).sqrt());
    };
    Ok(LsOutcome { method, records, state, status, wall_time: started.elapsed().as_secs_f64(), geometric_condition })
}
