//! Output files: `iterates.csv`, `summary.json`, `comparison.csv`, `sweep.csv`.
//!
//! Floats are written in Rust's shortest round-trip form and wall-clock times
//! stay out of every CSV, so identical configurations give identical bytes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::least_squares::solve::{IterateRecord, LsOutcome, MethodTag, Status};
use crate::wave::geometry::GeometryReport;
use crate::wave::region::Side;

/// The published schema for `summary.json`.
pub const SUMMARY_SCHEMA: &str = include_str!("../schema/summary.schema.json");

pub const ITERATE_HEADER: [&str; 20] = [
    "config_hash",
    "scenario_id",
    "method",
    "k",
    "e",
    "sqrt_e",
    "lambda",
    "lambda_tilde",
    "f1_norm",
    "y1_linf_v",
    "y_linf_l1",
    "gprime_linf_ld",
    "inner_defect",
    "cg_iterations",
    "inner_converged",
    "init_defect",
    "terminal_defect",
    "m_run",
    "step_norm",
    "control_norm",
];

pub const COMPARISON_HEADER: [&str; 7] =
    ["config_hash", "scenario_id", "method", "iterations", "final_sqrt_2e", "status", "order"];

pub const SWEEP_HEADER: [&str; 11] = [
    "config_hash",
    "parameter",
    "value",
    "method",
    "status",
    "iterations",
    "final_e",
    "final_sqrt_2e",
    "order",
    "max_inner_defect",
    "final_terminal_defect",
];

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

/// One `ReportRow`: a flattened record tagged with method, scenario and config hash.
pub fn report_row(hash: &str, scenario_id: &str, method: MethodTag, r: &IterateRecord) -> Vec<String> {
    vec![
        hash.to_string(),
        scenario_id.to_string(),
        method.as_str().to_string(),
        r.k.to_string(),
        fmt_f64(r.e),
        fmt_f64(r.sqrt_e),
        opt(r.lambda, fmt_f64),
        opt(r.lambda_tilde, fmt_f64),
        opt(r.f1_norm, fmt_f64),
        opt(r.y1_linf_v, fmt_f64),
        fmt_f64(r.y_linf_l1),
        fmt_f64(r.gprime_linf_ld),
        opt(r.inner_defect, fmt_f64),
        opt(r.cg_iterations, |n| n.to_string()),
        opt(r.inner_converged, |b| b.to_string()),
        fmt_f64(r.init_defect),
        fmt_f64(r.terminal_defect),
        fmt_f64(r.m_run),
        opt(r.step_norm, fmt_f64),
        fmt_f64(r.control_norm),
    ]
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_iterates(path: &Path, hash: &str, scenario_id: &str, outcomes: &[LsOutcome]) -> Result<()> {
    let rows = outcomes
        .iter()
        .flat_map(|o| o.records.iter().map(move |r| report_row(hash, scenario_id, o.method, r)));
    write_rows(path, &ITERATE_HEADER, rows)
}

fn order_cell(o: &LsOutcome) -> String {
    o.order().map(|e| fmt_f64(e.order)).unwrap_or_default()
}

pub fn write_comparison(path: &Path, hash: &str, scenario_id: &str, outcomes: &[LsOutcome]) -> Result<()> {
    let rows = outcomes.iter().map(|o| {
        vec![
            hash.to_string(),
            scenario_id.to_string(),
            o.method.as_str().to_string(),
            o.iterations().to_string(),
            fmt_f64((2.0 * o.final_e()).sqrt()),
            o.status.as_str().to_string(),
            order_cell(o),
        ]
    });
    write_rows(path, &COMPARISON_HEADER, rows)
}

/// Results of one sweep point.
pub struct SweepPoint {
    pub value: f64,
    pub outcomes: Vec<LsOutcome>,
}

pub fn write_sweep(path: &Path, hash: &str, parameter: &str, points: &[SweepPoint]) -> Result<()> {
    let rows = points.iter().flat_map(|p| {
        p.outcomes.iter().map(move |o| {
            let max_inner = o.records.iter().filter_map(|r| r.inner_defect).fold(None, |m: Option<f64>, d| {
                Some(m.map_or(d, |m| m.max(d)))
            });
            vec![
                hash.to_string(),
                parameter.to_string(),
                fmt_f64(p.value),
                o.method.as_str().to_string(),
                o.status.as_str().to_string(),
                o.iterations().to_string(),
                fmt_f64(o.final_e()),
                fmt_f64((2.0 * o.final_e()).sqrt()),
                order_cell(o),
                opt(max_inner, fmt_f64),
                opt(o.records.last().map(|r| r.terminal_defect), fmt_f64),
            ]
        })
    });
    write_rows(path, &SWEEP_HEADER, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub holds: bool,
    pub t_min: f64,
    pub time_ok: bool,
    pub gamma0: Vec<Side>,
    pub uncovered: Vec<Side>,
}

impl From<&GeometryReport> for GeometrySummary {
    fn from(g: &GeometryReport) -> Self {
        GeometrySummary {
            holds: g.holds,
            t_min: g.t_min,
            time_ok: g.time_ok,
            gamma0: g.gamma0.clone(),
            uncovered: g.uncovered.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: MethodTag,
    pub status: Status,
    pub iterations: usize,
    pub initial_e: f64,
    pub final_e: f64,
    pub final_sqrt_2e: f64,
    pub order: Option<f64>,
    pub order_fit_residual: Option<f64>,
    pub wall_time: f64,
}

impl From<&LsOutcome> for MethodSummary {
    fn from(o: &LsOutcome) -> Self {
        let order = o.order().ok();
        MethodSummary {
            method: o.method,
            status: o.status,
            iterations: o.iterations(),
            initial_e: o.records.first().map_or(f64::NAN, |r| r.e),
            final_e: o.final_e(),
            final_sqrt_2e: (2.0 * o.final_e()).sqrt(),
            order: order.map(|e| e.order),
            order_fit_residual: order.map(|e| e.fit_residual),
            wall_time: o.wall_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config_hash: String,
    pub scenario_id: String,
    /// `½ T ‖(u₀,u₁) − (z₀,z₁)‖²_V`, a data-driven reference for `E`.
    pub e_scale: f64,
    pub geometry: Option<GeometrySummary>,
    pub methods: Vec<MethodSummary>,
}

impl Summary {
    pub fn new(
        config: &ExperimentConfig,
        e_scale: f64,
        geometry: Option<&GeometryReport>,
        outcomes: &[LsOutcome],
    ) -> Self {
        Summary {
            schema_version: crate::config::SCHEMA_VERSION,
            config_hash: config.hash(),
            scenario_id: config.scenario.id.clone(),
            e_scale,
            geometry: geometry.map(GeometrySummary::from),
            methods: outcomes.iter().map(MethodSummary::from).collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut file, self)?;
        writeln!(file)?;
        Ok(())
    }
}

/// Fixed-width table echoed by `run` and `compare`.
pub fn table(outcomes: &[LsOutcome]) -> String {
    let mut out = format!("{:<15} {:>10} {:>6} {:>14} {:>8}\n", "method", "status", "iters", "sqrt(2E)", "order");
    for o in outcomes {
        let order = o.order().map(|e| format!("{:.3}", e.order)).unwrap_or_else(|_| "-".into());
        out.push_str(&format!(
            "{:<15} {:>10} {:>6} {:>14.6e} {:>8}\n",
            o.method.as_str(),
            o.status.as_str(),
            o.iterations(),
            (2.0 * o.final_e()).sqrt(),
            order
        ));
    }
    out
}
