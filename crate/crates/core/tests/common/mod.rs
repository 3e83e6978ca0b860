#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use wavectl::least_squares::LsProblem;
use wavectl::nonlinearity::{params, Nonlinearity};
use wavectl::wave::{ControlRegion, Domain, RegionShape, SpaceTimeGrid, StatePair};

pub const UNIT: Domain = Domain::Interval { length: 1.0 };

/// The desk-scale 1D scenario: nx = 200, nt = 600, T = 2.5, ω = (0.8, 1).
pub fn desk_grid() -> SpaceTimeGrid {
    SpaceTimeGrid::new(UNIT, &[200], 600, 2.5).unwrap()
}

pub fn right_region(grid: &SpaceTimeGrid) -> ControlRegion {
    ControlRegion::new(grid, RegionShape::Interval { a: 0.8, b: 1.0 }).unwrap()
}

pub fn sine_data(grid: &SpaceTimeGrid, amp: f64) -> StatePair {
    StatePair::from_fns(grid, |x| amp * (PI * x[0]).sin(), |_| 0.0)
}

pub fn desk_problem(g: Nonlinearity, amp: f64) -> LsProblem {
    let grid = desk_grid();
    LsProblem::new(&grid, right_region(&grid), g, sine_data(&grid, amp), StatePair::zeros(&grid)).unwrap()
}

pub fn lipschitz(kappa: f64) -> Nonlinearity {
    Nonlinearity::builtin("lipschitz_sat", &params(&[("kappa", kappa)])).unwrap()
}

pub fn preset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("presets").join(format!("{name}.json"))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
