mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use wavectl::nonlinearity::Nonlinearity;
use wavectl::wave::geometry::minimal_time;
use wavectl::wave::norms::{l2_qt, linf_l1};
use wavectl::wave::solver::discrete_energy;
use wavectl::wave::*;

use common::*;

/// Max-norm error of the leapfrog solution against `exact` over every node and level.
fn max_error(grid: &SpaceTimeGrid, y: &SpaceTimeField, exact: impl Fn([f64; 2], f64) -> f64) -> f64 {
    let mut err = 0.0_f64;
    for n in 0..grid.n_levels() {
        for k in 0..grid.n_space() {
            err = err.max((y.get(n, k) - exact(grid.coords(k), grid.time(n))).abs());
        }
    }
    err
}

fn eigenmode_error(nx: usize, nt: usize) -> f64 {
    let grid = SpaceTimeGrid::new(UNIT, &[nx], nt, 2.0).unwrap();
    let zero = SpaceTimeField::zeros(&grid);
    let y = solve_forward(&grid, &zero, &zero, &sine_data(&grid, 1.0)).unwrap().field;
    max_error(&grid, &y, |x, t| (PI * x[0]).sin() * (PI * t).cos())
}

#[test]
fn eigenmode_error_ratio_is_second_order() {
    let coarse = eigenmode_error(51, 125);
    let fine = eigenmode_error(101, 250);
    let ratio = coarse / fine;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} (errors {coarse:e}, {fine:e})");
}

fn manufactured_error(nx: usize, nt: usize) -> f64 {
    // y* = sin(πx) sin t with A = 1, so y*_tt − Δy* + y* = π² sin(πx) sin t
    let grid = SpaceTimeGrid::new(UNIT, &[nx], nt, 2.0).unwrap();
    let a = SpaceTimeField::constant(&grid, 1.0);
    let source = SpaceTimeField::from_fn(&grid, |x, t| PI * PI * (PI * x[0]).sin() * t.sin());
    let init = StatePair::from_fns(&grid, |_| 0.0, |x| (PI * x[0]).sin());
    let y = solve_forward(&grid, &a, &source, &init).unwrap().field;
    max_error(&grid, &y, |x, t| (PI * x[0]).sin() * t.sin())
}

#[test]
fn manufactured_solution_with_potential() {
    let ratio = manufactured_error(51, 125) / manufactured_error(101, 250);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn backward_is_time_reversed_forward() {
    let grid = SpaceTimeGrid::new(UNIT, &[60], 180, 2.5).unwrap();
    let a = SpaceTimeField::from_fn(&grid, |x, t| 1.0 + x[0] * (3.0 * t).cos());
    let terminal = StatePair::from_fns(&grid, |x| x[0] * (1.0 - x[0]), |x| (2.0 * PI * x[0]).sin());
    let back = solve_backward(&grid, &a, &terminal).unwrap();
    let flipped = StatePair::new(
        &grid,
        terminal.position().to_vec(),
        terminal.velocity().iter().map(|v| -v).collect(),
    )
    .unwrap();
    let zero = SpaceTimeField::zeros(&grid);
    let fwd = solve_forward(&grid, &a.reversed_in_time(), &zero, &flipped).unwrap().field;
    assert_eq!(back.values(), fwd.reversed_in_time().values());
}

#[test]
fn backward_eigenmode_closed_form() {
    let grid = SpaceTimeGrid::new(UNIT, &[101], 250, 2.0).unwrap();
    let zero = SpaceTimeField::zeros(&grid);
    let phi = solve_backward(&grid, &zero, &sine_data(&grid, 1.0)).unwrap();
    let err = max_error(&grid, &phi, |x, t| (PI * x[0]).sin() * (PI * (2.0 - t)).cos());
    assert!(err < 1e-3, "{err}");
}

#[test]
fn energy_drift_below_one_percent() {
    let grid = desk_grid();
    let zero = SpaceTimeField::zeros(&grid);
    let init = StatePair::from_fns(&grid, |x| (PI * x[0]).sin() + 0.3 * (3.0 * PI * x[0]).sin(), |x| (2.0 * PI * x[0]).sin());
    let y = solve_forward(&grid, &zero, &zero, &init).unwrap().field;
    let energy = discrete_energy(&y);
    let e0 = energy[0];
    let drift = energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 0.01 * e0, "drift {drift} of {e0}");
}

#[test]
fn zero_data_zero_solution_in_2d() {
    let grid = SpaceTimeGrid::new(Domain::Rectangle { lx: 1.0, ly: 1.0 }, &[40, 40], 120, 2.0).unwrap();
    let zero = SpaceTimeField::zeros(&grid);
    let y = solve_forward(&grid, &zero, &zero, &StatePair::zeros(&grid)).unwrap().field;
    assert_eq!(y.max_abs(), 0.0);
}

#[test]
fn two_dimensional_eigenmode_smoke() {
    let grid = SpaceTimeGrid::new(Domain::Rectangle { lx: 1.0, ly: 1.0 }, &[40, 40], 120, 2.0).unwrap();
    let zero = SpaceTimeField::zeros(&grid);
    let init = StatePair::from_fns(&grid, |x| (PI * x[0]).sin() * (PI * x[1]).sin(), |_| 0.0);
    let y = solve_forward(&grid, &zero, &zero, &init).unwrap().field;
    let w = PI * 2f64.sqrt();
    let err = max_error(&grid, &y, |x, t| (PI * x[0]).sin() * (PI * x[1]).sin() * (w * t).cos());
    assert!(err < 5e-3, "{err}");
}

#[test]
fn square_geometry_from_lower_left() {
    let grid = SpaceTimeGrid::new(Domain::Rectangle { lx: 1.0, ly: 1.0 }, &[40, 40], 240, 4.0).unwrap();
    let region = ControlRegion::new(&grid, RegionShape::SideNeighborhood { sides: vec![Side::Top, Side::Right], width: 0.1 })
        .unwrap();
    let x0 = [-0.2, -0.2];
    let t_min = 2.0 * (1.2f64 * 1.2 + 1.2 * 1.2).sqrt();
    assert!((minimal_time(grid.domain(), x0) - t_min).abs() < 1e-14);
    let report = check_geometric_condition(grid.domain(), &region, 4.0, x0).unwrap();
    assert_eq!(report.gamma0, vec![Side::Right, Side::Top]);
    assert!(report.holds);
    assert!(!check_geometric_condition(grid.domain(), &region, 3.3, x0).unwrap().holds);
}

#[test]
fn field_dumps_have_documented_layout() {
    let grid = SpaceTimeGrid::new(UNIT, &[5], 5, 1.0).unwrap();
    let f = SpaceTimeField::from_fn(&grid, |x, t| x[0] + 10.0 * t);
    let mut bin = Vec::new();
    f.write_binary(&mut bin).unwrap();
    assert_eq!(bin.len(), 8 * grid.n_space() * grid.n_levels());
    let third = f64::from_le_bytes(bin[16..24].try_into().unwrap());
    assert_eq!(third, f.get(0, 2));
    let mut csv = Vec::new();
    f.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + grid.n_space() * grid.n_levels());
    assert!(text.starts_with("level,node,x,y,t,value\n0,0,"));
}

fn small_grid() -> SpaceTimeGrid {
    SpaceTimeGrid::new(UNIT, &[30], 80, 2.0).unwrap()
}

fn modal_pair(grid: &SpaceTimeGrid, c: &[f64]) -> StatePair {
    StatePair::from_fns(
        grid,
        |x| c[0] * (PI * x[0]).sin() + c[1] * (2.0 * PI * x[0]).sin(),
        |x| c[2] * (PI * x[0]).sin() + c[3] * (3.0 * PI * x[0]).sin(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_solve_is_linear(
        alpha in -3.0..3.0f64,
        beta in -3.0..3.0f64,
        cu in prop::collection::vec(-1.0..1.0f64, 4),
        cv in prop::collection::vec(-1.0..1.0f64, 4),
        a0 in 0.0..5.0f64,
    ) {
        let grid = small_grid();
        let a = SpaceTimeField::from_fn(&grid, |x, t| a0 * (1.0 + x[0] * t));
        let zero = SpaceTimeField::zeros(&grid);
        let (u, v) = (modal_pair(&grid, &cu), modal_pair(&grid, &cv));
        let combo = u.scaled(alpha).add_scaled(beta, &v);
        let lhs = solve_forward(&grid, &a, &zero, &combo).unwrap().field;
        let yu = solve_forward(&grid, &a, &zero, &u).unwrap().field;
        let yv = solve_forward(&grid, &a, &zero, &v).unwrap().field;
        let rhs = yu.scaled(alpha).add_scaled(beta, &yv);
        let scale = 1.0 + lhs.max_abs();
        prop_assert!(lhs.add_scaled(-1.0, &rhs).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn residual_of_a_solve_vanishes(
        b in -4.0..4.0f64,
        amp in -2.0..2.0f64,
        cu in prop::collection::vec(-1.0..1.0f64, 4),
        w in 0.5..6.0f64,
    ) {
        // the solve uses potential b, the residual adds g(y) = b·y, so S − b y + g(y) − fχ = 0
        let grid = small_grid();
        let region = ControlRegion::new(&grid, RegionShape::Interval { a: 0.6, b: 1.0 }).unwrap();
        let f = SpaceTimeField::from_fn(&grid, |x, t| amp * (w * t).sin() * x[0]);
        let source = f.mul_spatial(region.weights());
        let init = modal_pair(&grid, &cu);
        let y = solve_forward(&grid, &SpaceTimeField::constant(&grid, b), &source, &init).unwrap().field;
        let r = residual_field(&y, &f, &Nonlinearity::linear(b), &region, init.velocity()).unwrap();
        let scale = 1.0 + y.max_abs() / (grid.dt() * grid.dt());
        prop_assert!(r.max_abs() <= 1e-13 * scale, "{} vs {}", r.max_abs(), scale);
    }

    #[test]
    fn norms_are_homogeneous(c in -5.0..5.0f64, cu in prop::collection::vec(-1.0..1.0f64, 4)) {
        let grid = small_grid();
        let pair = modal_pair(&grid, &cu);
        let f = SpaceTimeField::from_fn(&grid, |x, t| cu[0] * x[0] + cu[1] * t);
        prop_assert!(rel(l2_qt(&f.scaled(c)), c.abs() * l2_qt(&f)) < 1e-12 || l2_qt(&f) == 0.0);
        prop_assert!(rel(linf_l1(&f.scaled(c)), c.abs() * linf_l1(&f)) < 1e-12 || linf_l1(&f) == 0.0);
        prop_assert!(rel(pair.scaled(c).v_norm(), c.abs() * pair.v_norm()) < 1e-12);
        prop_assert!(rel(pair.scaled(c).h_norm(), c.abs() * pair.h_norm()) < 1e-12);
    }
}
