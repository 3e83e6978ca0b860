//! Discrete norms: trapezoidal quadrature in space and time, spectral
//! `H¹₀` / `H⁻¹` through the sine basis. Sums run sequentially in node order
//! so results are reproducible bit-for-bit.

use crate::wave::field::{SpaceTimeField, StatePair};
use crate::wave::region::ControlRegion;
use crate::wave::spectral::SineBasis;

/// `‖v‖_{L²(Q_T)}`.
pub fn l2_qt(field: &SpaceTimeField) -> f64 {
    l2_qt_sq(field).sqrt()
}

pub fn l2_qt_sq(field: &SpaceTimeField) -> f64 {
    let grid = field.grid();
    let mut s = 0.0;
    for n in 0..grid.n_levels() {
        let wt = grid.time_weight(n);
        let level = field.level(n);
        let mut ls = 0.0;
        for (node, v) in level.iter().enumerate() {
            ls += grid.space_weight(node) * v * v;
        }
        s += wt * ls;
    }
    s
}

/// `‖v‖_{L²(q_T)}`: the `L²(Q_T)` norm restricted to the support of `χ_ω`.
pub fn l2_q(field: &SpaceTimeField, region: &ControlRegion) -> f64 {
    let grid = field.grid();
    let support: Vec<usize> = region.support().collect();
    let mut s = 0.0;
    for n in 0..grid.n_levels() {
        let level = field.level(n);
        let mut ls = 0.0;
        for &node in &support {
            ls += grid.space_weight(node) * level[node] * level[node];
        }
        s += grid.time_weight(n) * ls;
    }
    s.sqrt()
}

/// `‖v(·, t_n)‖_{L^p(Ω)}` for each level.
pub fn lp_per_level(field: &SpaceTimeField, p: f64) -> Vec<f64> {
    let grid = field.grid();
    (0..grid.n_levels())
        .map(|n| {
            let s: f64 = field.level(n).iter().enumerate().map(|(k, v)| grid.space_weight(k) * v.abs().powf(p)).sum();
            s.powf(1.0 / p)
        })
        .collect()
}

/// `‖v‖_{L^∞(0,T;L^p(Ω))}`.
pub fn linf_lp(field: &SpaceTimeField, p: f64) -> f64 {
    lp_per_level(field, p).into_iter().fold(0.0, f64::max)
}

/// `‖v‖_{L^∞(0,T;L¹(Ω))}`.
pub fn linf_l1(field: &SpaceTimeField) -> f64 {
    linf_lp(field, 1.0)
}

/// `‖v‖_{L^∞(0,T;H¹₀(Ω))}` with the spectral gradient norm.
pub fn linf_h1(field: &SpaceTimeField) -> f64 {
    let grid = field.grid();
    let basis = SineBasis::for_grid(grid);
    (0..grid.n_levels()).map(|n| basis.h1_sq(field.level(n)).sqrt()).fold(0.0, f64::max)
}

/// `‖(v, ∂_t v)‖_{L^∞(0,T;V)}` with centered time differences (one-sided at the ends).
pub fn linf_v(field: &SpaceTimeField) -> f64 {
    let grid = field.grid();
    let basis = SineBasis::for_grid(grid);
    let nt = grid.nt();
    let dt = grid.dt();
    let ns = grid.n_space();
    let mut best = 0.0_f64;
    let mut vel = vec![0.0; ns];
    for n in 0..=nt {
        let (a, b, scale) = match n {
            0 => (field.level(0), field.level(1), dt),
            _ if n == nt => (field.level(nt - 1), field.level(nt), dt),
            _ => (field.level(n - 1), field.level(n + 1), 2.0 * dt),
        };
        for k in 0..ns {
            vel[k] = (b[k] - a[k]) / scale;
        }
        let kin: f64 = vel.iter().enumerate().map(|(k, v)| grid.space_weight(k) * v * v).sum();
        best = best.max((basis.h1_sq(field.level(n)) + kin).sqrt());
    }
    best
}

/// `‖v‖_{L²(Ω)}` of a single nodal vector.
pub fn l2_space(grid: &crate::wave::grid::SpaceTimeGrid, v: &[f64]) -> f64 {
    v.iter().enumerate().map(|(k, x)| grid.space_weight(k) * x * x).sum::<f64>().sqrt()
}

impl StatePair {
    /// `‖(p, v)‖_V = (‖∇p‖² + ‖v‖²)^{1/2}`, the norm of `H¹₀ x L²`.
    pub fn v_norm(&self) -> f64 {
        let basis = SineBasis::for_grid(self.grid());
        let l2v = l2_space(self.grid(), self.velocity());
        (basis.h1_sq(self.position()) + l2v * l2v).sqrt()
    }

    /// `‖(p, v)‖_H = (‖p‖² + ‖v‖²_{H⁻¹})^{1/2}`, the norm of `L² x H⁻¹`.
    pub fn h_norm(&self) -> f64 {
        let basis = SineBasis::for_grid(self.grid());
        let l2p = l2_space(self.grid(), self.position());
        (l2p * l2p + basis.h_minus1_sq(self.velocity())).sqrt()
    }
}

/// All field norms at once, for reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldNorms {
    pub l2_qt: f64,
    pub l2_q: f64,
    pub linf_l1: f64,
    pub linf_l2: f64,
    pub linf_h1: f64,
}

impl FieldNorms {
    pub fn of(field: &SpaceTimeField, region: &ControlRegion) -> Self {
        FieldNorms {
            l2_qt: l2_qt(field),
            l2_q: l2_q(field, region),
            linf_l1: linf_l1(field),
            linf_l2: linf_lp(field, 2.0),
            linf_h1: linf_h1(field),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::grid::{Domain, SpaceTimeGrid};
    use crate::wave::region::RegionShape;
    use std::f64::consts::{PI, SQRT_2};

    fn grid() -> SpaceTimeGrid {
        SpaceTimeGrid::new(Domain::Interval { length: 1.0 }, &[101], 200, 1.0).unwrap()
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = grid();
        let r = ControlRegion::new(&g, RegionShape::Interval { a: 0.2, b: 0.4 }).unwrap();
        let n = FieldNorms::of(&SpaceTimeField::zeros(&g), &r);
        assert_eq!(n, FieldNorms { l2_qt: 0.0, l2_q: 0.0, linf_l1: 0.0, linf_l2: 0.0, linf_h1: 0.0 });
        let z = StatePair::zeros(&g);
        assert_eq!(z.v_norm(), 0.0);
        assert_eq!(z.h_norm(), 0.0);
    }

    #[test]
    fn constant_field_unit_measure() {
        let g = grid();
        let one = SpaceTimeField::constant(&g, 1.0);
        assert!((l2_qt(&one) - 1.0).abs() < 1e-12);
        assert!((linf_l1(&one) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sine_mode_closed_forms() {
        let g = grid();
        let s = StatePair::from_fns(&g, |x| (PI * x[0]).sin(), |x| (PI * x[0]).sin());
        let l2 = l2_space(&g, s.position());
        assert!((l2 - 1.0 / SQRT_2).abs() < 1e-12);
        let basis = SineBasis::for_grid(&g);
        let hm1 = basis.h_minus1_sq(s.velocity()).sqrt();
        assert!((hm1 - 1.0 / (PI * SQRT_2)).abs() < 1e-12);
        let h1 = basis.h1_sq(s.position()).sqrt();
        assert!((h1 - PI / SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_under_scaling() {
        let g = grid();
        let f = SpaceTimeField::from_fn(&g, |x, t| (3.0 * x[0]).sin() * (1.0 + t));
        let r = ControlRegion::new(&g, RegionShape::Interval { a: 0.5, b: 1.0 }).unwrap();
        let a = FieldNorms::of(&f, &r);
        let b = FieldNorms::of(&f.scaled(-2.5), &r);
        for (x, y) in [(a.l2_qt, b.l2_qt), (a.l2_q, b.l2_q), (a.linf_l1, b.linf_l1), (a.linf_h1, b.linf_h1)] {
            assert!((2.5 * x - y).abs() <= 1e-12 * y.max(1.0));
        }
    }
}
