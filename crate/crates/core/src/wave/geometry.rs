//! Multiplier-type geometric control condition.
//!
//! `Γ₀ = {x ∈ ∂Ω : (x − x₀)·ν(x) > 0}`; the condition holds when
//! `T > 2 max_{x ∈ Ω̄} |x − x₀|` and `ω` contains a neighborhood of `Γ₀` in Ω.
//! On the interval and the rectangle `(x − x₀)·ν` is constant along each side,
//! so `Γ₀` is a union of whole sides and the maximal distance is attained at a
//! vertex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::wave::grid::Domain;
use crate::wave::region::{ControlRegion, Side};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub holds: bool,
    pub t_min: f64,
    /// Sides forming `Γ₀` (endpoints `Left`/`Right` in 1D).
    pub gamma0: Vec<Side>,
    /// Sides of `Γ₀` that ω fails to cover.
    pub uncovered: Vec<Side>,
    pub time_ok: bool,
}

impl GeometryReport {
    pub fn gamma0_description(&self, domain: Domain) -> String {
        let names: Vec<String> = self
            .gamma0
            .iter()
            .map(|s| match (domain, s) {
                (Domain::Interval { .. }, Side::Left) => "{0}".to_string(),
                (Domain::Interval { length }, Side::Right) => format!("{{{length}}}"),
                (_, s) => format!("{s:?}").to_lowercase(),
            })
            .collect();
        if names.is_empty() {
            "∅".into()
        } else {
            names.join(" ∪ ")
        }
    }
}

fn sides_of(domain: Domain) -> &'static [Side] {
    match domain {
        Domain::Interval { .. } => &[Side::Left, Side::Right],
        Domain::Rectangle { .. } => &Side::ALL,
    }
}

/// `(x − x₀)·ν` on a side (constant along it).
fn normal_component(domain: Domain, side: Side, x0: [f64; 2]) -> f64 {
    let [lx, ly] = domain.extents();
    match side {
        Side::Left => x0[0],
        Side::Right => lx - x0[0],
        Side::Bottom => x0[1],
        Side::Top => ly - x0[1],
    }
}

pub fn gamma0(domain: Domain, x0: [f64; 2]) -> Vec<Side> {
    sides_of(domain).iter().copied().filter(|&s| normal_component(domain, s, x0) > 0.0).collect()
}

/// `2 max_{x ∈ Ω̄} |x − x₀|`.
pub fn minimal_time(domain: Domain, x0: [f64; 2]) -> f64 {
    let [lx, ly] = domain.extents();
    let far = match domain {
        Domain::Interval { .. } => (x0[0]).abs().max((lx - x0[0]).abs()),
        Domain::Rectangle { .. } => [[0.0, 0.0], [lx, 0.0], [0.0, ly], [lx, ly]]
            .iter()
            .map(|c| (c[0] - x0[0]).hypot(c[1] - x0[1]))
            .fold(0.0, f64::max),
    };
    2.0 * far
}

/// Checks the geometric condition for `(Ω, ω, T)` seen from `x0`, which must lie
/// strictly outside `Ω̄`.
pub fn check_geometric_condition(
    domain: Domain,
    region: &ControlRegion,
    t_final: f64,
    x0: [f64; 2],
) -> Result<GeometryReport> {
    let probe = if domain.dim() == 1 { [x0[0], 0.0] } else { x0 };
    if domain.contains_closed(probe) {
        return Err(Error::Precondition(format!("x0 = {x0:?} must lie strictly outside the closed domain")));
    }
    let g0 = gamma0(domain, x0);
    let covered = region.covered_sides(domain);
    let uncovered: Vec<Side> = g0.iter().copied().filter(|s| !covered.contains(s)).collect();
    let t_min = minimal_time(domain, x0);
    let time_ok = t_final > t_min;
    Ok(GeometryReport { holds: time_ok && uncovered.is_empty(), t_min, gamma0: g0, uncovered, time_ok })
}
