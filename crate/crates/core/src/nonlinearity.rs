//! Nonlinearities `g` with their derivative, Hölder data and growth checks.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Below this magnitude `ĝ(r)` switches to its Taylor value.
pub const HAT_G_SWITCH: f64 = 1e-8;

/// Below this magnitude the `loglimit` derivative uses its series expansion.
const LOGLIMIT_SERIES: f64 = 1e-6;

#[derive(Clone)]
enum Kind {
    Zero,
    Linear { b: f64 },
    LipschitzSat { kappa: f64 },
    LogLimit { a: f64, b: f64, c: f64 },
    CubicSat { radius: f64 },
    Custom { g: ScalarFn, dg: ScalarFn },
}

/// A nonlinearity `g` together with `g′`, a Hölder exponent `s` for `g′`,
/// the seminorm `[g′]_s` when known in closed form, and growth parameters
/// `(α, β)` with `|g′(r)| ≤ α + β ln^{1/2}(1 + |r|)` when known.
#[derive(Clone)]
pub struct Nonlinearity {
    name: String,
    kind: Kind,
    holder_exponent: f64,
    seminorm: Option<f64>,
    growth: Option<(f64, f64)>,
    g0: f64,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("s", &self.holder_exponent)
            .field("seminorm", &self.seminorm)
            .field("growth", &self.growth)
            .finish()
    }
}

/// Builds a parameter map from `(name, value)` pairs.
pub fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn take(params: &BTreeMap<String, f64>, allowed: &[(&str, f64)], name: &str) -> Result<Vec<f64>> {
    if let Some(k) = params.keys().find(|k| !allowed.iter().any(|(a, _)| a == k)) {
        return Err(Error::Config(format!("nonlinearity `{name}` has no parameter `{k}`")));
    }
    Ok(allowed.iter().map(|(k, d)| params.get(*k).copied().unwrap_or(*d)).collect())
}

impl Nonlinearity {
    pub fn zero() -> Self {
        Nonlinearity::from_kind("zero", Kind::Zero, 1.0, Some(0.0), Some((0.0, 0.0)))
    }

    pub fn linear(b: f64) -> Self {
        Nonlinearity::from_kind("linear", Kind::Linear { b }, 1.0, Some(0.0), Some((b.abs(), 0.0)))
    }

    /// Named builtin: `zero`, `linear {b}`, `lipschitz_sat {kappa}`,
    /// `loglimit {a, b, c}` or `cubic_sat {radius}`.
    pub fn builtin(name: &str, p: &BTreeMap<String, f64>) -> Result<Self> {
        match name {
            "zero" => {
                take(p, &[], name)?;
                Ok(Nonlinearity::zero())
            }
            "linear" => {
                let v = take(p, &[("b", 1.0)], name)?;
                Ok(Nonlinearity::linear(v[0]))
            }
            "lipschitz_sat" => {
                let kappa = take(p, &[("kappa", 1.0)], name)?[0];
                // sup |tanh''| = 4 / (3√3), reached where tanh² = 1/3
                let seminorm = kappa.abs() * 4.0 / (3.0 * 3f64.sqrt());
                Ok(Nonlinearity::from_kind(name, Kind::LipschitzSat { kappa }, 1.0, Some(seminorm), Some((kappa.abs(), 0.0))))
            }
            "loglimit" => {
                let v = take(p, &[("a", 0.0), ("b", 0.0), ("c", 1.0)], name)?;
                let (a, b, c) = (v[0], v[1], v[2]);
                // g′ − b ~ (3c/2)|r|^{1/2} at the origin, so s = 1/2; the
                // second derivative term u/(2(1+u)ln^{1/2}(1+u)) peaks below 0.32.
                let growth = (b.abs() + 0.5 * c.abs(), c.abs());
                Ok(Nonlinearity::from_kind(name, Kind::LogLimit { a, b, c }, 0.5, None, Some(growth)))
            }
            "cubic_sat" => {
                let radius = take(p, &[("radius", 50.0)], name)?[0];
                if !(radius > 0.0) {
                    return Err(Error::Config("cubic_sat radius must be positive".into()));
                }
                // g″ = 6r up to R, then decreases linearly to 0 at 1.2R
                let growth = (3.6 * radius * radius, 0.0);
                Ok(Nonlinearity::from_kind(name, Kind::CubicSat { radius }, 1.0, Some(6.0 * radius), Some(growth)))
            }
            other => Err(Error::UnknownNonlinearity(other.to_string())),
        }
    }

    /// User-supplied `g` and `g′`.
    pub fn custom(
        name: &str,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64) -> f64 + Send + Sync + 'static,
        holder_exponent: f64,
        seminorm: Option<f64>,
    ) -> Self {
        Nonlinearity::from_kind(name, Kind::Custom { g: Arc::new(g), dg: Arc::new(dg) }, holder_exponent, seminorm, None)
    }

    fn from_kind(name: &str, kind: Kind, s: f64, seminorm: Option<f64>, growth: Option<(f64, f64)>) -> Self {
        let mut out = Nonlinearity { name: name.to_string(), kind, holder_exponent: s, seminorm, growth, g0: 0.0 };
        out.g0 = out.eval(0.0);
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    /// Declared `[g′]_s`, `None` when no closed form is known.
    pub fn seminorm(&self) -> Option<f64> {
        self.seminorm
    }

    /// Declared `(α, β)`, `None` when unknown.
    pub fn growth(&self) -> Option<(f64, f64)> {
        self.growth
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    /// True when `g′` is constant, i.e. the equation is linear.
    pub fn is_affine(&self) -> bool {
        matches!(self.kind, Kind::Zero | Kind::Linear { .. })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Linear { b } => b * r,
            Kind::LipschitzSat { kappa } => kappa * r.tanh(),
            Kind::LogLimit { a, b, c } => a + b * r + c * r * r.abs().ln_1p().sqrt(),
            Kind::CubicSat { radius } => cubic_sat(*radius, r).0,
            Kind::Custom { g, .. } => g(r),
        }
    }

    pub fn deriv(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Linear { b } => *b,
            Kind::LipschitzSat { kappa } => {
                let c = r.cosh();
                kappa / (c * c)
            }
            Kind::LogLimit { b, c, .. } => {
                let u = r.abs();
                if u < LOGLIMIT_SERIES {
                    // √ln(1+u) + u/(2(1+u)√ln(1+u)) = √u (3/2 − 5u/8) + O(u^{5/2})
                    b + c * u.sqrt() * (1.5 - 0.625 * u)
                } else {
                    let l = u.ln_1p().sqrt();
                    b + c * (l + u / (2.0 * (1.0 + u) * l))
                }
            }
            Kind::CubicSat { radius } => cubic_sat(*radius, r).1,
            Kind::Custom { dg, .. } => dg(r),
        }
    }

    /// `ĝ(r) = (g(r) − g(0))/r`, with `ĝ(0) = g′(0)`.
    pub fn hat(&self, r: f64) -> f64 {
        match self.kind {
            Kind::Zero => return 0.0,
            Kind::Linear { b } => return b,
            _ => {}
        }
        if r.abs() >= HAT_G_SWITCH {
            (self.eval(r) - self.g0) / r
        } else {
            // mean of g′ over [0, r] by the midpoint rule
            self.deriv(0.5 * r)
        }
    }
}

/// Odd extension of `r³` with a C¹ blend of `g′` on `[R, 1.2R]` to the constant
/// slope `3.6R²` beyond.
fn cubic_sat(radius: f64, r: f64) -> (f64, f64) {
    let (sign, u) = (r.signum(), r.abs());
    let r2 = radius * radius;
    let h = 0.2 * radius;
    if u <= radius {
        (r * r * r, 3.0 * u * u)
    } else if u <= 1.2 * radius {
        let t = (u - radius) / h;
        // g′ = 3R² + 1.2R² t − 0.6R² t² is the cubic Hermite interpolant of
        // (3R², 6R) → (3.6R², 0); integrate it for g.
        let dg = r2 * (3.0 + 1.2 * t - 0.6 * t * t);
        let g = radius * r2 + h * r2 * (3.0 * t + 0.6 * t * t - 0.2 * t * t * t);
        (sign * g, dg)
    } else {
        let g = 1.68 * radius * r2 + 3.6 * r2 * (u - 1.2 * radius);
        (sign * g, 3.6 * r2)
    }
}

/// Lower bound for `[g′]_s = sup |g′(a) − g′(b)| / |a − b|^s` from sampled
/// pairs in `[−R, R]`: near-diagonal neighbours, geometric offsets and
/// mirrored far pairs.
pub fn holder_seminorm_sample(g: &Nonlinearity, s: f64, range: f64, n_samples: usize) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::Precondition("holder_seminorm_sample needs at least 2 samples".into()));
    }
    let pts: Vec<f64> = (0..n_samples).map(|i| -range + 2.0 * range * i as f64 / (n_samples - 1) as f64).collect();
    let d: Vec<f64> = pts.iter().map(|&r| g.deriv(r)).collect();
    let quotient = |i: usize, j: usize| {
        let dist = (pts[j] - pts[i]).abs();
        if dist == 0.0 {
            0.0
        } else {
            (d[j] - d[i]).abs() / dist.powf(s)
        }
    };
    let mut best = 0.0_f64;
    let mut step = 1;
    while step < n_samples {
        for i in 0..n_samples - step {
            best = best.max(quotient(i, i + step));
        }
        step *= 2;
    }
    for i in 0..n_samples / 2 {
        best = best.max(quotient(i, n_samples - 1 - i));
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub holds: bool,
    /// First sampled `r` (in order of increasing `|r|`) violating the bound.
    pub witness: Option<f64>,
}

/// Samples `|g′(r)| ≤ α + β ln^{1/2}(1 + |r|)` on `[−R, R]` by increasing `|r|`.
pub fn check_growth_h2(g: &Nonlinearity, alpha: f64, beta: f64, range: f64, n: usize) -> Result<GrowthCheck> {
    if alpha < 0.0 || beta < 0.0 {
        return Err(Error::Precondition("growth parameters must be nonnegative".into()));
    }
    let n = n.max(2);
    for i in 0..n {
        let u = range * i as f64 / (n - 1) as f64;
        let bound = alpha + beta * u.ln_1p().sqrt();
        for r in [u, -u] {
            if g.deriv(r).abs() > bound {
                return Ok(GrowthCheck { holds: false, witness: Some(r) });
            }
        }
    }
    Ok(GrowthCheck { holds: true, witness: None })
}

/// Growth threshold `β*(s) = sqrt(s / (2C(2s + 1)))`.
pub fn beta_star(s: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Precondition(format!("β* needs C > 0, got {c}")));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Precondition(format!("β* needs s in [0, 1], got {s}")));
    }
    Ok((s / (2.0 * c * (2.0 * s + 1.0))).sqrt())
}
