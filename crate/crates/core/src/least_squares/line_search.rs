use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSearchConfig {
    /// Uniform scan points on `[0, m]`, endpoints included.
    pub scan_points: usize,
    /// Golden-section stops once the bracket is narrower than this, relative to its center.
    pub rel_width: f64,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        LineSearchConfig { scan_points: 33, rel_width: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchOutcome {
    pub lambda: f64,
    pub e: f64,
    /// Nothing on `(0, m]` improved on `λ = 0`.
    pub stagnated: bool,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Approximate argmin of `λ ↦ E(λ)` on `[0, m]` given `e0 = E(0)`.
///
/// A uniform scan locates the best sample; golden-section refines inside its
/// neighbours. The returned value is never worse than the best scanned sample.
pub fn line_search(
    mut energy: impl FnMut(f64) -> Result<f64>,
    e0: f64,
    m: f64,
    cfg: &LineSearchConfig,
) -> Result<LineSearchOutcome> {
    if !(m >= 1.0) {
        return Err(Error::Precondition(format!("line search needs m ≥ 1, got {m}")));
    }
    if cfg.scan_points < 3 {
        return Err(Error::Precondition("line search needs at least 3 scan points".into()));
    }
    if e0 == 0.0 {
        return Ok(LineSearchOutcome { lambda: 0.0, e: 0.0, stagnated: false, evaluations: 0 });
    }
    let n = cfg.scan_points - 1;
    let mut evaluations = 0;
    let mut eval = |lam: f64, evaluations: &mut usize| -> Result<f64> {
        *evaluations += 1;
        let e = energy(lam)?;
        Ok(if e.is_nan() { f64::INFINITY } else { e })
    };

    let mut samples = Vec::with_capacity(n + 1);
    samples.push((0.0, e0));
    for i in 1..=n {
        let lam = m * i as f64 / n as f64;
        samples.push((lam, eval(lam, &mut evaluations)?));
    }
    let (best_i, &(mut best_l, mut best_e)) = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
        .expect("nonempty scan");

    let mut a = samples[best_i.saturating_sub(1)].0;
    let mut b = samples[(best_i + 1).min(n)].0;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evaluations)?;
    let mut fd = eval(d, &mut evaluations)?;
    loop {
        for (l, e) in [(c, fc), (d, fd)] {
            if e < best_e {
                best_l = l;
                best_e = e;
            }
        }
        let center = 0.5 * (a + b);
        if b - a <= cfg.rel_width * center.max(cfg.rel_width) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evaluations)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evaluations)?;
        }
    }
    let stagnated = best_l == 0.0 || !(best_e < e0);
    Ok(LineSearchOutcome { lambda: best_l, e: best_e, stagnated, evaluations })
}
