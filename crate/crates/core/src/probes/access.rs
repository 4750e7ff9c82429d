//! The accessibility functional `dist(c, M) / diam · log_[m](1/diam)` along a parameter ray.

use serde::Serialize;

use crate::angle::AngleRational;
use crate::dynamics::ComplexPoint;
use crate::error::{Error, Result};
use crate::rays::{landing_estimate, parameter_log_derivative, trace_parameter_ray, TraceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccessRow {
    pub t: f64,
    pub c: ComplexPoint,
    /// Quarter-theorem lower estimate `(|Φ|^2 - 1) / (4 |Φ'|)`, so that
    /// `e_u = 4 e_l`. The complement of the set contains infinity, which
    /// costs the certified lower bound a factor `1/|Φ| = e^-t`; the two agree
    /// as `t → 0`.
    pub e_l: f64,
    /// Upper distance bound `(|Φ|^2 - 1) / |Φ'|`.
    pub e_u: f64,
    /// Diameter of the ray tail from `c` down to the landing point.
    pub diam_tail: f64,
    pub arclen_tail: f64,
    pub functional_lo: f64,
    pub functional_hi: f64,
}

/// `log` applied `m` times. `None` when an argument is not positive.
pub fn iterated_log(x: f64, m: usize) -> Option<f64> {
    (0..m).try_fold(x, |v, _| (v > 0.0).then(|| v.ln()))
}

/// Traces the parameter ray at `angle` through `potentials`, estimates its
/// landing point, and evaluates the functional at each requested potential.
pub fn iterated_log_access(
    d: u32,
    angle: &AngleRational,
    potentials: &[f64],
    m: usize,
    cfg: &TraceConfig,
) -> Result<Vec<AccessRow>> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    if potentials.is_empty() {
        return Ok(Vec::new());
    }
    let mut cfg = cfg.clone();
    cfg.t_min = potentials.iter().copied().fold(cfg.t_min, f64::min);
    cfg.required.extend_from_slice(potentials);
    let ray = trace_parameter_ray(d, angle, &cfg)?;
    let landing = landing_estimate(&ray)?.point;
    let inner = ray.samples[ray.len() - 1].offset + (ray.anchor - landing);

    potentials
        .iter()
        .map(|&t| {
            let i = ray
                .samples
                .iter()
                .position(|s| s.t == t)
                .ok_or_else(|| Error::InvalidInput(format!("potential {t:e} outside the traced range")))?;
            let dphi = t.exp() * parameter_log_derivative(&ray, i)?.norm();
            let stretch = (2.0 * t).exp_m1();
            let e_l = stretch / (4.0 * dphi);
            let e_u = stretch / dphi;
            let diam_tail = ray.tail_diameter(i, Some(landing));
            let arclen_tail = ray.arc_to_innermost(i) + inner.norm();
            if diam_tail >= 1.0 {
                return Err(Error::LogDomain(format!("tail diameter {diam_tail} at t = {t:e} is not below 1")));
            }
            let lg = iterated_log(1.0 / diam_tail, m)
                .ok_or_else(|| Error::LogDomain(format!("log_[{m}] of 1/{diam_tail:e} is undefined")))?;
            Ok(AccessRow {
                t,
                c: ray.point(i),
                e_l,
                e_u,
                diam_tail,
                arclen_tail,
                functional_lo: e_l / diam_tail * lg,
                functional_hi: e_u / diam_tail * lg,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn tip_cfg() -> TraceConfig {
        TraceConfig::new(4.0, 2f64.powi(-10), 8).with_anchor(Complex64::new(-2.0, 0.0))
    }

    #[test]
    fn iterated_log_domain() {
        assert_eq!(iterated_log(std::f64::consts::E, 1), Some(1.0));
        assert_eq!(iterated_log(std::f64::consts::E, 2), Some(0.0));
        assert_eq!(iterated_log(std::f64::consts::E, 3), None);
    }

    #[test]
    fn tip_functional_increases() {
        let pots: Vec<f64> = (10..=30).step_by(4).map(|k| 2f64.powi(-k)).collect();
        let rows = iterated_log_access(2, &"1/2".parse().unwrap(), &pots, 1, &tip_cfg()).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].functional_lo > w[0].functional_lo);
        }
        for r in &rows {
            assert!(r.e_u <= 4.0 * r.e_l * (1.0 + 1e-15));
            // real slice: the tail is the segment [c, -2], so its diameter is the true distance |c + 2|
            let dist = r.diam_tail;
            assert!(r.e_l <= dist && dist <= r.e_u, "{r:?}");
        }
    }

    #[test]
    fn large_tails_hit_the_log_domain() {
        let err = iterated_log_access(2, &"1/2".parse().unwrap(), &[2.0], 1, &tip_cfg()).unwrap_err();
        assert!(matches!(err, Error::LogDomain(_)));
    }
}
