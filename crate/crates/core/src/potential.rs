//! Green's function, Böttcher coordinate, external angles and the parameter
//! map `Φ(c) = φ_c(c)`.
//!
//! Everything is evaluated at the first forward iterate `w_m = f_c^m(z)` that
//! lies beyond [`MapParams::asymptotic_radius`], where the series
//!
//! ```text
//! log φ_c(w) = log w + Σ_{k≥0} d^-(k+1) Log(1 + c / w_k^d)
//! ```
//! converges with principal logarithms. Potentials are divided back by `d^m`.
//! The angle at `z` is one of the `d^m` preimages `(θ_m + j)/d^m`; the sector
//! `j` is picked by continuing along the gradient line of `G_c` from `z`
//! outward until the series is valid at depth zero.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{
    asymptotic_radius, iterate_jets, ComplexPoint, Jet, MapParams, OrbitKind, ReferenceOrbit, Variable,
};
use crate::error::{Error, Result};
use crate::solve::{newton, wrap_pi, NewtonOptions};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAXIT: usize = 100_000;

/// Accuracy target and escape budget for potential evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalConfig {
    pub tol: f64,
    pub maxit: usize,
}

impl EvalConfig {
    pub fn new(tol: f64) -> Self {
        EvalConfig { tol, maxit: DEFAULT_MAXIT }
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig::new(DEFAULT_TOL)
    }
}

/// Log-Böttcher coordinates: potential `t > 0` and angle `theta` in turns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BottcherCoord {
    pub t: f64,
    pub theta: f64,
}

struct Escape {
    m: usize,
    w: Complex64,
    closest_to_zero: f64,
}

fn escape_to_asymptotic(p: &MapParams, z: ComplexPoint, maxit: usize) -> Result<Escape> {
    let ra = p.asymptotic_radius();
    let mut w = z;
    let mut closest = z.norm();
    for m in 0..=maxit {
        let r = w.norm();
        closest = closest.min(r);
        if r > ra {
            return Ok(Escape { m, w, closest_to_zero: closest });
        }
        w = p.step(w);
    }
    Err(Error::NotEscaping { maxit })
}

fn depth_scale(d: u32, m: usize) -> f64 {
    (-(m as f64) * (d as f64).ln()).exp()
}

/// Sum of `d^-(k+1) ln|1 + c/w_k^d|` starting at `w_0 = w`.
fn green_tail(p: &MapParams, mut w: Complex64) -> f64 {
    let d = p.d as f64;
    let mut scale = 1.0 / d;
    let mut sum = 0.0;
    for _ in 0..64 {
        let wd = crate::dynamics::pow_d(w, p.d);
        let u = p.c / wd;
        if !u.is_finite() || u.norm() < 1e-18 {
            break;
        }
        sum += 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p() * scale;
        w = wd + p.c;
        scale /= d;
    }
    sum
}

/// `G_c(z)` with the default escape budget.
pub fn green(p: &MapParams, z: ComplexPoint, tol: f64) -> Result<f64> {
    green_with(p, z, &EvalConfig::new(tol))
}

pub fn green_with(p: &MapParams, z: ComplexPoint, cfg: &EvalConfig) -> Result<f64> {
    let e = escape_to_asymptotic(p, z, cfg.maxit)?;
    Ok(depth_scale(p.d, e.m) * (e.w.norm().ln() + green_tail(p, e.w)))
}

/// `G_M(c) = G_c(c)`.
pub fn green_of_critical_value(p: &MapParams, tol: f64) -> Result<f64> {
    green(p, p.c, tol)
}

/// `G_c(0)`, zero when the critical orbit does not escape within the budget.
pub fn critical_potential(p: &MapParams, cfg: &EvalConfig) -> f64 {
    match green_with(p, p.c, cfg) {
        Ok(g) => g / p.d as f64,
        Err(_) => 0.0,
    }
}

/// `log φ_c(w)` for `|w|` beyond the asymptotic radius, carried as a jet.
pub(crate) fn log_bottcher_asymptotic(d: u32, w: Jet, c: Jet) -> Jet {
    let one = Complex64::new(1.0, 0.0);
    let mut l = w.ln();
    let mut wk = w;
    let mut scale = 1.0 / d as f64;
    for _ in 0..64 {
        let wd = wk.powu(d);
        if !wd.is_finite() {
            break;
        }
        let u = c / wd;
        if !u.is_finite() || u.val.norm() < 1e-18 {
            break;
        }
        l = l + (u + one).ln().scale(scale);
        wk = wd + c;
        scale /= d as f64;
    }
    l
}

fn angle_turns(l: Complex64) -> f64 {
    let th = l.im / TAU;
    let th = th - th.floor();
    if th >= 1.0 {
        0.0
    } else {
        th
    }
}

fn plain_depth_log(p: &MapParams, z: Complex64, n: usize, ra: f64) -> Option<(Complex64, Complex64)> {
    let w = iterate_jets(p.d, Jet::variable(z), Jet::constant(p.c), n).ok()?;
    if !w.is_finite() || w.val.norm() == 0.0 {
        return None;
    }
    let l = if w.val.norm() >= ra {
        log_bottcher_asymptotic(p.d, w, Jet::constant(p.c))
    } else {
        w.ln()
    };
    l.is_finite().then_some((l.val, l.der))
}

/// Angle of `z` obtained by following the gradient line of `G_c` outward
/// from `z` until no forward iteration is needed. Accurate to roughly 1e-13.
fn ray_out_angle(p: &MapParams, z0: ComplexPoint, t0: f64, cfg: &EvalConfig) -> Result<f64> {
    let ra = p.asymptotic_radius();
    let ratio = 2f64.powf(0.25);
    let opts = NewtonOptions::default();
    let mut z = z0;
    let mut t = t0;
    for _ in 0..100_000 {
        let n = escape_to_asymptotic(p, z, cfg.maxit)?.m;
        if n == 0 {
            let l = log_bottcher_asymptotic(p.d, Jet::variable(z), Jet::constant(p.c));
            return Ok(angle_turns(l.val));
        }
        let (l0, _) = plain_depth_log(p, z, n, ra)
            .ok_or_else(|| Error::BranchAmbiguity("orbit left the domain while tracing outward".into()))?;
        let t_next = t * ratio;
        let dn = depth_scale(p.d, n).recip();
        let target = Complex64::new(dn * t_next, l0.im);
        let residual = |x: Complex64| {
            let (l, j) = plain_depth_log(p, x, n, ra)?;
            let r = Complex64::new(l.re - target.re, wrap_pi(l.im - target.im));
            Some((r, j))
        };
        let opts = NewtonOptions { abs_tol: 1e-12 * target.re.max(1.0), ..opts };
        let out = newton(residual, z, &opts).ok_or_else(|| {
            Error::BranchAmbiguity(format!("outward gradient continuation stalled at potential {t:e}"))
        })?;
        z = out;
        t = t_next;
    }
    Err(Error::BranchAmbiguity("outward continuation did not reach the asymptotic region".into()))
}

/// `(G_c(z), θ)` with the sector chosen by outward continuation.
pub fn external_angle(p: &MapParams, z: ComplexPoint, tol: f64) -> Result<BottcherCoord> {
    external_angle_with(p, z, &EvalConfig::new(tol))
}

pub fn external_angle_with(p: &MapParams, z: ComplexPoint, cfg: &EvalConfig) -> Result<BottcherCoord> {
    let e = escape_to_asymptotic(p, z, cfg.maxit)?;
    if e.closest_to_zero < cfg.tol {
        return Err(Error::BranchAmbiguity("forward orbit passes within tol of the critical point".into()));
    }
    let t = depth_scale(p.d, e.m) * (e.w.norm().ln() + green_tail(p, e.w));
    let g0 = critical_potential(p, cfg);
    if g0 > 0.0 && t <= g0 + 10.0 * cfg.tol {
        return Err(Error::BranchAmbiguity(format!(
            "potential {t:e} is not above the critical level {g0:e}"
        )));
    }
    let l = log_bottcher_asymptotic(p.d, Jet::constant(e.w), Jet::constant(p.c));
    let theta_m = angle_turns(l.val);
    if e.m == 0 {
        return Ok(BottcherCoord { t, theta: theta_m });
    }
    let rough = ray_out_angle(p, z, t, cfg)?;
    let sectors = (p.d as f64).powi(e.m as i32);
    let theta = if sectors <= 2f64.powi(40) {
        let j = (rough * sectors - theta_m).round().rem_euclid(sectors);
        (theta_m + j) / sectors
    } else {
        rough
    };
    let theta = if theta >= 1.0 { theta - 1.0 } else { theta };
    Ok(BottcherCoord { t, theta })
}

/// `φ_c(z) = exp(G_c(z) + 2πiθ)`.
pub fn bottcher(p: &MapParams, z: ComplexPoint, tol: f64) -> Result<ComplexPoint> {
    let b = external_angle(p, z, tol)?;
    Ok(Complex64::from_polar(b.t.exp(), TAU * b.theta))
}

/// `φ_c(z)` with its derivative in `z` or in `c` (at fixed `z`).
pub fn bottcher_jet(p: &MapParams, z: ComplexPoint, variable: Variable, tol: f64) -> Result<Jet> {
    let cfg = EvalConfig::new(tol);
    let phi = bottcher(p, z, tol)?;
    let e = escape_to_asymptotic(p, z, cfg.maxit)?;
    let (z0, c) = match variable {
        Variable::Z => (Jet::variable(z), Jet::constant(p.c)),
        Variable::C => (Jet::constant(z), Jet::variable(p.c)),
    };
    let w = iterate_jets(p.d, z0, c, e.m)?;
    let l = log_bottcher_asymptotic(p.d, w, c);
    Ok(Jet::new(phi, phi * l.der * depth_scale(p.d, e.m)))
}

/// `Φ(c) = φ_c(c)` with its total derivative in `c`.
pub fn param_bottcher(d: u32, c: ComplexPoint, tol: f64) -> Result<Jet> {
    let p = MapParams::new(d, c)?;
    let cfg = EvalConfig::new(tol);
    let phi = bottcher(&p, c, tol)?;
    let e = escape_to_asymptotic(&p, c, cfg.maxit)?;
    let cj = Jet::variable(c);
    let w = iterate_jets(d, cj, cj, e.m)?;
    let l = log_bottcher_asymptotic(d, w, cj);
    Ok(Jet::new(phi, phi * l.der * depth_scale(d, e.m)))
}

/// `log φ(w_n)` at a fixed depth `n` for a point given relative to a
/// reference orbit, with derivative in the offset. Below the asymptotic
/// radius the correction series is skipped (plain `log w_n`).
#[derive(Debug, Clone, Copy)]
pub struct DepthLog {
    pub l: Jet,
    pub asymptotic: bool,
}

pub fn depth_log_bottcher(reference: &ReferenceOrbit, offset: Complex64, n: usize) -> Option<DepthLog> {
    let d = reference.d();
    let w = reference.orbit(offset).nth(n)?;
    if !w.is_finite() || w.val.norm() == 0.0 {
        return None;
    }
    let c = match reference.kind() {
        OrbitKind::Critical => Jet::variable(reference.anchor() + offset),
        OrbitKind::Point { c } => Jet::constant(c),
    };
    let asymptotic = w.val.norm() >= asymptotic_radius(d, c.val);
    let l = if asymptotic {
        log_bottcher_asymptotic(d, w, c)
    } else {
        w.ln()
    };
    l.is_finite().then_some(DepthLog { l, asymptotic })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mp(d: u32, cc: Complex64) -> MapParams {
        MapParams::new(d, cc).unwrap()
    }

    /// Raw limit log|f^n(z)| / d^n, as an independent oracle.
    fn raw_green(p: &MapParams, z: Complex64, n: usize) -> f64 {
        let mut w = z;
        let mut s = 0.0;
        let mut scale = 1.0;
        // accumulate in log form to avoid overflow: log|w_{k+1}| = d log|w_k| + log|1 + c/w_k^d|
        let mut logw = w.norm().ln();
        for _ in 0..n {
            let wd = crate::dynamics::pow_d(w, p.d);
            let next = wd + p.c;
            if next.norm() > 1e100 {
                // remaining growth is pure powering to within 1e-100
                s = logw * scale;
                return s;
            }
            logw = next.norm().ln();
            w = next;
            scale /= p.d as f64;
            s = logw * scale;
        }
        s
    }

    #[test]
    fn green_examples() {
        let p = mp(2, c(0.0, 0.0));
        assert!((green(&p, c(std::f64::consts::E, 0.0), 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert!((green(&p, c(4.0, 0.0), 1e-12).unwrap() - 4f64.ln()).abs() < 1e-12);
        let p = mp(2, c(-2.0, 0.0));
        let g = green(&p, c(3.0, 0.0), 1e-12).unwrap();
        assert!(g > 2f64.ln() && g < 3f64.ln());
        assert!((g - raw_green(&p, c(3.0, 0.0), 30)).abs() < 1e-12);
    }

    #[test]
    fn green_rejects_interior() {
        let p = mp(2, c(-0.1, 0.0));
        let cfg = EvalConfig { tol: 1e-12, maxit: 2000 };
        assert!(matches!(green_with(&p, c(0.1, 0.0), &cfg), Err(Error::NotEscaping { .. })));
    }

    #[test]
    fn critical_value_potential() {
        let p = mp(2, c(3.0, 0.0));
        assert_eq!(green_of_critical_value(&p, 1e-12).unwrap(), green(&p, c(3.0, 0.0), 1e-12).unwrap());
        let p = mp(2, c(-3.0, 0.0));
        assert!(green_of_critical_value(&p, 1e-12).unwrap() > 0.0);
        // just outside the cusp: escapes, but slowly
        let p = mp(2, c(0.2501, 0.0));
        let cfg = EvalConfig { tol: 1e-12, maxit: 1_000_000 };
        let g = green_with(&p, p.c, &cfg).unwrap();
        assert!(g > 0.0 && g < 1e-50);
    }

    #[test]
    fn bottcher_examples() {
        let p = mp(2, c(0.0, 0.0));
        let phi = bottcher(&p, c(1.0, 1.0), 1e-12).unwrap();
        assert!((phi - c(1.0, 1.0)).norm() < 1e-14);

        let p = mp(2, c(3.0, 0.0));
        let z = c(1e6, 0.0);
        let phi = bottcher(&p, z, 1e-12).unwrap();
        assert!((phi / z - 1.0).norm() <= 1.5e-12 * 1.01);

        // Chebyshev conjugacy at c = -2: φ(z) = (z + sqrt(z^2 - 4))/2
        let p = mp(2, c(-2.0, 0.0));
        let phi = bottcher(&p, c(3.0, 0.0), 1e-12).unwrap();
        assert!((phi - c((3.0 + 5f64.sqrt()) / 2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn angle_examples() {
        let p = mp(2, c(0.0, 0.0));
        let b = external_angle(&p, c(0.0, 2.0), 1e-12).unwrap();
        assert!((b.t - 2f64.ln()).abs() < 1e-14 && (b.theta - 0.25).abs() < 1e-14);
        let b = external_angle(&p, c(-4.0, 0.0), 1e-12).unwrap();
        assert!((b.t - 4f64.ln()).abs() < 1e-14 && (b.theta - 0.5).abs() < 1e-14);
        let p = mp(2, c(-2.0, 0.0));
        let b = external_angle(&p, c(-3.0, 0.0), 1e-12).unwrap();
        assert!((b.theta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deep_angles_match_conjugacy() {
        // c = -2: φ(z) = u where z = u + 1/u; points close to the Julia set need many iterations
        let p = mp(2, c(-2.0, 0.0));
        for &(t, th) in &[(1e-3, 0.123), (1e-4, 0.77), (3e-6, 0.4)] {
            let u = Complex64::from_polar(f64::exp(t), TAU * th);
            let z = u + u.inv();
            let b = external_angle(&p, z, 1e-12).unwrap();
            assert!((b.t - t).abs() < 1e-9 * t.max(1e-3), "t {t}: {}", b.t);
            assert!((b.theta - th).abs() < 1e-9, "theta {th}: {}", b.theta);
        }
    }

    #[test]
    fn inside_critical_equipotential_is_rejected() {
        let p = mp(2, c(3.0, 0.0));
        // near the repelling fixed point (1 + i sqrt 11)/2 the potential is far below G(0)
        let z = c(0.5, 11f64.sqrt() / 2.0 + 1e-6);
        let err = external_angle(&p, z, 1e-12).unwrap_err();
        assert!(matches!(err, Error::BranchAmbiguity(_)));
    }

    #[test]
    fn bottcher_jet_examples() {
        let p = mp(2, c(0.0, 0.0));
        let j = bottcher_jet(&p, c(5.0, 0.0), Variable::Z, 1e-12).unwrap();
        assert!((j.val - c(5.0, 0.0)).norm() < 1e-13 && (j.der - c(1.0, 0.0)).norm() < 1e-13);
        let p = mp(2, c(-2.0, 0.0));
        let j = bottcher_jet(&p, c(3.0, 0.0), Variable::Z, 1e-12).unwrap();
        let expect = (1.0 + 3.0 / 5f64.sqrt()) / 2.0;
        assert!((j.der - c(expect, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn bottcher_c_jet_far_out_matches_differences() {
        let p = mp(2, c(3.0, 0.0));
        let z = c(1e6, 0.0);
        let j = bottcher_jet(&p, z, Variable::C, 1e-12).unwrap();
        // φ(z) ≈ z + c/(2z): derivative ≈ 1/(2z) = 5e-7
        assert!((j.der - c(5e-7, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn param_bottcher_examples() {
        let j = param_bottcher(2, c(3.0, 0.0), 1e-12).unwrap();
        let g = green_of_critical_value(&mp(2, c(3.0, 0.0)), 1e-12).unwrap();
        assert!((j.val.norm() - g.exp()).abs() < 1e-11 * g.exp());
        let j = param_bottcher(2, c(-3.0, 0.0), 1e-12).unwrap();
        assert!((j.val.arg() / TAU - 0.5).abs() < 1e-12 || (j.val.arg() / TAU + 0.5).abs() < 1e-12);
        let j = param_bottcher(2, c(1e6, 0.0), 1e-12).unwrap();
        assert!((j.val / c(1e6, 0.0) - 1.0).norm() < 1e-5);
    }
}
