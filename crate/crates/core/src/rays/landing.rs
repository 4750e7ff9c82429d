//! Landing-point extrapolation `z(u) ≈ z* + A·u^β` from the innermost samples.

use num_complex::Complex64;
use serde::Serialize;

use super::RayPolyline;
use crate::dynamics::ComplexPoint;
use crate::error::{Error, Result};

/// Variable in which the ray is assumed to approach its landing point as a power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LandingModel {
    /// `u = t`, the behaviour at repelling (Misiurewicz-type) landing points.
    Power,
    /// `u = 1/log(1/t)`, the slow approach at parabolic points.
    Logarithmic,
}

impl LandingModel {
    fn u(self, t: f64) -> Option<f64> {
        match self {
            LandingModel::Power => Some(t),
            LandingModel::Logarithmic => (t < 1.0).then(|| -1.0 / t.ln()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandingEstimate {
    pub point: ComplexPoint,
    pub error_bound: f64,
    pub potentials_used: Vec<f64>,
    pub model: LandingModel,
    /// Fitted exponent `β` in the model variable.
    pub exponent: f64,
}

const MIN_SAMPLES: usize = 8;
const WINDOW: usize = 5;
const RATIO_LO: f64 = 0.05;
const RATIO_HI: f64 = 0.95;
const RATIO_SPREAD: f64 = 1.5;

/// Landing estimate from all samples of the ray.
pub fn landing_estimate(ray: &RayPolyline) -> Result<LandingEstimate> {
    landing_estimate_window(ray, ray.len())
}

/// Landing estimate for a ray whose deepest samples may be unreliable, such
/// as the partial polyline of a stalled trace: the innermost samples are
/// dropped one at a time until an estimate succeeds.
pub fn landing_estimate_partial(ray: &RayPolyline) -> Result<LandingEstimate> {
    let mut last = Error::NoConvergence("no samples".into());
    for keep in (MIN_SAMPLES..=ray.len()).rev().take(ray.len() / 2 + 1) {
        let head = RayPolyline::new(ray.plane, ray.d, ray.angle.clone(), ray.anchor, ray.samples[..keep].to_vec());
        match landing_estimate(&head) {
            Ok(l) => return Ok(l),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Landing estimate using only the `innermost` deepest samples.
pub fn landing_estimate_window(ray: &RayPolyline, innermost: usize) -> Result<LandingEstimate> {
    if innermost < MIN_SAMPLES || innermost > ray.len() {
        return Err(Error::InvalidInput(format!(
            "landing estimate needs at least {MIN_SAMPLES} samples, got {} of {}",
            innermost,
            ray.len()
        )));
    }
    let samples = &ray.samples[ray.len() - innermost..];
    for model in [LandingModel::Power, LandingModel::Logarithmic] {
        // (u, offset, t), innermost first
        let pts: Vec<(f64, Complex64, f64)> = samples
            .iter()
            .rev()
            .filter_map(|s| model.u(s.t).map(|u| (u, s.offset, s.t)))
            .collect();
        for level in 0..7 {
            let q = 2f64.powf(0.5f64.powi(level));
            let Some(window) = thin(&pts, q) else { continue };
            if !ratios_ok(&window) {
                continue;
            }
            let (a, beta, resid) = fit(&window);
            let (a_outer, _, _) = fit(&window[1..]);
            let point = ray.anchor + a;
            let floor = f64::EPSILON * point.norm().max(window[0].1.norm()) * 4.0;
            let error_bound = resid.max((a - a_outer).norm()).max(floor).max(f64::MIN_POSITIVE);
            return Ok(LandingEstimate {
                point,
                error_bound,
                potentials_used: window.iter().map(|w| w.2).collect(),
                model,
                exponent: beta,
            });
        }
    }
    Err(Error::NoConvergence(
        "successive differences of the innermost samples do not decay at a stable ratio in [0.05, 0.95]".into(),
    ))
}

/// Picks up to [`WINDOW`] points whose model variable grows by about `q`
/// from one to the next, starting at the innermost sample.
fn thin(pts: &[(f64, Complex64, f64)], q: f64) -> Option<Vec<(f64, Complex64, f64)>> {
    let lq = q.ln();
    let mut out = vec![*pts.first()?];
    let mut j = 0;
    while out.len() < WINDOW {
        let u0 = out.last().expect("nonempty").0;
        let mut best: Option<(usize, f64)> = None;
        for (k, p) in pts.iter().enumerate().skip(j + 1) {
            let rel = (p.0 / u0).ln() / lq;
            if rel > 1.5 {
                break;
            }
            let dev = (rel - 1.0).abs();
            if dev < 0.25 && best.map_or(true, |b| dev < b.1) {
                best = Some((k, dev));
            }
        }
        let (k, _) = best?;
        out.push(pts[k]);
        j = k;
    }
    Some(out).filter(|w| w.len() >= 4)
}

fn ratios_ok(w: &[(f64, Complex64, f64)]) -> bool {
    let diffs: Vec<f64> = w.windows(2).map(|p| (p[1].1 - p[0].1).norm()).collect();
    let ratios: Vec<f64> = diffs.windows(2).map(|p| p[0] / p[1]).collect();
    if ratios.iter().any(|r| !(RATIO_LO..=RATIO_HI).contains(r)) {
        return false;
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    hi <= RATIO_SPREAD * lo
}

/// Least-squares fit of `z* + A·v^β`, `v = u / u_max`. Returns `(z*, β, max residual)`.
fn fit(w: &[(f64, Complex64, f64)]) -> (Complex64, f64, f64) {
    let umax = w.iter().map(|p| p.0).fold(0.0, f64::max);
    let v: Vec<f64> = w.iter().map(|p| p.0 / umax).collect();
    let y: Vec<Complex64> = w.iter().map(|p| p.1).collect();
    let solve = |beta: f64| linear_fit(&v, &y, beta);
    let cost = |beta: f64| solve(beta).2;

    let mut best = (0.05, f64::INFINITY);
    let mut beta = 0.05;
    while beta <= 8.0 {
        let c = cost(beta);
        if c < best.1 {
            best = (beta, c);
        }
        beta += 0.05;
    }
    // golden-section refinement on the bracketing grid cell
    let (mut lo, mut hi) = ((best.0 - 0.05).max(1e-3), best.0 + 0.05);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let beta = 0.5 * (lo + hi);
    let (a, b, _) = solve(beta);
    let resid = v
        .iter()
        .zip(&y)
        .map(|(vi, yi)| (yi - a - b * vi.powf(beta)).norm())
        .fold(0.0, f64::max);
    (a, beta, resid)
}

/// Complex least squares for `y ≈ a + b·v^β`; returns `(a, b, residual sum of squares)`.
fn linear_fit(v: &[f64], y: &[Complex64], beta: f64) -> (Complex64, Complex64, f64) {
    let n = v.len() as f64;
    let x: Vec<f64> = v.iter().map(|vi| vi.powf(beta)).collect();
    let sx: f64 = x.iter().sum();
    let sxx: f64 = x.iter().map(|xi| xi * xi).sum();
    let sy: Complex64 = y.iter().sum();
    let sxy: Complex64 = x.iter().zip(y).map(|(xi, yi)| yi * *xi).sum();
    let det = n * sxx - sx * sx;
    let b = (sxy * n - sy * sx) / det;
    let a = (sy - b * sx) / n;
    let rss = x.iter().zip(y).map(|(xi, yi)| (yi - a - b * *xi).norm_sqr()).sum();
    (a, b, rss)
}
