//! External rays as gradient lines of the Green function.
//!
//! A ray sample at potential `t` solves
//!
//! ```text
//! log φ(w_n(x)) = d^n t + 2πi·frac(d^n θ)   (mod 2πi)
//! ```
//!
//! where `w_n` is the `n`-th iterate (of the point in the dynamical plane, of
//! the critical value in the parameter plane) and `n` is the first depth at
//! which `d^n t` clears the asymptotic radius. Points are stored as offsets
//! from an anchor so that rays approaching an anchor whose orbit is exact in
//! binary64 keep full relative precision.

mod landing;
mod record;

pub use landing::{landing_estimate, landing_estimate_partial, landing_estimate_window, LandingEstimate, LandingModel};
pub use record::{from_binary, to_binary, to_csv};

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::angle::AngleRational;
use crate::dynamics::{asymptotic_radius, ComplexPoint, MapParams, OrbitKind, Plane, ReferenceOrbit};
use crate::error::{Error, Result};
use crate::potential::{depth_log_bottcher, external_angle, green};
use crate::solve::{newton, wrap_pi, NewtonOptions};

/// Lowest potential accepted unless the caller lowers the floor.
pub const DEFAULT_T_FLOOR: f64 = 9.094947017729282e-13; // 2^-40

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub t: f64,
    /// Position relative to the polyline's anchor.
    pub offset: Complex64,
    /// Inserted between scheduled potentials after a Newton failure.
    pub substep: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayPolyline {
    pub plane: Plane,
    pub d: u32,
    pub angle: AngleRational,
    pub anchor: ComplexPoint,
    pub samples: Vec<RaySample>,
    /// Cumulative arc length from the outermost sample.
    pub arc_prefix: Vec<f64>,
}

impl RayPolyline {
    pub(crate) fn new(plane: Plane, d: u32, angle: AngleRational, anchor: ComplexPoint, samples: Vec<RaySample>) -> Self {
        let mut arc_prefix = Vec::with_capacity(samples.len());
        let mut acc = 0.0;
        for (i, s) in samples.iter().enumerate() {
            if i > 0 {
                acc += (s.offset - samples[i - 1].offset).norm();
            }
            arc_prefix.push(acc);
        }
        RayPolyline { plane, d, angle, anchor, samples, arc_prefix }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Absolute position of sample `i`.
    pub fn point(&self, i: usize) -> ComplexPoint {
        self.anchor + self.samples[i].offset
    }

    pub fn potentials(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// Index of the sample whose potential is closest to `t` in log scale.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        let lt = t.ln();
        (0..self.len()).min_by(|&a, &b| {
            let da = (self.samples[a].t.ln() - lt).abs();
            let db = (self.samples[b].t.ln() - lt).abs();
            da.total_cmp(&db)
        })
    }

    /// Arc length from sample `i` to the innermost sample, summed from the
    /// inner end so short tail segments are not absorbed by long ones.
    pub fn arc_to_innermost(&self, i: usize) -> f64 {
        let s = &self.samples;
        (i + 1..s.len()).rev().map(|j| (s[j].offset - s[j - 1].offset).norm()).sum()
    }

    /// Diameter of the samples from `i` inward, together with `extra` (usually the landing point).
    pub fn tail_diameter(&self, i: usize, extra: Option<ComplexPoint>) -> f64 {
        let mut pts: Vec<Complex64> = self.samples[i..].iter().map(|s| s.offset).collect();
        if let Some(e) = extra {
            pts.push(e - self.anchor);
        }
        let mut best: f64 = 0.0;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                best = best.max((pts[a] - pts[b]).norm());
            }
        }
        best
    }
}

/// Parameters of a ray trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub t_start: f64,
    pub t_min: f64,
    pub steps_per_halving: u32,
    /// Relative accuracy of each sample in log-Böttcher coordinates.
    pub ray_tol: f64,
    pub t_floor: f64,
    /// Reference point for perturbative orbits; `None` uses the origin.
    pub anchor: Option<ComplexPoint>,
    /// Potentials that must appear among the samples in addition to the schedule.
    pub required: Vec<f64>,
    /// Consecutive intermediate potentials inserted after Newton failures before giving up.
    pub max_substeps: u32,
    pub max_damping: u32,
}

impl TraceConfig {
    pub fn new(t_start: f64, t_min: f64, steps_per_halving: u32) -> Self {
        TraceConfig {
            t_start,
            t_min,
            steps_per_halving,
            ..Default::default()
        }
    }

    pub fn with_anchor(mut self, anchor: ComplexPoint) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.t_floor = floor;
        self
    }

    pub fn with_required(mut self, required: &[f64]) -> Self {
        self.required = required.to_vec();
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = self.t_min > 0.0 && self.t_start > self.t_min && self.t_start.is_finite();
        if !ok {
            return Err(Error::InvalidInput(format!(
                "need t_start > t_min > 0, got t_start = {}, t_min = {}",
                self.t_start, self.t_min
            )));
        }
        if self.steps_per_halving == 0 {
            return Err(Error::InvalidInput("steps_per_halving must be positive".into()));
        }
        if !(self.ray_tol > 0.0) {
            return Err(Error::InvalidInput("ray_tol must be positive".into()));
        }
        if self.t_min < self.t_floor {
            return Err(Error::PrecisionFloor { t_min: self.t_min, floor: self.t_floor });
        }
        Ok(())
    }

    /// Decreasing potentials `t_min · 2^(j/s)` from the largest one not above
    /// `t_start` down to `t_min`, merged with the required potentials.
    pub fn schedule(&self) -> Vec<f64> {
        let s = self.steps_per_halving as f64;
        let top = (s * (self.t_start / self.t_min).log2() + 1e-9).floor() as i64;
        let mut ts: Vec<f64> = (0..=top)
            .rev()
            .map(|j| self.t_min * (j as f64 / s).exp2())
            .collect();
        for &r in &self.required {
            if r < self.t_min || r > self.t_start {
                continue;
            }
            match ts.iter().position(|&t| ((t - r) / r).abs() < 1e-12) {
                Some(k) => ts[k] = r,
                None => ts.push(r),
            }
        }
        ts.sort_by(|a, b| b.total_cmp(a));
        ts.dedup();
        ts
    }
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            t_start: 4.0,
            t_min: 2f64.powi(-20),
            steps_per_halving: 8,
            ray_tol: 1e-10,
            t_floor: DEFAULT_T_FLOOR,
            anchor: None,
            required: Vec::new(),
            max_substeps: 8,
            max_damping: 20,
        }
    }
}

struct Tracer<'a> {
    d: u32,
    kind: OrbitKind,
    reference: ReferenceOrbit,
    angle: &'a AngleRational,
    cfg: &'a TraceConfig,
}

impl Tracer<'_> {
    fn depth(&self, t: f64, seed: Complex64) -> usize {
        let c = match self.kind {
            OrbitKind::Critical => self.reference.anchor() + seed,
            OrbitKind::Point { c } => c,
        };
        let goal = (2.0 * asymptotic_radius(self.d, c)).ln();
        let mut n = 0;
        let mut s = t;
        while s < goal {
            s *= self.d as f64;
            n += 1;
        }
        n
    }

    fn solve(&mut self, t: f64, seed: Complex64) -> Option<Complex64> {
        let mut n = self.depth(t, seed);
        for _ in 0..3 {
            self.reference.ensure(n + 1);
            let scale = (self.d as f64).powi(n as i32);
            let re = scale * t;
            let im = TAU * self.angle.frac_after(self.d, n as u64);
            let reference = &self.reference;
            let residual = |x: Complex64| {
                let dl = depth_log_bottcher(reference, x, n)?;
                let l = dl.l.val;
                Some((Complex64::new(l.re - re, wrap_pi(l.im - im)), dl.l.der))
            };
            let opts = NewtonOptions {
                abs_tol: self.cfg.ray_tol * re.min(scale),
                max_damping: self.cfg.max_damping,
                polish: 2,
                ..NewtonOptions::default()
            };
            let out = newton(residual, seed, &opts)?;
            if depth_log_bottcher(reference, out, n)?.asymptotic {
                return self.same_branch(n, seed, out).then_some(out);
            }
            n += 1;
        }
        None
    }

    /// Whether `to` continues the ray through `from` on the same branch.
    ///
    /// The step must stay inside the disk around `from` that the Koebe
    /// bound `sinh G / (2 e^G |∇G|)` certifies to miss the set, and inside
    /// that disk the imaginary part of the depth-`n` logarithm, unwrapped
    /// along the segment, must return to its starting value. A Newton step
    /// onto a ray whose angle only agrees with the target modulo `1/d^n`
    /// fails one of the two tests.
    fn same_branch(&mut self, n: usize, from: Complex64, to: Complex64) -> bool {
        const PROBES: u32 = 16;
        for depth in n..n + 4 {
            self.reference.ensure(depth + 1);
            let scale = (self.d as f64).powi(depth as i32);
            let reference = &self.reference;
            let log_at = |x: Complex64| depth_log_bottcher(reference, x, depth).filter(|dl| dl.asymptotic).map(|dl| dl.l);
            let Some(start) = log_at(from) else { continue };
            let g = start.val.re / scale;
            let grad = start.der.norm() / scale;
            let safe = -(-2.0 * g).exp_m1() / (4.0 * grad);
            if !((to - from).norm() <= safe) {
                return false;
            }
            let mut last = start.val.im;
            let mut total = 0.0;
            let mut complete = true;
            for k in 1..=PROBES {
                let Some(cur) = log_at(from + (to - from) * (k as f64 / PROBES as f64)) else {
                    complete = false;
                    break;
                };
                let step = wrap_pi(cur.val.im - last);
                if step.abs() > FRAC_PI_2 {
                    return false;
                }
                total += step;
                last = cur.val.im;
            }
            if complete {
                return total.abs() < PI;
            }
        }
        false
    }
}

fn trace(plane: Plane, d: u32, angle: &AngleRational, cfg: &TraceConfig) -> Result<RayPolyline> {
    cfg.validate()?;
    let anchor = cfg.anchor.unwrap_or_default();
    let kind = match plane {
        Plane::Dynamical { c } => OrbitKind::Point { c },
        Plane::Parameter => OrbitKind::Critical,
    };
    let schedule = cfg.schedule();
    let mut tracer = Tracer {
        d,
        kind,
        reference: ReferenceOrbit::new(d, kind, anchor, 64),
        angle,
        cfg,
    };
    let stall = |samples: Vec<RaySample>| {
        let last_good_t = samples.last().map_or(f64::INFINITY, |s| s.t);
        Error::NewtonStall {
            last_good_t,
            partial: Box::new(RayPolyline::new(plane, d, angle.clone(), anchor, samples)),
        }
    };

    let t0 = schedule[0];
    let zeta = unit_root(angle) * t0.exp();
    let seed = match plane {
        Plane::Parameter => zeta - 1.0 / d as f64,
        Plane::Dynamical { .. } => zeta,
    } - anchor;
    let Some(x0) = tracer.solve(t0, seed) else {
        return Err(stall(Vec::new()));
    };
    let mut samples = vec![RaySample { t: t0, offset: x0, substep: false }];

    for &target in &schedule[1..] {
        let mut pending = vec![target];
        let mut substeps = 0;
        while let Some(&goal) = pending.last() {
            let here = *samples.last().expect("at least one sample");
            match tracer.solve(goal, here.offset) {
                Some(x) => {
                    pending.pop();
                    samples.push(RaySample { t: goal, offset: x, substep: goal != target });
                    substeps = 0;
                }
                None => {
                    if substeps == cfg.max_substeps {
                        return Err(stall(samples));
                    }
                    substeps += 1;
                    pending.push((here.t * goal).sqrt());
                }
            }
        }
    }
    Ok(RayPolyline::new(plane, d, angle.clone(), anchor, samples))
}

/// `exp(2πiθ)`, exact at quarter turns so that real rays stay real.
fn unit_root(angle: &AngleRational) -> Complex64 {
    let quarter = angle.multiply_mod1(4, 1);
    if quarter.numerator().is_zero() {
        let k = (4.0 * angle.to_f64()).round() as u32;
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
            .map(|(re, im)| Complex64::new(re, im))[k as usize % 4];
    }
    Complex64::from_polar(1.0, TAU * angle.to_f64())
}

/// Traces the dynamical ray of `f_c` at `angle` over the configured potentials.
pub fn trace_dynamical_ray(p: &MapParams, angle: &AngleRational, cfg: &TraceConfig) -> Result<RayPolyline> {
    trace(Plane::Dynamical { c: p.c }, p.d, angle, cfg)
}

/// Traces the parameter ray of the degree-`d` connectedness locus at `angle`.
pub fn trace_parameter_ray(d: u32, angle: &AngleRational, cfg: &TraceConfig) -> Result<RayPolyline> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("degree must be >= 2, got {d}")));
    }
    trace(Plane::Parameter, d, angle, cfg)
}

/// Arc length of a ray from the sample nearest `t_from` to the innermost sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcLength {
    pub t_from: f64,
    pub t_innermost: f64,
    pub length: f64,
}

pub fn arc_length(ray: &RayPolyline, t_from: f64) -> Result<ArcLength> {
    let i = ray
        .nearest_index(t_from)
        .ok_or_else(|| Error::InvalidInput("ray has no samples".into()))?;
    Ok(ArcLength {
        t_from: ray.samples[i].t,
        t_innermost: ray.samples[ray.len() - 1].t,
        length: ray.arc_to_innermost(i),
    })
}

/// One row of the arc-length comparison between a dynamical and a parameter ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicRow {
    pub t: f64,
    /// Dynamical ray length from potential `t` to the landing point.
    pub gamma: f64,
    /// Parameter ray length from potential `t` to the landing point.
    pub big_gamma: f64,
    pub ratio: f64,
}

/// Compares `|γ|` (ray of `f_{c0}` at `angle`) and `|Γ|` (parameter ray at
/// `angle`), both measured from potential `t` to `c0`. Both rays are traced
/// with `cfg`; the dynamical ray is anchored at `c0` and the parameter ray
/// at `cfg.anchor` (or at `c0` when unset).
pub fn geodesic_ratio_experiment(
    d: u32,
    angle: &AngleRational,
    c0: ComplexPoint,
    potentials: &[f64],
    cfg: &TraceConfig,
) -> Result<Vec<GeodesicRow>> {
    if potentials.is_empty() {
        return Ok(Vec::new());
    }
    let t_low = potentials.iter().copied().fold(f64::INFINITY, f64::min);
    let mut pc = cfg.clone();
    pc.t_min = pc.t_min.min(t_low);
    pc.required.extend_from_slice(potentials);
    let param = trace_parameter_ray(d, angle, &TraceConfig { anchor: Some(cfg.anchor.unwrap_or(c0)), ..pc.clone() })?;
    let dynamical = trace_dynamical_ray(&MapParams::new(d, c0)?, angle, &pc.with_anchor(c0))?;

    let to_landing = |ray: &RayPolyline, t: f64| -> Result<f64> {
        let i = ray
            .samples
            .iter()
            .position(|s| s.t == t)
            .ok_or_else(|| Error::InvalidInput(format!("potential {t:e} is not a ray sample")))?;
        let inner = ray.samples[ray.len() - 1].offset + (ray.anchor - c0);
        Ok(ray.arc_to_innermost(i) + inner.norm())
    };
    potentials
        .iter()
        .map(|&t| {
            let gamma = to_landing(&dynamical, t)?;
            let big_gamma = to_landing(&param, t)?;
            Ok(GeodesicRow { t, gamma, big_gamma, ratio: gamma / big_gamma })
        })
        .collect()
}

/// Deviation of a parameter-ray sample from the defining relation: the
/// wrap-aware angle error and the potential error of `c` in its own plane.
pub fn parameter_sample_defect(ray: &RayPolyline, i: usize, tol: f64) -> Result<(f64, f64)> {
    let c = ray.point(i);
    let p = MapParams::new(ray.d, c)?;
    let b = external_angle(&p, c, tol)?;
    let dt = (green(&p, c, tol)? - ray.samples[i].t).abs();
    let dth = b.theta - ray.angle.to_f64();
    let dth = (dth - dth.round()).abs();
    Ok((dth, dt))
}

/// `d log Φ / dc` at parameter-ray sample `i`, evaluated through the same
/// anchored orbit used for tracing. `|Φ'(c)| = e^t · |d log Φ / dc|`.
pub fn parameter_log_derivative(ray: &RayPolyline, i: usize) -> Result<Complex64> {
    if ray.plane != Plane::Parameter {
        return Err(Error::InvalidInput("log-derivative needs a parameter ray".into()));
    }
    let s = ray
        .samples
        .get(i)
        .ok_or_else(|| Error::InvalidInput(format!("sample {i} out of range")))?;
    let tracer = Tracer {
        d: ray.d,
        kind: OrbitKind::Critical,
        reference: ReferenceOrbit::new(ray.d, OrbitKind::Critical, ray.anchor, 1),
        angle: &ray.angle,
        cfg: &TraceConfig::default(),
    };
    let mut n = tracer.depth(s.t, s.offset);
    let mut reference = tracer.reference;
    for _ in 0..3 {
        reference.ensure(n + 1);
        if let Some(dl) = depth_log_bottcher(&reference, s.offset, n).filter(|dl| dl.asymptotic) {
            return Ok(dl.l.der / (ray.d as f64).powi(n as i32));
        }
        n += 1;
    }
    Err(Error::NotEscaping { maxit: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn angle(s: &str) -> AngleRational {
        s.parse().unwrap()
    }

    #[test]
    fn schedule_is_aligned_at_the_bottom() {
        let cfg = TraceConfig::new(4.0, 2f64.powi(-10), 2).with_required(&[0.3]);
        let s = cfg.schedule();
        assert_eq!(*s.last().unwrap(), 2f64.powi(-10));
        assert_eq!(s[0], 4.0);
        assert!(s.contains(&0.3));
        assert!(s.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(s.len(), 2 * 12 + 1 + 1);
    }

    #[test]
    fn radial_rays_of_z_squared() {
        let p = MapParams::new(2, c(0.0, 0.0)).unwrap();
        let ray = trace_dynamical_ray(&p, &angle("1/4"), &TraceConfig::new(1.0, 2f64.powi(-10), 8)).unwrap();
        for (i, s) in ray.samples.iter().enumerate() {
            let z = ray.point(i);
            assert!((z - c(0.0, s.t.exp())).norm() < 1e-12 * s.t.exp(), "{z} at {}", s.t);
        }
    }

    #[test]
    fn chebyshev_rays_are_real() {
        let p = MapParams::new(2, c(-2.0, 0.0)).unwrap();
        let cfg = TraceConfig::new(2.0, 2f64.powi(-12), 4).with_anchor(c(-2.0, 0.0));
        let ray = trace_dynamical_ray(&p, &angle("1/2"), &cfg).unwrap();
        for s in &ray.samples {
            // z = -2 cosh t, so the offset from -2 is -4 sinh^2(t/2)
            let exact = -4.0 * (s.t / 2.0).sinh().powi(2);
            assert!((s.offset.re - exact).abs() <= 1e-12 * exact.abs(), "t {}", s.t);
            assert!(s.offset.im.abs() <= 1e-14 * exact.abs());
        }
        let ray = trace_dynamical_ray(&p, &angle("0/1"), &TraceConfig::new(2.0, 2f64.powi(-12), 4)).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..ray.len() {
            let z = ray.point(i);
            assert!(z.re > 2.0 && z.re < prev && z.im.abs() < 1e-12);
            prev = z.re;
        }
    }

    #[test]
    fn parameter_rays_near_infinity_and_tip() {
        let ray = trace_parameter_ray(3, &angle("1/2"), &TraceConfig::new(8.0, 4.0, 2)).unwrap();
        let z = ray.point(0);
        let zeta = Complex64::from_polar(8f64.exp(), std::f64::consts::PI);
        assert!((z / zeta - 1.0).norm() < 1e-3);

        let cfg = TraceConfig::new(4.0, 2f64.powi(-16), 8).with_anchor(c(-2.0, 0.0));
        let ray = trace_parameter_ray(2, &angle("1/2"), &cfg).unwrap();
        for s in &ray.samples {
            assert!(s.offset.re < 0.0 && s.offset.im == 0.0);
        }
        let last = ray.samples.last().unwrap();
        assert!((last.offset.re / (-1.5 * last.t * last.t) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn defining_relation_holds_on_parameter_samples() {
        let ray = trace_parameter_ray(2, &angle("1/3"), &TraceConfig::new(2.0, 2f64.powi(-6), 2)).unwrap();
        for i in (0..ray.len()).step_by(3) {
            let (dth, dt) = parameter_sample_defect(&ray, i, 1e-12).unwrap();
            assert!(dth < 1e-9 && dt < 1e-9, "sample {i}: {dth} {dt}");
        }
    }

    #[test]
    fn coarse_steps_do_not_jump_branches() {
        // at two steps per halving a plain Newton step from the tip ray lands on the ray at angle 0
        let cfg = TraceConfig::new(4.0, 2f64.powi(-20), 2).with_anchor(c(-2.0, 0.0));
        let ray = trace_parameter_ray(2, &angle("1/2"), &cfg).unwrap();
        assert!(ray.samples.iter().any(|s| s.substep));
        assert!(ray.samples.iter().all(|s| s.offset.re < 0.0 && s.offset.re > -1e3));
    }

    #[test]
    fn floor_is_enforced() {
        let err = trace_parameter_ray(2, &angle("1/2"), &TraceConfig::new(1.0, 1e-15, 8)).unwrap_err();
        assert!(matches!(err, Error::PrecisionFloor { .. }));
    }

    #[test]
    fn arc_length_of_radial_ray() {
        let p = MapParams::new(2, c(0.0, 0.0)).unwrap();
        let ray = trace_dynamical_ray(&p, &angle("0/1"), &TraceConfig::new(1.0, 2f64.powi(-10), 8)).unwrap();
        let a = arc_length(&ray, 2f64.ln()).unwrap();
        let expect = a.t_from.exp() - a.t_innermost.exp();
        assert!((a.length - expect).abs() < 1e-12);
    }
}
