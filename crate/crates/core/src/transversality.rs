//! The series `T(c) = Σ_{n≥0} 1 / D_z f_c^n(c)` and related checks.

use num_complex::Complex64;
use serde::Serialize;

use crate::angle::AngleRational;
use crate::dynamics::{pow_d, ComplexPoint, MapParams, OrbitKind, ReferenceOrbit, Variable};
use crate::error::{Error, Result, StallCause};
use crate::potential::{bottcher_jet, param_bottcher};
use crate::rays::{trace_parameter_ray, RayPolyline, TraceConfig};

pub const DEFAULT_MAX_TERMS: usize = 10_000;
/// Number of late terms used for the geometric decay fit.
const FIT_WINDOW: usize = 50;
const STALL_RATIO: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaSum {
    pub beta: f64,
    pub sum: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalitySum {
    pub value: Complex64,
    pub n_terms: usize,
    pub last_term_mag: f64,
    pub tail_bound: f64,
    /// Least-squares geometric ratio of the last (up to 50) term magnitudes.
    pub decay_ratio: f64,
    /// Fewer than 50 terms were available for the decay fit.
    pub short_fit: bool,
    /// Partial sums of `|term|^β` when requested.
    pub beta_sums: Option<Vec<BetaSum>>,
    /// `T(c) - T(anchor)` when the sum was evaluated against a reference orbit.
    pub delta: Option<Complex64>,
}

/// Series settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumOptions {
    pub tol: f64,
    pub max_terms: usize,
    pub betas: Vec<f64>,
}

impl SumOptions {
    pub fn new(tol: f64, max_terms: usize) -> Self {
        SumOptions { tol, max_terms, betas: Vec::new() }
    }
}

/// Slope of `ln|term|` against the index, as a ratio.
fn fitted_ratio(mags: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = mags
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 0.0)
        .map(|(i, m)| (i as f64, m.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

fn geometric_tail(last: f64, ratio: f64) -> f64 {
    if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// One term of the series and what is known about the remaining terms.
struct Term {
    value: Complex64,
    /// Bound on every later term ratio, available once the orbit escapes.
    escape_ratio: Option<f64>,
}

struct Accumulator<'a> {
    opts: &'a SumOptions,
    value: Complex64,
    mags: Vec<f64>,
    betas: Vec<BetaSum>,
}

impl<'a> Accumulator<'a> {
    fn new(opts: &'a SumOptions) -> Self {
        Accumulator {
            opts,
            value: Complex64::new(0.0, 0.0),
            mags: Vec::new(),
            betas: opts.betas.iter().map(|&beta| BetaSum { beta, sum: 0.0, tail_bound: f64::INFINITY }).collect(),
        }
    }

    fn window(&self) -> &[f64] {
        &self.mags[self.mags.len().saturating_sub(FIT_WINDOW)..]
    }

    /// Adds a term and returns `(tail bound, decay ratio)`.
    fn push(&mut self, term: &Term) -> (f64, f64) {
        let m = term.value.norm();
        self.value += term.value;
        self.mags.push(m);
        let ratio = fitted_ratio(self.window());
        let bound_ratio = term.escape_ratio.unwrap_or(ratio);
        for b in &mut self.betas {
            b.sum += m.powf(b.beta);
            b.tail_bound = geometric_tail(m.powf(b.beta), bound_ratio.powf(b.beta));
        }
        (geometric_tail(m, bound_ratio), ratio)
    }

    fn finish(&self, tail_bound: f64, decay_ratio: f64, delta: Option<Complex64>) -> TransversalitySum {
        TransversalitySum {
            value: self.value,
            n_terms: self.mags.len(),
            last_term_mag: self.mags.last().copied().unwrap_or(0.0),
            tail_bound,
            decay_ratio,
            short_fit: self.mags.len() < FIT_WINDOW,
            beta_sums: (!self.betas.is_empty()).then(|| self.betas.clone()),
            delta,
        }
    }

    fn converged(&self, tail_bound: f64) -> bool {
        self.mags.len() >= 2
            && tail_bound < self.opts.tol
            && self.betas.iter().all(|b| b.tail_bound < self.opts.tol)
    }
}

fn escape_ratio(p: &MapParams, z: Complex64) -> Option<f64> {
    let r = z.norm();
    if r <= p.default_bailout() {
        return None;
    }
    let q = 1.0 / (p.d as f64 * r.powi(p.d as i32 - 1));
    (q < 1.0).then_some(q)
}

fn stalled(acc: &Accumulator, ratio: f64, escaped: bool) -> bool {
    !escaped && acc.mags.len() >= FIT_WINDOW && ratio >= STALL_RATIO
}

/// `T(c)` summed until the tail bound drops below `tol`.
pub fn transversality_sum(p: &MapParams, tol: f64, max_terms: usize) -> Result<TransversalitySum> {
    transversality_sum_with(p, &SumOptions::new(tol, max_terms))
}

pub fn transversality_sum_with(p: &MapParams, opts: &SumOptions) -> Result<TransversalitySum> {
    validate(opts)?;
    let mut acc = Accumulator::new(opts);
    let mut z = p.c;
    let mut der = Complex64::new(1.0, 0.0);
    let mut tail = f64::INFINITY;
    let mut ratio = f64::NAN;
    for n in 0..opts.max_terms {
        if n > 0 {
            der *= pow_d(z, p.d - 1) * p.d as f64;
            z = p.step(z);
        }
        if der == Complex64::new(0.0, 0.0) {
            return Err(non_convergent(acc.finish(tail, ratio, None), StallCause::ZeroDerivative { n }));
        }
        let esc = escape_ratio(p, z);
        (tail, ratio) = acc.push(&Term { value: der.inv(), escape_ratio: esc });
        if acc.converged(tail) || (esc.is_some() && !der.is_finite()) {
            return Ok(acc.finish(tail, ratio, None));
        }
        if stalled(&acc, ratio, esc.is_some()) {
            return Err(non_convergent(acc.finish(tail, ratio, None), StallCause::SlowDecay { ratio }));
        }
    }
    finish_at_budget(acc, tail, ratio, None)
}

fn validate(opts: &SumOptions) -> Result<()> {
    if !(opts.tol > 0.0) || opts.max_terms == 0 {
        return Err(Error::InvalidInput("tol must be positive and max_terms at least 1".into()));
    }
    Ok(())
}

fn non_convergent(partial: TransversalitySum, cause: StallCause) -> Error {
    Error::NonConvergent { partial: Box::new(partial), cause }
}

fn finish_at_budget(acc: Accumulator, tail: f64, ratio: f64, delta: Option<Complex64>) -> Result<TransversalitySum> {
    if ratio >= STALL_RATIO || ratio.is_nan() {
        return Err(non_convergent(acc.finish(tail, ratio, delta), StallCause::SlowDecay { ratio }));
    }
    Ok(acc.finish(tail, ratio, delta))
}

fn ln1p(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    Complex64::new(0.5 * (2.0 * x + x * x + y * y).ln_1p(), y.atan2(1.0 + x))
}

fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half = (0.5 * y).sin();
    Complex64::new(x.exp_m1() * y.cos() - 2.0 * half * half, x.exp() * y.sin())
}

/// `T(anchor + offset)` evaluated along the reference orbit of `anchor`.
///
/// The result also carries `delta = T(anchor + offset) - T(anchor)`,
/// accurate relative to its own size even when the offset is far below the
/// resolution of `anchor`. Anchors whose own series does not converge fall
/// back to the plain sum at the absolute point.
pub fn transversality_sum_anchored(
    d: u32,
    anchor: ComplexPoint,
    offset: Complex64,
    opts: &SumOptions,
) -> Result<TransversalitySum> {
    validate(opts)?;
    let pa = MapParams::new(d, anchor)?;
    let base = match transversality_sum_with(&pa, &SumOptions::new(opts.tol * 1e-4, opts.max_terms)) {
        Ok(b) if offset != Complex64::new(0.0, 0.0) => b,
        _ => return transversality_sum_with(&MapParams::new(d, anchor + offset)?, opts),
    };
    let p = MapParams::new(d, anchor + offset)?;
    let reference = ReferenceOrbit::new(d, OrbitKind::Critical, anchor, opts.max_terms + 1);
    let mut orbit = reference.orbit(offset);
    let dm1 = (d - 1) as f64;

    let mut acc = Accumulator::new(opts);
    let mut delta = Complex64::new(0.0, 0.0);
    let mut delta_mags: Vec<f64> = Vec::new();
    // log of the ratio between the local and the reference derivative
    let mut log_rel = Complex64::new(0.0, 0.0);
    let mut ref_der = Complex64::new(1.0, 0.0);
    let mut der = Complex64::new(1.0, 0.0);
    let mut perturbative = true;
    let mut tail = f64::INFINITY;
    let mut ratio = f64::NAN;

    for n in 0..opts.max_terms {
        let (w, split) = orbit.next_split();
        let ref_term = if ref_der.norm() > 0.0 { ref_der.inv() } else { Complex64::new(0.0, 0.0) };
        let ref_term = if ref_term.is_finite() { ref_term } else { Complex64::new(0.0, 0.0) };
        let (term, d_n) = if perturbative {
            let t = ref_term * (-dm1 * log_rel).exp();
            (t, ref_term * expm1(-dm1 * log_rel))
        } else {
            let t = if der.is_finite() { der.inv() } else { Complex64::new(0.0, 0.0) };
            (t, t - ref_term)
        };
        if term.is_nan() || (der == Complex64::new(0.0, 0.0)) {
            return Err(non_convergent(acc.finish(tail, ratio, Some(delta)), StallCause::ZeroDerivative { n }));
        }
        delta += d_n;
        delta_mags.push(d_n.norm());
        let esc = escape_ratio(&p, w.val);
        (tail, ratio) = acc.push(&Term { value: term, escape_ratio: esc });

        let ref_tail = geometric_tail(ref_term.norm(), base.decay_ratio.max(0.0));
        let delta_tail = match esc {
            Some(q) => geometric_tail(term.norm(), q) + ref_tail,
            None => {
                let dm = &delta_mags[delta_mags.len().saturating_sub(FIT_WINDOW)..];
                geometric_tail(d_n.norm(), fitted_ratio(dm))
            }
        };
        if n >= 2 && delta_tail <= opts.tol * delta.norm() && acc.converged(tail) {
            let mut out = acc.finish(tail, ratio, Some(delta));
            out.value = base.value + delta;
            return Ok(out);
        }
        if stalled(&acc, ratio, esc.is_some()) {
            return Err(non_convergent(acc.finish(tail, ratio, Some(delta)), StallCause::SlowDecay { ratio }));
        }

        // advance the derivative products past w_n
        match (perturbative, split) {
            (true, Some((wr, e))) => {
                log_rel += ln1p(e / wr);
                ref_der *= pow_d(wr, d - 1) * d as f64;
            }
            (true, None) => {
                perturbative = false;
                der = ref_der * (dm1 * log_rel).exp() * pow_d(w.val, d - 1) * d as f64;
                ref_der = advance_reference(&reference, n, ref_der, d);
            }
            (false, _) => {
                der *= pow_d(w.val, d - 1) * d as f64;
                ref_der = advance_reference(&reference, n, ref_der, d);
            }
        }
    }
    let mut out = finish_at_budget(acc, tail, ratio, Some(delta))?;
    out.value = base.value + delta;
    Ok(out)
}

fn advance_reference(reference: &ReferenceOrbit, n: usize, ref_der: Complex64, d: u32) -> Complex64 {
    match reference.point(n) {
        Some(wr) => ref_der * pow_d(wr, d - 1) * d as f64,
        None => Complex64::new(f64::INFINITY, 0.0),
    }
}

/// Cross-check of `D_cΦ(c) / ∂_zφ_c(c)` against `T(c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_err: f64,
}

pub fn verify_derivative_identity(p: &MapParams, tol: f64) -> Result<IdentityReport> {
    let total = param_bottcher(p.d, p.c, tol)?;
    let partial = bottcher_jet(p, p.c, Variable::Z, tol)?;
    let lhs = total.der / partial.der;
    let rhs = transversality_sum(p, tol, DEFAULT_MAX_TERMS)?.value;
    Ok(IdentityReport { lhs, rhs, rel_err: (lhs - rhs).norm() / rhs.norm() })
}

/// `Σ |D_z f_c^n(c)|^{-β}` for `0 < β ≤ 1`.
pub fn summability(p: &MapParams, beta: f64, tol: f64, max_terms: usize) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidInput(format!("beta must lie in (0, 1], got {beta}")));
    }
    let opts = SumOptions { tol, max_terms, betas: vec![beta] };
    let s = transversality_sum_with(p, &opts)?;
    Ok(s.beta_sums.expect("requested")[0].sum)
}

/// One row of the ray-limit table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayLimitRow {
    pub t: f64,
    pub c: Option<ComplexPoint>,
    pub sum: Option<TransversalitySum>,
    /// `|T(c(t_k)) - T(c(t_{k-1}))|` against the previous row.
    pub increment: Option<f64>,
    pub failure: Option<String>,
}

/// `T` along the parameter ray at `angle`, one row per requested potential.
pub fn ray_limit_transversality(
    d: u32,
    angle: &AngleRational,
    potentials: &[f64],
    opts: &SumOptions,
    cfg: &TraceConfig,
) -> Result<Vec<RayLimitRow>> {
    if potentials.is_empty() {
        return Ok(Vec::new());
    }
    let t_low = potentials.iter().copied().fold(f64::INFINITY, f64::min);
    let mut tc = cfg.clone();
    tc.t_min = tc.t_min.min(t_low);
    tc.required.extend_from_slice(potentials);
    let (ray, trace_failure): (RayPolyline, Option<&str>) = match trace_parameter_ray(d, angle, &tc) {
        Ok(r) => (r, None),
        Err(Error::NewtonStall { partial, .. }) => (*partial, Some("NewtonStall")),
        Err(e) => return Err(e),
    };

    let mut rows: Vec<RayLimitRow> = Vec::with_capacity(potentials.len());
    let mut failed: Option<String> = None;
    for &t in potentials {
        let sample = ray.samples.iter().find(|s| s.t == t);
        let row = match (sample, &failed) {
            (_, Some(f)) => RayLimitRow { t, c: None, sum: None, increment: None, failure: Some(f.clone()) },
            (None, None) => {
                let kind = trace_failure.unwrap_or("Missing");
                failed = Some(kind.to_string());
                RayLimitRow { t, c: None, sum: None, increment: None, failure: failed.clone() }
            }
            (Some(s), None) => {
                let c = ray.anchor + s.offset;
                match transversality_sum_anchored(d, ray.anchor, s.offset, opts) {
                    Ok(sum) => {
                        let increment = rows.last().and_then(|prev| prev.sum.as_ref()).map(|prev| {
                            match (prev.delta, sum.delta) {
                                (Some(a), Some(b)) => (b - a).norm(),
                                _ => (sum.value - prev.value).norm(),
                            }
                        });
                        RayLimitRow { t, c: Some(c), sum: Some(sum), increment, failure: None }
                    }
                    Err(e) => {
                        failed = Some(e.kind().to_string());
                        RayLimitRow { t, c: Some(c), sum: None, increment: None, failure: failed.clone() }
                    }
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}
