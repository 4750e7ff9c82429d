//! Subcommands that trace rays: `ray`, `raylimit`, `geo` and `access`.

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use unicrit::io::{g17, Table};
use unicrit::probes::iterated_log_access;
use unicrit::rays::{
    geodesic_ratio_experiment, landing_estimate, landing_estimate_partial, to_csv, trace_dynamical_ray, trace_parameter_ray, LandingEstimate, RayPolyline,
};
use unicrit::transversality::{ray_limit_transversality, SumOptions, DEFAULT_MAX_TERMS};
use unicrit::{AngleRational, Error, MapParams, Plane};

use crate::args::{angle, complex, potential, pots, PlaneArg, Pots, TraceArgs};
use crate::cache;
use crate::run::{Outcome, Output};

fn csv(file: &str, table: &Table) -> Output {
    Output::text(file, table.to_csv())
}

fn opt(x: Option<f64>) -> String {
    x.map(g17).unwrap_or_default()
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RayArgs {
    #[arg(long, value_enum, default_value = "param")]
    pub plane: PlaneArg,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Parameter of the dynamical plane.
    #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
    pub c: Complex64,
    #[arg(long, value_parser = angle)]
    pub angle: AngleRational,
    #[arg(long, default_value = "2^-20", value_parser = potential)]
    pub tmin: f64,
    #[command(flatten)]
    pub trace: TraceArgs,
    /// Ignore and do not update the ray cache.
    #[arg(long)]
    pub no_cache: bool,
}

pub fn ray(a: &RayArgs) -> Outcome {
    let cfg = a.trace.config(a.tmin);
    let plane = a.plane.plane(a.c);
    let key = cache::key(plane, a.d, &a.angle, &cfg);
    let cached = if a.no_cache { None } else { cache::load(&key) };
    let hit = cached.is_some();
    let traced = match cached {
        Some(r) => Ok(r),
        None => match plane {
            Plane::Parameter => trace_parameter_ray(a.d, &a.angle, &cfg),
            Plane::Dynamical { c } => MapParams::new(a.d, c).and_then(|p| trace_dynamical_ray(&p, &a.angle, &cfg)),
        },
    };
    let mut out = match traced {
        Ok(r) => {
            let store_error = if a.no_cache || hit { None } else { cache::store(&key, &r) };
            let mut out = finish_ray(&r, landing_estimate);
            if let Some(e) = store_error {
                out.notes.insert("cache_error".into(), json!(e));
            }
            out
        }
        Err(Error::NewtonStall { last_good_t, partial }) => {
            let done = finish_ray(&partial, landing_estimate_partial);
            let mut out = Outcome::failed(done.outputs, Error::NewtonStall { last_good_t, partial });
            out.summary = done.summary;
            out.notes.insert("partial".into(), json!(true));
            out.notes.insert("last_good_t".into(), json!(last_good_t));
            out
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    };
    out.notes.insert("cache".into(), json!(if a.no_cache { "off" } else if hit { "hit" } else { "miss" }));
    out.notes.insert("cache_key".into(), json!(key));
    out
}

fn finish_ray(r: &RayPolyline, estimate: fn(&RayPolyline) -> unicrit::Result<LandingEstimate>) -> Outcome {
    let samples = csv("ray.csv", &to_csv(r));
    let landing = match estimate(r) {
        Ok(l) => json!({ "landing": l }),
        Err(e) => json!({ "landing": null, "failure": e.to_string() }),
    };
    let summary = json!({ "samples": r.len(), "landing": landing["landing"] });
    Outcome::ok(vec![samples, Output::json("ray.landing.json", &landing)], summary)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RayLimitArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = angle)]
    pub angle: AngleRational,
    /// Potentials, e.g. 2^-4..2^-30.
    #[arg(long, value_parser = pots)]
    pub pots: Pots,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    #[command(flatten)]
    pub trace: TraceArgs,
}

pub fn raylimit(a: &RayLimitArgs) -> Outcome {
    let lowest = a.pots.0.iter().copied().fold(f64::INFINITY, f64::min);
    let cfg = a.trace.config(lowest.min(a.trace.tstart));
    let rows = match ray_limit_transversality(a.d, &a.angle, &a.pots.0, &SumOptions::new(a.tol, a.max_terms), &cfg) {
        Ok(rows) => rows,
        Err(e) => return Outcome::failed(Vec::new(), e),
    };
    let mut table = Table::new(&[
        "t", "c_re", "c_im", "T_re", "T_im", "n_terms", "tail_bound", "delta_re", "delta_im", "increment", "failure",
    ]);
    for r in &rows {
        let c = r.c.map(|c| (Some(c.re), Some(c.im))).unwrap_or((None, None));
        let s = r.sum.as_ref();
        table.push(vec![
            g17(r.t),
            opt(c.0),
            opt(c.1),
            opt(s.map(|s| s.value.re)),
            opt(s.map(|s| s.value.im)),
            s.map(|s| s.n_terms.to_string()).unwrap_or_default(),
            opt(s.map(|s| s.tail_bound)),
            opt(s.and_then(|s| s.delta).map(|d| d.re)),
            opt(s.and_then(|s| s.delta).map(|d| d.im)),
            opt(r.increment),
            r.failure.clone().unwrap_or_default(),
        ]);
    }
    let last = rows.iter().rev().find_map(|r| r.sum.as_ref().map(|s| (r.t, s.value)));
    Outcome::ok(
        vec![csv("raylimit.csv", &table)],
        json!({ "rows": rows.len(), "innermost": last.map(|(t, v)| json!({ "t": t, "T": v })) }),
    )
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GeoArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = angle)]
    pub angle: AngleRational,
    /// Landing parameter shared by both rays.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c0: Complex64,
    #[arg(long, value_parser = pots)]
    pub pots: Pots,
    #[command(flatten)]
    pub trace: TraceArgs,
}

pub fn geo(a: &GeoArgs) -> Outcome {
    let cfg = a.trace.config(a.trace.tstart.min(a.pots.0.iter().copied().fold(f64::INFINITY, f64::min)));
    match geodesic_ratio_experiment(a.d, &a.angle, a.c0, &a.pots.0, &cfg) {
        Ok(rows) => {
            let mut table = Table::new(&["t", "gamma", "big_gamma", "ratio"]);
            for r in &rows {
                table.push(vec![g17(r.t), g17(r.gamma), g17(r.big_gamma), g17(r.ratio)]);
            }
            Outcome::ok(vec![csv("geo.csv", &table)], json!({ "rows": rows.len(), "last": rows.last() }))
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AccessArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = angle)]
    pub angle: AngleRational,
    #[arg(long, value_parser = pots)]
    pub pots: Pots,
    /// Number of nested logarithms.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[command(flatten)]
    pub trace: TraceArgs,
}

pub fn access(a: &AccessArgs) -> Outcome {
    let cfg = a.trace.config(a.trace.tstart.min(a.pots.0.iter().copied().fold(f64::INFINITY, f64::min)));
    match iterated_log_access(a.d, &a.angle, &a.pots.0, a.m, &cfg) {
        Ok(rows) => {
            let mut table = Table::new(&[
                "t", "c_re", "c_im", "e_l", "e_u", "diam_tail", "arclen_tail", "functional_lo", "functional_hi",
            ]);
            for r in &rows {
                table.push(
                    [r.t, r.c.re, r.c.im, r.e_l, r.e_u, r.diam_tail, r.arclen_tail, r.functional_lo, r.functional_hi]
                        .map(g17)
                        .to_vec(),
                );
            }
            Outcome::ok(vec![csv("access.csv", &table)], json!({ "rows": rows.len() }))
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}
