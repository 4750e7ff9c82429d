//! Sampling and raster subcommands.

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use unicrit::io::{g17, Table};
use unicrit::probes::{area_scaling_scan, hedgehog_detect, porosity_scan, sample_harmonic_measure, Raster};
use unicrit::rays::TraceConfig;

use crate::args::{complex, default_modulus, potential, pots, Pots, RasterArgs, TraceArgs, SYNTHETIC_R_IN};
use crate::run::{Outcome, Output};

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "2^-16", value_parser = potential)]
    pub tmin: f64,
    #[command(flatten)]
    pub trace: TraceArgs,
}

pub fn sample(a: &SampleArgs) -> Outcome {
    let cfg: TraceConfig = a.trace.config(a.tmin);
    let samples = sample_harmonic_measure(a.d, a.n, a.seed, &cfg);
    let mut table = Table::new(&[
        "index", "angle", "angle_turns", "landing_re", "landing_im", "error_bound", "model", "t_min_reached", "failure",
    ]);
    let mut failures = 0;
    for s in &samples {
        let l = s.landing.as_ref();
        failures += usize::from(s.failure.is_some());
        table.push(vec![
            s.index.to_string(),
            s.angle.to_string(),
            g17(s.angle.to_f64()),
            l.map(|l| g17(l.point.re)).unwrap_or_default(),
            l.map(|l| g17(l.point.im)).unwrap_or_default(),
            l.map(|l| g17(l.error_bound)).unwrap_or_default(),
            l.map(|l| format!("{:?}", l.model).to_lowercase()).unwrap_or_default(),
            g17(s.t_min_reached),
            s.failure.clone().unwrap_or_default(),
        ]);
    }
    let mut out = Outcome::ok(
        vec![Output::text("sample.csv", table.to_csv())],
        json!({ "samples": samples.len(), "failures": failures }),
    );
    out.seed = Some(a.seed);
    out
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DeepscanArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c0: Complex64,
    /// Decreasing radii, e.g. 2^-4..2^-9.
    #[arg(long, value_parser = pots)]
    pub radii: Pots,
    /// Cells per radius.
    #[arg(long, default_value_t = 512)]
    pub res: usize,
    #[arg(long, default_value_t = 1000)]
    pub maxit: usize,
}

pub fn deepscan(a: &DeepscanArgs) -> Outcome {
    match area_scaling_scan(a.d, a.c0, &a.radii.0, a.res, a.maxit) {
        Ok(scan) => {
            let mut table = Table::new(&["r", "area_lo", "area_hi", "ratio_hi"]);
            for r in &scan.rows {
                table.push([r.r, r.area_lo, r.area_hi, r.ratio_hi].map(g17).to_vec());
            }
            let fit = json!({ "slope": scan.slope });
            Outcome::ok(
                vec![Output::text("deepscan.csv", table.to_csv()), Output::json("deepscan.json", &fit)],
                fit,
            )
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}

fn raster_or_fail(a: &RasterArgs) -> Result<Raster, Outcome> {
    a.build().map_err(|e| Outcome::failed(Vec::new(), e))
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PorosityArgs {
    #[command(flatten)]
    pub raster: RasterArgs,
    /// Centre of the probing disks (defaults to the raster centre).
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub at: Option<Complex64>,
    #[arg(long, value_parser = pots)]
    pub scales: Pots,
}

pub fn porosity(a: &PorosityArgs) -> Outcome {
    let raster = match raster_or_fail(&a.raster) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let at = a.at.unwrap_or(raster.bounds.center);
    match porosity_scan(&raster, at, &a.scales.0) {
        Ok(rows) => {
            let mut table = Table::new(&["r", "beta", "witness_re", "witness_im"]);
            for r in &rows {
                table.push([r.r, r.beta, r.witness.re, r.witness.im].map(g17).to_vec());
            }
            Outcome::ok(vec![Output::text("porosity.csv", table.to_csv())], json!({ "rows": rows.len() }))
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HedgehogArgs {
    #[command(flatten)]
    pub raster: RasterArgs,
    /// Centre of the annulus (defaults to the raster centre).
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub at: Option<Complex64>,
    #[arg(long, default_value_t = SYNTHETIC_R_IN)]
    pub rin: f64,
    #[arg(long, default_value_t = 2.0 * SYNTHETIC_R_IN)]
    pub rout: f64,
    /// Required modulus (default log 2 / 2π).
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
}

pub fn hedgehog(a: &HedgehogArgs) -> Outcome {
    let raster = match raster_or_fail(&a.raster) {
        Ok(r) => r,
        Err(o) => return o,
    };
    let at = a.at.unwrap_or(raster.bounds.center);
    match hedgehog_detect(&raster, at, a.rin, a.rout, a.m.unwrap_or_else(default_modulus), a.eps) {
        Ok(rep) => {
            let summary = serde_json::to_value(&rep).expect("serialisable report");
            Outcome::ok(vec![Output::json("hedgehog.json", &rep)], summary)
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RenderArgs {
    #[command(flatten)]
    pub raster: RasterArgs,
}

pub fn render(a: &RenderArgs) -> Outcome {
    match raster_or_fail(&a.raster) {
        Ok(r) => {
            let sidecar = r.sidecar();
            Outcome::ok(
                vec![Output { file: "render.pgm".into(), bytes: r.to_pgm() }, Output::json("render.json", &sidecar)],
                json!({ "nx": r.nx, "ny": r.ny, "counts": sidecar["counts"] }),
            )
        }
        Err(o) => o,
    }
}
