//! Value parsers and argument groups shared by several subcommands.

use std::f64::consts::TAU;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use unicrit::io::{parse_potential, parse_potentials};
use unicrit::probes::{membership_grid, synthetic, Raster, Region};
use unicrit::rays::TraceConfig;
use unicrit::{AngleRational, Plane, Result};

/// `re` or `re,im`.
pub fn complex(s: &str) -> std::result::Result<Complex64, String> {
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("not a number: {x:?}"));
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

pub fn angle(s: &str) -> std::result::Result<AngleRational, String> {
    s.parse().map_err(|e: unicrit::Error| e.to_string())
}

pub fn potential(s: &str) -> std::result::Result<f64, String> {
    parse_potential(s).map_err(|e| e.to_string())
}

/// A list of potentials or radii: `2^-a..2^-b` ranges and single values, comma separated.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Pots(pub Vec<f64>);

pub fn pots(s: &str) -> std::result::Result<Pots, String> {
    parse_potentials(s).map(Pots).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneArg {
    #[value(alias = "parameter")]
    Param,
    #[value(alias = "dynamical")]
    Dyn,
}

impl PlaneArg {
    pub fn plane(self, c: Complex64) -> Plane {
        match self {
            PlaneArg::Param => Plane::Parameter,
            PlaneArg::Dyn => Plane::Dynamical { c },
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TraceArgs {
    /// Outermost potential of the trace.
    #[arg(long, default_value = "4", value_parser = potential)]
    pub tstart: f64,
    /// Samples per halving of the potential.
    #[arg(long, default_value_t = 8)]
    pub steps: u32,
    /// Relative Newton tolerance per sample.
    #[arg(long, default_value_t = 1e-10)]
    pub ray_tol: f64,
    /// Lowest admissible potential (default 2^-40).
    #[arg(long, value_parser = potential)]
    pub tfloor: Option<f64>,
    /// Reference point for the perturbative orbit (for example the expected landing point).
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub anchor: Option<Complex64>,
}

impl TraceArgs {
    pub fn config(&self, t_min: f64) -> TraceConfig {
        let mut cfg = TraceConfig::new(self.tstart, t_min, self.steps);
        cfg.ray_tol = self.ray_tol;
        if let Some(f) = self.tfloor {
            cfg = cfg.with_floor(f);
        }
        if let Some(a) = self.anchor {
            cfg = cfg.with_anchor(a);
        }
        cfg
    }
}

/// Either an escape-time raster or a synthetic fixture on `[-1, 1]^2`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RasterArgs {
    /// Synthetic fixture: spikes:K, empty-annulus, half-plane, segment or empty.
    #[arg(long)]
    pub synthetic: Option<String>,
    #[arg(long, value_enum, default_value = "dyn")]
    pub plane: PlaneArg,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
    pub c: Complex64,
    /// Centre of the raster region.
    #[arg(long, default_value = "0", value_parser = complex, allow_hyphen_values = true)]
    pub center: Complex64,
    #[arg(long, default_value_t = 2.0)]
    pub halfwidth: f64,
    /// Cells per side.
    #[arg(long, default_value_t = 1024)]
    pub res: usize,
    #[arg(long, default_value_t = 1000)]
    pub maxit: usize,
    #[arg(long)]
    pub bailout: Option<f64>,
}

impl RasterArgs {
    pub fn build(&self) -> Result<Raster> {
        if let Some(name) = &self.synthetic {
            return synthetic_raster(name, self.res);
        }
        membership_grid(
            self.plane.plane(self.c),
            self.d,
            Region::square(self.center, self.halfwidth),
            self.res,
            self.res,
            self.maxit,
            self.bailout,
        )
    }
}

/// Inner radius used by the synthetic hedgehog fixtures.
pub const SYNTHETIC_R_IN: f64 = 0.4;

fn synthetic_raster(name: &str, n: usize) -> Result<Raster> {
    let bad = || unicrit::Error::InvalidInput(format!("unknown synthetic fixture {name:?}"));
    Ok(match name.split_once(':') {
        Some(("spikes", k)) => synthetic::spikes(n, k.parse().map_err(|_| bad())?, SYNTHETIC_R_IN),
        None if name == "empty-annulus" => synthetic::empty_annulus(n, SYNTHETIC_R_IN),
        None if name == "half-plane" => synthetic::half_plane(n),
        None if name == "segment" => synthetic::segment(n, 0.9),
        None if name == "empty" => synthetic::empty(n),
        _ => return Err(bad()),
    })
}

pub fn default_modulus() -> f64 {
    2f64.ln() / TAU
}
