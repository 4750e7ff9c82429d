//! Scalar subcommands: one JSON record per run.

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use unicrit::potential::{bottcher_jet, external_angle_with, green_with, EvalConfig};
use unicrit::probes::lyapunov;
use unicrit::transversality::{transversality_sum, verify_derivative_identity, DEFAULT_MAX_TERMS};
use unicrit::{Error, MapParams, Variable};

use crate::args::complex;
use crate::run::{Outcome, Output};

#[derive(Debug, Clone, Args, Serialize)]
pub struct PointArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c: Complex64,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub z: Complex64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = unicrit::potential::DEFAULT_MAXIT)]
    pub maxit: usize,
    /// Also report derivatives in z and c.
    #[arg(long)]
    pub jet: bool,
}

impl PointArgs {
    fn eval(&self) -> EvalConfig {
        EvalConfig { tol: self.tol, maxit: self.maxit }
    }
}

fn record(name: &str, value: serde_json::Value) -> Outcome {
    Outcome::ok(vec![Output::json(&format!("{name}.json"), &value)], value)
}

fn attempt(name: &str, f: impl FnOnce() -> unicrit::Result<serde_json::Value>) -> Outcome {
    match f() {
        Ok(v) => record(name, v),
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}

pub fn green(a: &PointArgs) -> Outcome {
    attempt("green", || {
        let p = MapParams::new(a.d, a.c)?;
        let t = green_with(&p, a.z, &a.eval())?;
        Ok(json!({ "d": a.d, "c": a.c, "z": a.z, "t": t }))
    })
}

pub fn bottcher(a: &PointArgs) -> Outcome {
    attempt("bottcher", || {
        let p = MapParams::new(a.d, a.c)?;
        let jz = bottcher_jet(&p, a.z, Variable::Z, a.tol)?;
        let mut v = json!({ "d": a.d, "c": a.c, "z": a.z, "phi": jz.val });
        if a.jet {
            v["dphi_dz"] = json!(jz.der);
            v["dphi_dc"] = json!(bottcher_jet(&p, a.z, Variable::C, a.tol)?.der);
        }
        Ok(v)
    })
}

pub fn angle(a: &PointArgs) -> Outcome {
    attempt("angle", || {
        let p = MapParams::new(a.d, a.c)?;
        let b = external_angle_with(&p, a.z, &a.eval())?;
        Ok(json!({ "d": a.d, "c": a.c, "z": a.z, "t": b.t, "theta": b.theta }))
    })
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c: Complex64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
}

pub fn transversality(a: &ParamArgs) -> Outcome {
    let p = match MapParams::new(a.d, a.c) {
        Ok(p) => p,
        Err(e) => return Outcome::failed(Vec::new(), e),
    };
    match transversality_sum(&p, a.tol, a.max_terms) {
        Ok(s) => record("transversality", json!({ "d": a.d, "c": a.c, "sum": s })),
        Err(Error::NonConvergent { partial, cause }) => {
            let v = json!({ "d": a.d, "c": a.c, "partial": partial, "cause": cause });
            Outcome::failed(
                vec![Output::json("transversality.json", &v)],
                Error::NonConvergent { partial, cause },
            )
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}

/// Exit status when the identity check exceeds the tolerance.
pub const VERIFY_MISMATCH: i32 = 11;

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c: Complex64,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Accuracy of the underlying evaluations.
    #[arg(long, default_value_t = 1e-12)]
    pub eval_tol: f64,
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let result = MapParams::new(a.d, a.c).and_then(|p| verify_derivative_identity(&p, a.eval_tol));
    match result {
        Ok(r) => {
            let pass = r.rel_err <= a.tol;
            let mut out = record(
                "verify",
                json!({ "d": a.d, "c": a.c, "lhs": r.lhs, "rhs": r.rhs, "rel_err": r.rel_err, "pass": pass }),
            );
            if !pass {
                out.verdict_code = Some(VERIFY_MISMATCH);
            }
            out
        }
        Err(e) => Outcome::failed(Vec::new(), e),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LyapunovArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    pub c: Complex64,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
}

pub fn lyapunov_cmd(a: &LyapunovArgs) -> Outcome {
    attempt("lyapunov", || {
        let lambda = lyapunov(&MapParams::new(a.d, a.c)?, a.n)?;
        Ok(json!({ "d": a.d, "c": a.c, "n": a.n, "lambda": lambda }))
    })
}
