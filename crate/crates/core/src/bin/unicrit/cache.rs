//! Content-addressed cache of traced rays.
//!
//! Entries live in `$RAYCACHE_DIR` (default `./.raycache`) under the SHA-256
//! of a canonical key string. Floats enter the key through their bit
//! patterns, so distinct parameter tuples never share an entry.

use std::path::PathBuf;

use unicrit::io::sha256_hex;
use unicrit::rays::{from_binary, to_binary, RayPolyline, TraceConfig};
use unicrit::{AngleRational, Plane};

pub fn dir() -> PathBuf {
    std::env::var_os("RAYCACHE_DIR").map_or_else(|| PathBuf::from(".raycache"), PathBuf::from)
}

pub fn key(plane: Plane, d: u32, angle: &AngleRational, cfg: &TraceConfig) -> String {
    let bits = |x: f64| format!("{:016x}", x.to_bits());
    let plane = match plane {
        Plane::Parameter => "param".to_string(),
        Plane::Dynamical { c } => format!("dyn:{}:{}", bits(c.re), bits(c.im)),
    };
    let anchor = cfg.anchor.map_or("none".to_string(), |a| format!("{}:{}", bits(a.re), bits(a.im)));
    format!(
        "unicrit-ray|v{}|{plane}|d={d}|angle={angle}|t_start={}|t_min={}|steps={}|ray_tol={}|t_floor={}|anchor={anchor}",
        env!("CARGO_PKG_VERSION"),
        bits(cfg.t_start),
        bits(cfg.t_min),
        cfg.steps_per_halving,
        bits(cfg.ray_tol),
        bits(cfg.t_floor),
    )
}

fn path(key: &str) -> PathBuf {
    dir().join(format!("{}.ray", sha256_hex(key.as_bytes())))
}

pub fn load(key: &str) -> Option<RayPolyline> {
    let bytes = std::fs::read(path(key)).ok()?;
    from_binary(&bytes).ok()
}

/// Failures to write the cache are reported but never fatal.
pub fn store(key: &str, ray: &RayPolyline) -> Option<String> {
    let p = path(key);
    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(dir())?;
        let tmp = p.with_extension("tmp");
        std::fs::write(&tmp, to_binary(ray))?;
        std::fs::rename(&tmp, &p)
    };
    write().err().map(|e| e.to_string())
}
