//! CSV and compact binary encodings of ray polylines.

use num_complex::Complex64;

use super::{RayPolyline, RaySample};
use crate::dynamics::Plane;
use crate::error::{Error, Result};
use crate::io::{g17, Table};

/// Table with columns `t, re, im, arc_prefix`, outermost sample first.
pub fn to_csv(ray: &RayPolyline) -> Table {
    let mut table = Table::new(&["t", "re", "im", "arc_prefix"]);
    for (i, s) in ray.samples.iter().enumerate() {
        let z = ray.point(i);
        table.push(vec![g17(s.t), g17(z.re), g17(z.im), g17(ray.arc_prefix[i])]);
    }
    table
}

const MAGIC: &[u8; 8] = b"UCRAY\x00\x00\x01";

/// Layout: magic, u32 header length, JSON header (plane, degree, angle,
/// anchor), u64 sample count, then per sample `t, re offset, im offset` as
/// little-endian f64 and one substep byte.
pub fn to_binary(ray: &RayPolyline) -> Vec<u8> {
    let header = serde_json::json!({
        "plane": ray.plane,
        "d": ray.d,
        "angle": ray.angle,
        "anchor": [ray.anchor.re, ray.anchor.im],
    })
    .to_string();
    let mut out = Vec::with_capacity(24 + header.len() + 25 * ray.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&(ray.len() as u64).to_le_bytes());
    for s in &ray.samples {
        for x in [s.t, s.offset.re, s.offset.im] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.push(s.substep as u8);
    }
    out
}

pub fn from_binary(bytes: &[u8]) -> Result<RayPolyline> {
    let bad = || Error::InvalidInput("malformed ray record".into());
    let mut pos = 0;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + n).ok_or_else(bad)?;
        pos += n;
        Ok(s)
    };
    if take(8)? != MAGIC {
        return Err(bad());
    }
    let hlen = u32::from_le_bytes(take(4)?.try_into().map_err(|_| bad())?) as usize;
    let header: serde_json::Value = serde_json::from_slice(take(hlen)?)?;
    let plane: Plane = serde_json::from_value(header["plane"].clone())?;
    let d = header["d"].as_u64().ok_or_else(bad)? as u32;
    let angle = serde_json::from_value(header["angle"].clone())?;
    let anchor: [f64; 2] = serde_json::from_value(header["anchor"].clone())?;
    let n = u64::from_le_bytes(take(8)?.try_into().map_err(|_| bad())?) as usize;
    let mut samples = Vec::with_capacity(n);
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("eight bytes"));
    for _ in 0..n {
        let b = take(25)?;
        samples.push(RaySample {
            t: f(&b[0..8]),
            offset: Complex64::new(f(&b[8..16]), f(&b[16..24])),
            substep: b[24] != 0,
        });
    }
    Ok(RayPolyline::new(plane, d, angle, Complex64::new(anchor[0], anchor[1]), samples))
}
