//! Text formats shared by the library writers and the command-line tool.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Formats a float like C's `%.17g`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV table: header row plus string cells, LF line endings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<String> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, bytes)?;
    Ok(sha256_hex(bytes))
}

/// Parses potentials written as plain floats, `2^-k`, or geometric ranges
/// `2^-a..2^-b` (one value per integer exponent), separated by commas.
/// The result keeps the order given.
pub fn parse_potentials(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let ea = power_of_two_exponent(a)?;
            let eb = power_of_two_exponent(b)?;
            let step = if eb >= ea { 1 } else { -1 };
            let mut e = ea;
            loop {
                out.push(2f64.powi(e));
                if e == eb {
                    break;
                }
                e += step;
            }
        } else {
            out.push(parse_potential(item)?);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("empty potential list".into()));
    }
    if let Some(bad) = out.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput(format!("potentials must be positive, got {bad}")));
    }
    Ok(out)
}

/// A single potential: a float or `2^k`.
pub fn parse_potential(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.starts_with("2^") {
        return Ok(2f64.powi(power_of_two_exponent(s)?));
    }
    s.parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("cannot parse potential {s:?}")))
}

fn power_of_two_exponent(s: &str) -> Result<i32> {
    s.trim()
        .strip_prefix("2^")
        .and_then(|e| e.parse::<i32>().ok())
        .ok_or_else(|| Error::InvalidInput(format!("expected 2^k, got {s:?}")))
}
