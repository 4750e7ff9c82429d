//! Iteration of `f_c(z) = z^d + c`, derivative jets, and escape classification.

mod jet;
mod perturb;

pub use jet::Jet;
pub use perturb::{LocalOrbit, LocalPoint, OrbitKind, ReferenceOrbit};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexPoint = Complex64;

/// Magnitudes beyond this are reported as overflow instead of drifting to infinity.
pub const OVERFLOW_THRESHOLD: f64 = 1e150;

/// Degree and parameter of the map `z ↦ z^d + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub d: u32,
    pub c: ComplexPoint,
}

impl MapParams {
    pub fn new(d: u32, c: ComplexPoint) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("degree must be >= 2, got {d}")));
        }
        if !c.is_finite() {
            return Err(Error::InvalidInput("parameter c must be finite".into()));
        }
        Ok(MapParams { d, c })
    }

    #[inline]
    pub fn step(&self, z: ComplexPoint) -> ComplexPoint {
        pow_d(z, self.d) + self.c
    }

    /// `max(2, |c|)^(1/(d-1)) + 1`: beyond this radius `|f_c(z)| > |z|`.
    pub fn default_bailout(&self) -> f64 {
        self.c.norm().max(2.0).powf(1.0 / (self.d - 1) as f64) + 1.0
    }

    /// Radius beyond which `|c / z^d| <= 0.1` and principal logarithms in the
    /// Böttcher series are safe: `10 (1 + |c|)^(1/(d-1))`.
    pub fn asymptotic_radius(&self) -> f64 {
        asymptotic_radius(self.d, self.c)
    }
}

pub fn asymptotic_radius(d: u32, c: ComplexPoint) -> f64 {
    10.0 * (1.0 + c.norm()).powf(1.0 / (d - 1) as f64)
}

#[inline]
pub(crate) fn pow_d(z: Complex64, d: u32) -> Complex64 {
    match d {
        1 => z,
        2 => z * z,
        3 => z * z * z,
        _ => z.powu(d),
    }
}

/// Which variable a jet differentiates with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Z,
    C,
}

/// Where a point lives: the dynamical plane of a fixed `f_c`, or the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "plane", rename_all = "lowercase")]
pub enum Plane {
    Dynamical { c: ComplexPoint },
    Parameter,
}

fn check(z: Complex64, step: usize) -> Result<()> {
    if z.re.abs() <= OVERFLOW_THRESHOLD && z.im.abs() <= OVERFLOW_THRESHOLD {
        Ok(())
    } else {
        Err(Error::Overflow { step })
    }
}

/// `f_c^n(z0)`.
pub fn iterate(p: &MapParams, z0: ComplexPoint, n: usize) -> Result<ComplexPoint> {
    let mut z = z0;
    for k in 0..n {
        z = p.step(z);
        check(z, k + 1)?;
    }
    Ok(z)
}

/// `D_z f_c^n` at the critical value, with a flag when the product vanished.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitDerivative {
    pub value: ComplexPoint,
    /// The orbit passed through the critical point, so the product is exactly zero.
    pub vanished: bool,
}

/// `∏_{k<n} d z_k^(d-1)` along `z_0 = c`, `z_{k+1} = f_c(z_k)`. `n = 0` gives 1.
pub fn orbit_derivative(p: &MapParams, n: usize) -> Result<OrbitDerivative> {
    let mut z = p.c;
    let mut der = Complex64::new(1.0, 0.0);
    for k in 0..n {
        der *= pow_d(z, p.d - 1) * p.d as f64;
        check(der, k + 1)?;
        z = p.step(z);
        check(z, k + 1)?;
    }
    Ok(OrbitDerivative {
        value: der,
        vanished: der == Complex64::new(0.0, 0.0),
    })
}

/// `f_c^n` applied to a jet. With `Variable::C` the parameter is carried as
/// the jet variable, so the result is the total derivative in `c` given the
/// input's own dependence on `c`.
pub fn iterate_jet(p: &MapParams, z0: Jet, n: usize, variable: Variable) -> Result<Jet> {
    let c = match variable {
        Variable::Z => Jet::constant(p.c),
        Variable::C => Jet::variable(p.c),
    };
    iterate_jets(p.d, z0, c, n)
}

pub(crate) fn iterate_jets(d: u32, z0: Jet, c: Jet, n: usize) -> Result<Jet> {
    let mut z = z0;
    for k in 0..n {
        z = z.powu(d) + c;
        check(z.val, k + 1)?;
        check(z.der, k + 1)?;
    }
    Ok(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum EscapeStatus {
    /// `n` is the first index with `|z_n| > bailout`.
    Escaped { n: usize, z: ComplexPoint },
    Undecided { z: ComplexPoint },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeResult {
    pub status: EscapeStatus,
    pub maxit: usize,
    pub bailout: f64,
}

impl EscapeResult {
    pub fn escaped(&self) -> bool {
        matches!(self.status, EscapeStatus::Escaped { .. })
    }
}

/// Escape-time classification of the orbit of `z0`. The bailout is expected to
/// be at least `p.default_bailout()`; smaller values are accepted but escape is
/// then not guaranteed to be genuine.
pub fn escape_classify(p: &MapParams, z0: ComplexPoint, maxit: usize, bailout: f64) -> EscapeResult {
    let b2 = bailout * bailout;
    let mut z = z0;
    let status = 'outer: {
        if z.norm_sqr() > b2 {
            break 'outer EscapeStatus::Escaped { n: 0, z };
        }
        for n in 1..=maxit {
            z = p.step(z);
            if z.norm_sqr() > b2 {
                break 'outer EscapeStatus::Escaped { n, z };
            }
        }
        EscapeStatus::Undecided { z }
    };
    EscapeResult { status, maxit, bailout }
}
