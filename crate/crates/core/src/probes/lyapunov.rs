//! Finite-time Lyapunov exponent of the critical value.

use crate::dynamics::{MapParams, OVERFLOW_THRESHOLD};
use crate::error::{Error, Result};

/// `(1/n) Σ_{k<n} log |d z_k^{d-1}| = (1/n) log |(f^n)'(c)|` along the orbit
/// `z_0 = c, z_{k+1} = f(z_k)` of the critical value.
pub fn lyapunov(p: &MapParams, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("lyapunov needs n >= 1".into()));
    }
    let d = p.d as f64;
    let mut z = p.c;
    let mut acc = 0.0;
    for k in 0..n {
        let r = z.norm();
        if r < 1e-300 {
            return Err(Error::ZeroDerivative { step: k });
        }
        if r > OVERFLOW_THRESHOLD {
            return Err(Error::Overflow { step: k });
        }
        acc += d.ln() + (d - 1.0) * r.ln();
        z = p.step(z);
    }
    Ok(acc / n as f64)
}
