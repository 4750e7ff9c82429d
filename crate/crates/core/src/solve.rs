//! Damped complex Newton iteration shared by ray tracing and angle recovery.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonOptions {
    /// Stop once `|residual| <= abs_tol`.
    pub abs_tol: f64,
    /// Stop once the Newton correction is below `rel_step * |x|` (resolution floor).
    pub rel_step: f64,
    pub max_iter: usize,
    /// Step halvings tried before giving up on an iteration.
    pub max_damping: u32,
    /// Extra full Newton steps taken after the residual test passes.
    pub polish: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            abs_tol: 1e-13,
            rel_step: 1e-14,
            max_iter: 64,
            max_damping: 20,
            polish: 0,
        }
    }
}

/// Solves `f(x) = 0` where `f` returns `(residual, derivative)` or `None`
/// outside its domain.
pub(crate) fn newton<F>(f: F, x0: Complex64, opts: &NewtonOptions) -> Option<Complex64>
where
    F: Fn(Complex64) -> Option<(Complex64, Complex64)>,
{
    let mut x = x0;
    let (mut r, mut j) = f(x)?;
    for _ in 0..opts.max_iter {
        let rn = r.norm();
        if rn <= opts.abs_tol {
            return Some(polish(&f, x, r, j, opts));
        }
        let step = -r / j;
        if !step.is_finite() {
            return None;
        }
        let floor = opts.rel_step * x.norm().max(f64::MIN_POSITIVE);
        if step.norm() <= floor {
            return Some(x);
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_damping {
            let xt = x + step * lambda;
            if let Some((rt, jt)) = f(xt) {
                if rt.is_finite() && jt.is_finite() && rt.norm() < rn {
                    accepted = Some((xt, rt, jt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xt, rt, jt)) => {
                x = xt;
                r = rt;
                j = jt;
            }
            // no decrease: accept only if we are already at roundoff level
            None if step.norm() <= 1e3 * floor => {
                return Some(x);
            }
            None => return None,
        }
    }
    let rn = r.norm();
    (rn <= opts.abs_tol * 1e3).then_some(x)
}

fn polish<F>(f: &F, mut x: Complex64, mut r: Complex64, mut j: Complex64, opts: &NewtonOptions) -> Complex64
where
    F: Fn(Complex64) -> Option<(Complex64, Complex64)>,
{
    for _ in 0..opts.polish {
        let xt = x - r / j;
        match f(xt) {
            Some((rt, jt)) if rt.is_finite() && jt.is_finite() && rt.norm() <= r.norm() => {
                x = xt;
                r = rt;
                j = jt;
            }
            _ => break,
        }
    }
    x
}

/// Wraps an angle in radians to `(-π, π]`.
pub(crate) fn wrap_pi(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut y = x - tau * (x / tau).round();
    if y <= -std::f64::consts::PI {
        y += tau;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_cube_root() {
        let target = Complex64::new(-8.0, 0.0);
        let out = newton(
            |x| Some((x * x * x - target, x * x * 3.0)),
            Complex64::new(1.0, 1.0),
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!((out * out * out - target).norm() < 1e-12);
    }

    #[test]
    fn wrap_is_symmetric() {
        assert!((wrap_pi(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-15);
        assert!((wrap_pi(-0.5) + 0.5).abs() < 1e-16);
        assert!((wrap_pi(7.0) - (7.0 - std::f64::consts::TAU)).abs() < 1e-15);
    }
}
