//! Forward-mode differential pairs over the complex numbers.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// A value together with its derivative with respect to one designated
/// complex variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub val: Complex64,
    pub der: Complex64,
}

impl Jet {
    pub const fn new(val: Complex64, der: Complex64) -> Self {
        Jet { val, der }
    }

    /// A quantity that does not depend on the designated variable.
    pub fn constant(val: Complex64) -> Self {
        Jet::new(val, Complex64::new(0.0, 0.0))
    }

    /// The designated variable itself.
    pub fn variable(val: Complex64) -> Self {
        Jet::new(val, Complex64::new(1.0, 0.0))
    }

    pub fn powu(self, n: u32) -> Self {
        match n {
            0 => Jet::constant(Complex64::new(1.0, 0.0)),
            1 => self,
            2 => Jet::new(self.val * self.val, self.val * self.der * 2.0),
            _ => {
                let lower = self.val.powu(n - 1);
                Jet::new(lower * self.val, lower * self.der * n as f64)
            }
        }
    }

    pub fn recip(self) -> Self {
        let inv = self.val.inv();
        Jet::new(inv, -self.der * inv * inv)
    }

    /// Principal logarithm.
    pub fn ln(self) -> Self {
        Jet::new(self.val.ln(), self.der / self.val)
    }

    pub fn exp(self) -> Self {
        let e = self.val.exp();
        Jet::new(e, e * self.der)
    }

    pub fn scale(self, s: f64) -> Self {
        Jet::new(self.val * s, self.der * s)
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite() && self.der.is_finite()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet::new(self.val + rhs.val, self.der + rhs.der)
    }
}

impl Add<Complex64> for Jet {
    type Output = Jet;
    fn add(self, rhs: Complex64) -> Jet {
        Jet::new(self.val + rhs, self.der)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet::new(self.val - rhs.val, self.der - rhs.der)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet::new(self.val * rhs.val, self.der * rhs.val + self.val * rhs.der)
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: Complex64) -> Jet {
        Jet::new(self.val * rhs, self.der * rhs)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let q = self.val / rhs.val;
        Jet::new(q, (self.der - q * rhs.der) / rhs.val)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.val, -self.der)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::variable(c(1.5, -0.5));
        let f = x * x * x;
        let g = x.powu(3);
        assert!((f.val - g.val).norm() < 1e-14);
        assert!((f.der - g.der).norm() < 1e-14);
        let q = (x * x) / x;
        assert!((q.der - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ln_exp_are_inverse() {
        let x = Jet::new(c(0.3, 0.8), c(2.0, -1.0));
        let y = x.ln().exp();
        assert!((y.val - x.val).norm() < 1e-14);
        assert!((y.der - x.der).norm() < 1e-13);
    }

    #[test]
    fn recip_matches_division() {
        let x = Jet::new(c(-2.0, 0.5), c(0.25, 1.0));
        let a = x.recip();
        let b = Jet::constant(c(1.0, 0.0)) / x;
        assert!((a.val - b.val).norm() < 1e-15);
        assert!((a.der - b.der).norm() < 1e-15);
    }
}
