//! Exact rational external angles.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An angle `p/q` in turns, reduced, with `0 <= p < q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AngleRational {
    num: BigUint,
    den: BigUint,
}

impl AngleRational {
    /// Builds `num/den mod 1`, reduced.
    pub fn new(num: BigUint, den: BigUint) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::InvalidInput("angle denominator must be positive".into()));
        }
        let num = num % &den;
        let g = num.gcd(&den);
        let (num, den) = if g.is_zero() || g.is_one() {
            (num, den)
        } else {
            (num / &g, den / &g)
        };
        // 0/q reduces to 0/1
        if num.is_zero() {
            return Ok(AngleRational { num, den: BigUint::one() });
        }
        Ok(AngleRational { num, den })
    }

    pub fn from_u64(num: u64, den: u64) -> Result<Self, Error> {
        Self::new(BigUint::from(num), BigUint::from(den))
    }

    /// `k / 2^53`, the grid used by the harmonic-measure sampler.
    pub fn from_dyadic53(k: u64) -> Self {
        Self::new(BigUint::from(k), BigUint::one() << 53u32).expect("nonzero denominator")
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    /// Nearest binary64 value of the angle in `[0, 1)`.
    pub fn to_f64(&self) -> f64 {
        fraction_f64(&self.num, &self.den)
    }

    /// The angle after `n` applications of `θ ↦ dθ mod 1`.
    pub fn multiply_mod1(&self, d: u32, n: u64) -> AngleRational {
        let m = BigUint::from(d).modpow(&BigUint::from(n), &self.den);
        AngleRational::new(&self.num * m, self.den.clone()).expect("nonzero denominator")
    }

    /// `d^n θ mod 1` as binary64, without materialising `d^n`.
    pub fn frac_after(&self, d: u32, n: u64) -> f64 {
        let m = BigUint::from(d).modpow(&BigUint::from(n), &self.den);
        let r = (&self.num * m) % &self.den;
        fraction_f64(&r, &self.den)
    }

    /// `1 - θ mod 1`, the complex-conjugate angle.
    pub fn conjugate(&self) -> AngleRational {
        if self.num.is_zero() {
            return self.clone();
        }
        AngleRational::new(&self.den - &self.num, self.den.clone()).expect("nonzero denominator")
    }
}

fn fraction_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // 64 fractional bits are plenty for a 53-bit mantissa
    let scaled: BigUint = (num << 64u32) / den;
    match scaled.to_u64() {
        Some(v) => v as f64 / 18446744073709551616.0,
        None => 1.0,
    }
    .min(1.0 - f64::EPSILON / 2.0)
}

impl fmt::Display for AngleRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for AngleRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidInput(format!("angle must be p/q with integers, got {s:?}"));
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let num = BigUint::from_str(p).map_err(|_| bad())?;
        let den = BigUint::from_str(q).map_err(|_| bad())?;
        AngleRational::new(num, den)
    }
}

impl Serialize for AngleRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AngleRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
