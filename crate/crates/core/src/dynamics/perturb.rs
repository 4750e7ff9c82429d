//! Orbits of points written as `anchor + offset`.
//!
//! The anchor's orbit is computed once in binary64; nearby orbits are
//! followed through the exact difference recurrence
//! `e' = (W + e)^d - W^d (+ offset for the critical orbit)`, so offsets far
//! below the resolution of the anchor itself keep full relative precision.
//! This only helps when the anchor orbit is exact in binary64 (for example
//! `c = -2`, whose critical orbit is `-2, 2, 2, ...`). Once the offset orbit
//! has separated from the reference it continues as a plain orbit.

use num_complex::Complex64;

use super::{pow_d, Jet};

/// Which orbit a local point follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitKind {
    /// Parameter plane: the point is `c`, the orbit is `c, c^d + c, ...`.
    Critical,
    /// Dynamical plane of `f_c`: the orbit of the point under `f_c`.
    Point { c: Complex64 },
}

/// A point stored as anchor plus offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPoint {
    pub anchor: Complex64,
    pub offset: Complex64,
}

impl LocalPoint {
    pub fn new(anchor: Complex64, offset: Complex64) -> Self {
        LocalPoint { anchor, offset }
    }

    pub fn absolute(&self) -> Complex64 {
        self.anchor + self.offset
    }
}

/// Separation at which an orbit leaves the reference and continues directly.
const SEPARATION: f64 = 1.0 / 256.0;
/// Reference orbits are not extended past this magnitude.
const REFERENCE_CAP: f64 = 1e10;

#[derive(Debug, Clone)]
pub struct ReferenceOrbit {
    d: u32,
    kind: OrbitKind,
    anchor: Complex64,
    points: Vec<Complex64>,
    capped: bool,
    binom: Vec<f64>,
}

impl ReferenceOrbit {
    pub fn new(d: u32, kind: OrbitKind, anchor: Complex64, len: usize) -> Self {
        let binom = (0..=d)
            .scan(1.0_f64, |acc, j| {
                let v = *acc;
                *acc = *acc * (d - j) as f64 / (j + 1) as f64;
                Some(v)
            })
            .collect();
        let mut r = ReferenceOrbit {
            d,
            kind,
            anchor,
            points: vec![anchor],
            capped: false,
            binom,
        };
        r.ensure(len);
        r
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    /// Extend the stored reference to at least `len + 1` points.
    pub fn ensure(&mut self, len: usize) {
        let c = match self.kind {
            OrbitKind::Critical => self.anchor,
            OrbitKind::Point { c } => c,
        };
        while !self.capped && self.points.len() <= len {
            let w = *self.points.last().expect("reference has a first point");
            if w.norm() > REFERENCE_CAP {
                self.capped = true;
                break;
            }
            self.points.push(pow_d(w, self.d) + c);
        }
    }

    /// The `n`-th stored reference point, if the reference reaches that far.
    pub fn point(&self, n: usize) -> Option<Complex64> {
        self.points.get(n).copied()
    }

    /// Orbit of `anchor + offset`, yielding `(w_k, dw_k/d offset)`.
    pub fn orbit(&self, offset: Complex64) -> LocalOrbit<'_> {
        LocalOrbit {
            reference: self,
            offset,
            c_abs: match self.kind {
                OrbitKind::Critical => self.anchor + offset,
                OrbitKind::Point { c } => c,
            },
            k: 0,
            eps: offset,
            direct: None,
            der: Complex64::new(1.0, 0.0),
        }
    }

    /// `(W + e)^d - W^d`, expanded so that no cancellation occurs for small `e`.
    fn difference(&self, w: Complex64, e: Complex64) -> Complex64 {
        let d = self.d as usize;
        let mut acc = Complex64::new(1.0, 0.0);
        let mut wpow = Complex64::new(1.0, 0.0);
        // coefficients of e^j are binom[j] * W^(d-j); Horner from j = d down to 1
        let mut powers = Vec::with_capacity(d);
        for _ in 0..d {
            powers.push(wpow);
            wpow *= w;
        }
        for j in (1..d).rev() {
            acc = acc * e + powers[d - j] * self.binom[j];
        }
        acc * e
    }
}

/// Iterator over the orbit of a local point. The first item is `w_0`.
#[derive(Debug, Clone)]
pub struct LocalOrbit<'a> {
    reference: &'a ReferenceOrbit,
    offset: Complex64,
    c_abs: Complex64,
    k: usize,
    eps: Complex64,
    direct: Option<Complex64>,
    der: Complex64,
}

impl LocalOrbit<'_> {
    fn current(&self) -> Complex64 {
        match self.direct {
            Some(w) => w,
            None => self.reference.points[self.k] + self.eps,
        }
    }

    /// Next orbit point together with `(W_k, e_k)`, the reference point and
    /// the offset from it, while the orbit is still followed perturbatively.
    pub fn next_split(&mut self) -> (Jet, Option<(Complex64, Complex64)>) {
        let r = self.reference;
        if self.direct.is_none() {
            let reference_left = self.k + 1 < r.points.len();
            let w_ref = r.points[self.k];
            if !reference_left || self.eps.norm() > SEPARATION * w_ref.norm() {
                self.direct = Some(w_ref + self.eps);
            }
        }
        let w = self.current();
        let out = Jet::new(w, self.der);
        let split = match self.direct {
            None => Some((r.points[self.k], self.eps)),
            Some(_) => None,
        };

        // advance to k + 1
        let d = r.d;
        let grow = pow_d(w, d - 1) * d as f64;
        let unit = match r.kind {
            OrbitKind::Critical => Complex64::new(1.0, 0.0),
            OrbitKind::Point { .. } => Complex64::new(0.0, 0.0),
        };
        self.der = grow * self.der + unit;
        match self.direct {
            Some(w) => self.direct = Some(pow_d(w, d) + self.c_abs),
            None => {
                let w_ref = r.points[self.k];
                let shift = match r.kind {
                    OrbitKind::Critical => self.offset,
                    OrbitKind::Point { .. } => Complex64::new(0.0, 0.0),
                };
                self.eps = r.difference(w_ref, self.eps) + shift;
            }
        }
        self.k += 1;
        (out, split)
    }
}

impl Iterator for LocalOrbit<'_> {
    type Item = Jet;

    fn next(&mut self) -> Option<Jet> {
        Some(self.next_split().0)
    }
}
