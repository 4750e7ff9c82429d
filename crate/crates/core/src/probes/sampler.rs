//! Angles drawn from the uniform distribution on the circle, and the landing
//! points of their parameter rays as samples of harmonic measure.

use rayon::prelude::*;
use serde::Serialize;

use crate::angle::AngleRational;
use crate::error::Error;
use crate::rays::{landing_estimate, trace_parameter_ray, LandingEstimate, RayPolyline, TraceConfig};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 generator. Output `i` depends only on the seed and `i`,
/// so the stream can be read in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// The `i`-th output (0-based) of a generator started at `seed`.
    pub fn nth_output(seed: u64, i: u64) -> u64 {
        mix(seed.wrapping_add(i.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `i`-th sampled angle: the top 53 bits of output `i` over `2^53`.
pub fn sample_angle(seed: u64, i: u64) -> AngleRational {
    AngleRational::from_dyadic53(SplitMix64::nth_output(seed, i) >> 11)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSample {
    pub index: usize,
    pub angle: AngleRational,
    pub landing: Option<LandingEstimate>,
    /// Smallest potential the ray reached.
    pub t_min_reached: f64,
    pub failure: Option<String>,
}

/// Traces the parameter rays at `n` sampled angles in parallel. The output
/// order follows the sample index regardless of scheduling.
pub fn sample_harmonic_measure(d: u32, n: usize, seed: u64, cfg: &TraceConfig) -> Vec<HarmonicSample> {
    let angles: Vec<AngleRational> = (0..n as u64).map(|i| sample_angle(seed, i)).collect();
    sample_at_angles(d, &angles, cfg)
}

/// Same as [`sample_harmonic_measure`] for explicitly given angles.
pub fn sample_at_angles(d: u32, angles: &[AngleRational], cfg: &TraceConfig) -> Vec<HarmonicSample> {
    angles
        .par_iter()
        .enumerate()
        .map(|(index, angle)| {
            let (ray, failure): (Option<RayPolyline>, Option<String>) = match trace_parameter_ray(d, angle, cfg) {
                Ok(ray) => (Some(ray), None),
                Err(Error::NewtonStall { partial, last_good_t }) => {
                    (Some(*partial), Some(format!("NewtonStall below t = {last_good_t:e}")))
                }
                Err(e) => (None, Some(e.to_string())),
            };
            let t_min_reached = ray
                .as_ref()
                .and_then(|r| r.samples.last())
                .map_or(f64::NAN, |s| s.t);
            let (landing, failure) = match ray.as_ref().map(landing_estimate) {
                Some(Ok(l)) => (Some(l), failure),
                Some(Err(e)) => (None, failure.or_else(|| Some(e.to_string()))),
                None => (None, failure),
            };
            HarmonicSample { index, angle: angle.clone(), landing, t_min_reached, failure }
        })
        .collect()
}
