//! Two-sided estimates of `|M_d ∩ D(c0, r)|` over a sequence of radii.

use serde::Serialize;

use super::raster::{membership_grid, Cell, Region};
use crate::dynamics::{ComplexPoint, Plane};
use crate::error::{Error, Result};

pub const MIN_CELLS_PER_RADIUS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaRow {
    pub r: f64,
    /// Undecided cells counted as outside.
    pub area_lo: f64,
    /// Undecided cells counted as inside.
    pub area_hi: f64,
    pub ratio_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaScan {
    pub rows: Vec<AreaRow>,
    /// Least-squares slope of `log(area_hi / r^2)` against `log r`, over rows with positive area.
    pub slope: Option<f64>,
}

/// For each radius, rasterises the square around `c0` with `2 * resolution`
/// cells per side (cell centres stay off the lines through `c0`) and counts
/// the cells whose centre lies in the closed disk.
pub fn area_scaling_scan(d: u32, c0: ComplexPoint, radii: &[f64], resolution: usize, maxit: usize) -> Result<AreaScan> {
    if radii.len() < 3 {
        return Err(Error::InvalidInput("area scan needs at least three radii".into()));
    }
    if radii.windows(2).any(|w| !(w[0] > w[1])) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput("radii must be positive and strictly decreasing".into()));
    }
    if resolution < MIN_CELLS_PER_RADIUS {
        return Err(Error::ResolutionInsufficient(format!(
            "{resolution} cells per radius, need at least {MIN_CELLS_PER_RADIUS}"
        )));
    }
    let n = 2 * resolution;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let raster = membership_grid(Plane::Parameter, d, Region::square(c0, r), n, n, maxit, None)?;
        let (mut inside, mut undecided) = (0usize, 0usize);
        for j in 0..n {
            for i in 0..n {
                if (raster.cell_center(i, j) - c0).norm() > r {
                    continue;
                }
                match raster.get(i, j) {
                    Cell::Inside => inside += 1,
                    Cell::Undecided => undecided += 1,
                    Cell::Outside { .. } => {}
                }
            }
        }
        let cell = raster.cell_width() * raster.cell_height();
        let area_lo = inside as f64 * cell;
        let area_hi = (inside + undecided) as f64 * cell;
        rows.push(AreaRow { r, area_lo, area_hi, ratio_hi: area_hi / (r * r) });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|row| row.area_hi > 0.0)
        .map(|row| (row.r.ln(), row.ratio_hi.ln()))
        .collect();
    Ok(AreaScan { slope: fit_slope(&pts), rows })
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
