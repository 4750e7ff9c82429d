//! Largest empty disks around a point, relative to the scale.

use serde::Serialize;

use super::edt::squared_distance;
use super::raster::Raster;
use crate::dynamics::ComplexPoint;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PorosityRow {
    pub r: f64,
    pub beta: f64,
    /// Centre of the largest empty disk found.
    pub witness: ComplexPoint,
}

/// For each scale `r`: the largest disk avoiding the in-set (Inside or
/// Undecided cells), centred at `center` itself or at a cell of `D(center, r)`
/// and contained in it, divided by `r`. Ties go to `center`, then to the
/// smallest cell index.
pub fn porosity_scan(raster: &Raster, center: ComplexPoint, scales: &[f64]) -> Result<Vec<PorosityRow>> {
    let h = raster.cell_width();
    if (h - raster.cell_height()).abs() > 1e-12 * h {
        return Err(Error::InvalidInput("porosity needs square cells".into()));
    }
    let dist2 = squared_distance(raster.nx, raster.ny, |i, j| raster.get(i, j).in_set());
    let (gx, gy) = raster.to_grid(center);
    let mut rows = Vec::with_capacity(scales.len());
    for &r in scales {
        let rc = r / h;
        if !(rc >= 32.0) {
            return Err(Error::ResolutionInsufficient(format!("scale {r:e} spans {rc:.1} cells, need 32")));
        }
        if gx - rc < 0.0 || gy - rc < 0.0 || gx + rc > raster.nx as f64 || gy + rc > raster.ny as f64 {
            return Err(Error::InvalidInput(format!("disk of radius {r:e} leaves the raster")));
        }
        let (j0, j1) = ((gy - rc).floor() as usize, ((gy + rc).ceil() as usize).min(raster.ny));
        let (i0, i1) = ((gx - rc).floor() as usize, ((gx + rc).ceil() as usize).min(raster.nx));
        let mut at_center = rc;
        let mut best: (f64, Option<(usize, usize)>) = (-1.0, None);
        for j in j0..j1 {
            for i in i0..i1 {
                let rho = (i as f64 + 0.5 - gx).hypot(j as f64 + 0.5 - gy);
                if raster.get(i, j).in_set() {
                    at_center = at_center.min(rho);
                }
                if rho > rc {
                    continue;
                }
                let radius = dist2[j * raster.nx + i].sqrt().min(rc - rho);
                if radius > best.0 {
                    best = (radius, Some((i, j)));
                }
            }
        }
        let (radius, witness) = match best {
            (radius, Some((i, j))) if radius > at_center => (radius, raster.cell_center(i, j)),
            _ => (at_center, center),
        };
        rows.push(PorosityRow { r, beta: radius / rc, witness });
    }
    Ok(rows)
}
