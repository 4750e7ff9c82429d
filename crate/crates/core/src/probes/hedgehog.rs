//! Detection of hedgehog layers: round annuli crossed by components of the
//! set that come close to every point of the annulus.
//!
//! All geometry is done in cell units on the raster grid, relative to the
//! requested centre, so a quarter-turn of the raster about that centre or a
//! power-of-two rescaling of every length leaves the result unchanged.

use std::f64::consts::TAU;

use serde::Serialize;

use super::edt::squared_distance;
use super::raster::Raster;
use crate::dynamics::ComplexPoint;
use crate::error::{Error, Result};

pub const MIN_ANNULUS_CELLS: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgehogReport {
    pub center: ComplexPoint,
    pub r_in: f64,
    pub r_out: f64,
    /// `log(r_out / r_in) / 2π`.
    pub modulus: f64,
    /// In-set components meeting the closed annulus.
    pub components: usize,
    /// Components with a cell next to the inner disk and one next to the outer complement.
    pub crossing_components: usize,
    /// Largest distance from an annulus cell to a crossing component, over `2 r_out`.
    /// Infinite (serialised as `null`) when nothing crosses.
    pub eps_star: f64,
    pub center_in_set: bool,
    pub verdict: bool,
}

const NEIGHBOURS: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

pub fn hedgehog_detect(
    raster: &Raster,
    center: ComplexPoint,
    r_in: f64,
    r_out: f64,
    m_req: f64,
    eps_req: f64,
) -> Result<HedgehogReport> {
    if !(r_in > 0.0 && r_out > r_in) {
        return Err(Error::InvalidInput(format!("need 0 < r_in < r_out, got {r_in}, {r_out}")));
    }
    let h = raster.cell_width();
    if (h - raster.cell_height()).abs() > 1e-12 * h {
        return Err(Error::InvalidInput("hedgehog detection needs square cells".into()));
    }
    let (rin, rout) = (r_in / h, r_out / h);
    if rout - rin < MIN_ANNULUS_CELLS {
        return Err(Error::ResolutionInsufficient(format!(
            "annulus is {:.1} cells thick, need {MIN_ANNULUS_CELLS}",
            rout - rin
        )));
    }
    let (gx, gy) = raster.to_grid(center);
    let (nx, ny) = (raster.nx as isize, raster.ny as isize);
    if gx - rout < 0.0 || gy - rout < 0.0 || gx + rout > nx as f64 || gy + rout > ny as f64 {
        return Err(Error::InvalidInput("outer disk leaves the raster".into()));
    }

    // working box: the outer disk plus a margin for neighbour tests
    let i0 = ((gx - rout).floor() as isize - 2).max(0);
    let j0 = ((gy - rout).floor() as isize - 2).max(0);
    let i1 = ((gx + rout).ceil() as isize + 2).min(nx);
    let j1 = ((gy + rout).ceil() as isize + 2).min(ny);
    let (bw, bh) = ((i1 - i0) as usize, (j1 - j0) as usize);

    let rho = |i: isize, j: isize| {
        let dx = i as f64 + 0.5 - gx;
        let dy = j as f64 + 0.5 - gy;
        (dx * dx + dy * dy).sqrt()
    };
    let in_annulus = |i: isize, j: isize| {
        let r = rho(i, j);
        rin <= r && r <= rout
    };
    let in_set = |i: isize, j: isize| raster.get(i as usize, j as usize).in_set();
    let local = |i: isize, j: isize| (j - j0) as usize * bw + (i - i0) as usize;

    const NONE: u32 = u32::MAX;
    let mut label = vec![NONE; bw * bh];
    let mut crossing: Vec<bool> = Vec::new();
    let mut stack = Vec::new();
    for j in j0..j1 {
        for i in i0..i1 {
            if label[local(i, j)] != NONE || !in_annulus(i, j) || !in_set(i, j) {
                continue;
            }
            let id = crossing.len() as u32;
            let (mut inner, mut outer) = (false, false);
            label[local(i, j)] = id;
            stack.push((i, j));
            while let Some((ci, cj)) = stack.pop() {
                for (di, dj) in NEIGHBOURS {
                    let (ni, nj) = (ci + di, cj + dj);
                    if ni < 0 || nj < 0 || ni >= nx || nj >= ny {
                        outer = true;
                        continue;
                    }
                    let r = rho(ni, nj);
                    if r < rin {
                        inner = true;
                    } else if r > rout {
                        outer = true;
                    } else if in_set(ni, nj) && label[local(ni, nj)] == NONE {
                        label[local(ni, nj)] = id;
                        stack.push((ni, nj));
                    }
                }
            }
            crossing.push(inner && outer);
        }
    }

    let components = crossing.len();
    let crossing_components = crossing.iter().filter(|&&c| c).count();
    let eps_star = if crossing_components == 0 {
        f64::INFINITY
    } else {
        let dist2 = squared_distance(bw, bh, |a, b| {
            let l = label[b * bw + a];
            l != NONE && crossing[l as usize]
        });
        let mut worst: f64 = 0.0;
        for j in j0..j1 {
            for i in i0..i1 {
                if in_annulus(i, j) {
                    worst = worst.max(dist2[local(i, j)]);
                }
            }
        }
        worst.sqrt() / (2.0 * rout)
    };

    // the cells nearest the centre (up to four when it sits on a corner)
    let (ci, cj) = (gx.floor() as isize, gy.floor() as isize);
    let near: Vec<(isize, isize)> = (cj - 1..=cj + 1)
        .flat_map(|j| (ci - 1..=ci + 1).map(move |i| (i, j)))
        .filter(|&(i, j)| i >= 0 && j >= 0 && i < nx && j < ny)
        .collect();
    let closest = near.iter().map(|&(i, j)| rho(i, j)).fold(f64::INFINITY, f64::min);
    let center_in_set = near
        .iter()
        .any(|&(i, j)| rho(i, j) <= closest + 1e-9 && in_set(i, j));

    let modulus = (r_out / r_in).ln() / TAU;
    Ok(HedgehogReport {
        center,
        r_in,
        r_out,
        modulus,
        components,
        crossing_components,
        eps_star,
        center_in_set,
        verdict: modulus >= m_req && eps_star <= eps_req && center_in_set,
    })
}
