//! Escape-time rasters of the parameter and dynamical planes, and synthetic fixtures.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{escape_classify, ComplexPoint, EscapeStatus, MapParams, Plane};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cell {
    Inside,
    Outside { n: u32 },
    Undecided,
}

impl Cell {
    /// Inside or undecided.
    pub fn in_set(self) -> bool {
        !matches!(self, Cell::Outside { .. })
    }

    fn gray(self) -> u8 {
        match self {
            Cell::Inside => 0,
            Cell::Undecided => 128,
            Cell::Outside { .. } => 255,
        }
    }
}

/// Axis-aligned rectangle given by its center and half-extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub center: ComplexPoint,
    pub half_width: f64,
    pub half_height: f64,
}

impl Region {
    pub fn square(center: ComplexPoint, half_width: f64) -> Self {
        Region { center, half_width, half_height: half_width }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "plane", rename_all = "lowercase")]
pub enum RasterPlane {
    Parameter,
    Dynamical { c: ComplexPoint },
    Synthetic { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeParams {
    pub d: u32,
    pub maxit: usize,
    /// `None` means the per-point default bailout.
    pub bailout: Option<f64>,
}

/// A grid of cell classifications. Row 0 is the top edge (largest imaginary part).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Raster {
    pub bounds: Region,
    pub nx: usize,
    pub ny: usize,
    #[serde(skip)]
    pub cells: Vec<Cell>,
    pub params: Option<EscapeParams>,
    pub plane: RasterPlane,
}

impl Raster {
    pub fn cell_width(&self) -> f64 {
        2.0 * self.bounds.half_width / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        2.0 * self.bounds.half_height / self.ny as f64
    }

    pub fn cell_center(&self, i: usize, j: usize) -> ComplexPoint {
        let b = &self.bounds;
        Complex64::new(
            b.center.re - b.half_width + (i as f64 + 0.5) * self.cell_width(),
            b.center.im + b.half_height - (j as f64 + 0.5) * self.cell_height(),
        )
    }

    pub fn get(&self, i: usize, j: usize) -> Cell {
        self.cells[j * self.nx + i]
    }

    /// Position of `z` in cell units, measured from the top-left corner.
    pub fn to_grid(&self, z: ComplexPoint) -> (f64, f64) {
        let b = &self.bounds;
        (
            (z.re - (b.center.re - b.half_width)) / self.cell_width(),
            ((b.center.im + b.half_height) - z.im) / self.cell_height(),
        )
    }

    /// The cell containing `z`, if inside the raster.
    pub fn cell_at(&self, z: ComplexPoint) -> Option<(usize, usize)> {
        let (x, y) = self.to_grid(z);
        (x >= 0.0 && y >= 0.0 && x < self.nx as f64 && y < self.ny as f64).then(|| (x as usize, y as usize))
    }

    /// Binary PGM (P5, maxval 255): Inside 0, Undecided 128, Outside 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        out.extend(self.cells.iter().map(|c| c.gray()));
        out
    }

    /// Everything but the cells, plus per-class counts.
    pub fn sidecar(&self) -> serde_json::Value {
        let count = |f: fn(&Cell) -> bool| self.cells.iter().filter(|c| f(c)).count();
        serde_json::json!({
            "bounds": self.bounds,
            "nx": self.nx,
            "ny": self.ny,
            "params": self.params,
            "plane": self.plane,
            "counts": {
                "inside": count(|c| matches!(c, Cell::Inside)),
                "outside": count(|c| matches!(c, Cell::Outside { .. })),
                "undecided": count(|c| matches!(c, Cell::Undecided)),
            },
        })
    }

    /// The raster turned a quarter turn counterclockwise about its center.
    pub fn rotated_90(&self) -> Raster {
        let (nx, ny) = (self.nx, self.ny);
        let mut cells = vec![Cell::Undecided; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                // (i, j) -> column j, row nx - 1 - i in an ny-wide grid
                cells[(nx - 1 - i) * ny + j] = self.get(i, j);
            }
        }
        let b = self.bounds;
        Raster {
            bounds: Region { center: b.center, half_width: b.half_height, half_height: b.half_width },
            nx: ny,
            ny: nx,
            cells,
            params: self.params,
            plane: self.plane.clone(),
        }
    }

    /// Same cells over a region scaled by `s` about its center.
    pub fn rescaled(&self, s: f64) -> Raster {
        let b = self.bounds;
        Raster {
            bounds: Region { center: b.center, half_width: b.half_width * s, half_height: b.half_height * s },
            ..self.clone()
        }
    }
}

/// Escape-time classification of every cell center. In the parameter plane
/// the orbit of 0 under `f_c` is followed; in the dynamical plane the orbit
/// of the cell point. Bounded orbits are reported as undecided.
pub fn membership_grid(
    plane: Plane,
    d: u32,
    region: Region,
    nx: usize,
    ny: usize,
    maxit: usize,
    bailout: Option<f64>,
) -> Result<Raster> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput(format!("raster needs at least 2x2 cells, got {nx}x{ny}")));
    }
    if !(region.half_width > 0.0 && region.half_height > 0.0) {
        return Err(Error::InvalidInput("region half-extents must be positive".into()));
    }
    MapParams::new(d, Complex64::new(0.0, 0.0))?;
    let mut raster = Raster {
        bounds: region,
        nx,
        ny,
        cells: vec![Cell::Undecided; nx * ny],
        params: Some(EscapeParams { d, maxit, bailout }),
        plane: match plane {
            Plane::Parameter => RasterPlane::Parameter,
            Plane::Dynamical { c } => RasterPlane::Dynamical { c },
        },
    };
    let geometry = raster.clone();
    let dynamical = match plane {
        Plane::Dynamical { c } => Some(MapParams::new(d, c)?),
        Plane::Parameter => None,
    };
    raster.cells.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, cell) in row.iter_mut().enumerate() {
            let z = geometry.cell_center(i, j);
            let (p, z0) = match dynamical {
                Some(p) => (p, z),
                None => (MapParams { d, c: z }, Complex64::new(0.0, 0.0)),
            };
            let b = bailout.unwrap_or_else(|| p.default_bailout());
            *cell = match escape_classify(&p, z0, maxit, b).status {
                EscapeStatus::Escaped { n, .. } => Cell::Outside { n: n as u32 },
                EscapeStatus::Undecided { .. } => Cell::Undecided,
            };
        }
    });
    Ok(raster)
}

/// Synthetic test rasters on the square `[-1, 1]^2` with `n x n` cells.
pub mod synthetic {
    use super::*;

    fn blank(n: usize, name: &str) -> Raster {
        Raster {
            bounds: Region::square(Complex64::new(0.0, 0.0), 1.0),
            nx: n,
            ny: n,
            cells: vec![Cell::Outside { n: 0 }; n * n],
            params: None,
            plane: RasterPlane::Synthetic { name: name.into() },
        }
    }

    fn paint(r: &mut Raster, inside: impl Fn(Complex64) -> bool) {
        for j in 0..r.ny {
            for i in 0..r.nx {
                if inside(r.cell_center(i, j)) {
                    r.cells[j * r.nx + i] = Cell::Inside;
                }
            }
        }
    }

    /// Every cell outside.
    pub fn empty(n: usize) -> Raster {
        blank(n, "empty")
    }

    /// Inside for `Im z < 0`.
    pub fn half_plane(n: usize) -> Raster {
        let mut r = blank(n, "half-plane");
        paint(&mut r, |z| z.im < 0.0);
        r
    }

    /// The horizontal segment `[-half_length, half_length]`, one cell thick.
    pub fn segment(n: usize, half_length: f64) -> Raster {
        let mut r = blank(n, "segment");
        let h = r.cell_height();
        paint(&mut r, |z| z.im.abs() < h && z.re.abs() <= half_length);
        r
    }

    /// A disk of radius `r_in / 4` at the origin only.
    pub fn empty_annulus(n: usize, r_in: f64) -> Raster {
        let mut r = blank(n, "empty-annulus");
        paint(&mut r, |z| z.norm() <= r_in / 4.0);
        r
    }

    /// `k` radial spikes running from radius `r_in / 2` to the raster edge,
    /// plus a central disk of radius `r_in / 4`.
    pub fn spikes(n: usize, k: usize, r_in: f64) -> Raster {
        let mut r = blank(n, &format!("spikes:{k}"));
        let half_thickness = 0.75 * r.cell_width();
        let dirs: Vec<Complex64> = (0..k)
            .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k as f64))
            .collect();
        paint(&mut r, |z| {
            if z.norm() <= r_in / 4.0 {
                return true;
            }
            if z.norm() < r_in / 2.0 {
                return false;
            }
            dirs.iter().any(|u| {
                let along = z.re * u.re + z.im * u.im;
                let across = -z.re * u.im + z.im * u.re;
                along > 0.0 && across.abs() <= half_thickness
            })
        });
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn far_parameters_escape() {
        let r = membership_grid(Plane::Parameter, 2, Region::square(Complex64::new(5.0, 0.0), 0.5), 16, 16, 100, None)
            .unwrap();
        assert!(r.cells.iter().all(|c| matches!(c, Cell::Outside { .. })));
    }

    #[test]
    fn cardioid_interior_is_undecided() {
        let r = membership_grid(Plane::Parameter, 2, Region::square(Complex64::new(-0.1, 0.0), 0.05), 8, 8, 5000, None)
            .unwrap();
        assert!(r.cells.iter().all(|c| *c == Cell::Undecided));
    }

    #[test]
    fn pgm_layout() {
        let mut r = synthetic::empty(2);
        r.cells[1] = Cell::Inside;
        r.cells[2] = Cell::Undecided;
        assert_eq!(r.to_pgm(), b"P5\n2 2\n255\n\xff\x00\x80\xff".to_vec());
    }

    #[test]
    fn rotation_moves_cells_counterclockwise() {
        let mut r = synthetic::empty(4);
        // a cell in the right half, upper row
        r.cells[3] = Cell::Inside;
        let rot = r.rotated_90();
        let z = r.cell_center(3, 0);
        let (i, j) = rot.cell_at(Complex64::new(-z.im, z.re)).unwrap();
        assert_eq!(rot.get(i, j), Cell::Inside);
        assert_eq!(rot.rotated_90().rotated_90().rotated_90(), r);
    }
}
