//! Geometric probes of the connectedness locus and of filled Julia sets:
//! harmonic-measure sampling, Lyapunov exponents, escape rasters, area
//! scaling, porosity, accessibility along rays and hedgehog layers.

mod access;
mod area;
pub mod edt;
mod hedgehog;
mod lyapunov;
mod porosity;
mod raster;
mod sampler;

pub use access::{iterated_log, iterated_log_access, AccessRow};
pub use area::{area_scaling_scan, AreaRow, AreaScan, MIN_CELLS_PER_RADIUS};
pub use hedgehog::{hedgehog_detect, HedgehogReport, MIN_ANNULUS_CELLS};
pub use lyapunov::lyapunov;
pub use porosity::{porosity_scan, PorosityRow};
pub use raster::{membership_grid, synthetic, Cell, EscapeParams, Raster, RasterPlane, Region};
pub use sampler::{sample_angle, sample_at_angles, sample_harmonic_measure, HarmonicSample, SplitMix64};
