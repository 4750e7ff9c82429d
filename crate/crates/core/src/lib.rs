pub mod angle;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod potential;
pub mod probes;
pub mod rays;
mod solve;
pub mod transversality;

pub use angle::AngleRational;
pub use dynamics::{ComplexPoint, Jet, MapParams, Plane, Variable};
pub use error::{Error, Result};
