pub mod point;
pub mod probes;
pub mod rays;
