//! Sound-soft acoustic scattering by polygons in the plane.

pub mod experiments;
pub mod field;
pub mod geometry;
pub mod hiddenpath;
pub mod nodal;
pub mod oracle;
pub mod solver;
pub mod specfun;
