//! Simulation and verification toolkit for the b-to-b map of four inelastic
//! hard spheres on a line.
//!
//! The crate iterates the piecewise projective linear map, checks it against a
//! cross-product reference algorithm, a spherical trigonometric algorithm and
//! a direct event-driven particle simulation, computes the stability windows
//! of the `(ab)ⁿ(cb)ⁿ` patterns in exact rational arithmetic, certifies
//! periodic collision words, and provides orbit diagnostics.

pub mod analysis;
pub mod cli;
pub mod csv_io;
pub mod error;
pub mod exact;
pub mod exact_engines;
pub mod linalg;
pub mod map_core;
pub mod oracles;
pub mod precision;
pub mod spectral;
pub mod svg;
pub mod windows;

pub use error::{Error, Result};
