//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by the map, the oracles and the exact-arithmetic kernels.
///
/// Data-level outcomes (a diverging engine, an infeasible pattern, an aperiodic
/// tail) are returned as values; only genuine contract violations end up here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("restitution coefficient {0} is outside (0, 1)")]
    Restitution(f64),

    #[error("direction ({x}, {y}, {z}) is outside the domain: {reason}")]
    Domain {
        x: f64,
        y: f64,
        z: f64,
        reason: &'static str,
    },

    #[error("angle is undefined for this direction: {0}")]
    UndefinedAngle(&'static str),

    #[error("strip coordinates need u_x - u_z > 0, got {0}")]
    StripChart(f64),

    #[error("triple collision: symbols {0} hit the minimal time together")]
    TripleCollision(String),

    #[error("cross-product algorithm did not reach contact b within {0} collisions")]
    NonTermination(usize),

    #[error("invalid collision word {0:?}: letters must be 1, 2 or 3")]
    InvalidWord(String),

    #[error("root count {count} in the isolating interval for window {n}, expected exactly one")]
    RootCount { n: usize, count: usize, roots: Vec<String> },

    #[error("bisection bracket [{a}, {b}] does not change sign")]
    Bracket { a: f64, b: f64 },

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("tangent seed projects to zero at this point")]
    DegenerateSeed,

    #[error("orbit left the branch-2 region at step {0}")]
    RegionExit(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
