//! Error taxonomy shared across the crate.

use thiserror::Error;

/// Errors produced by grid construction, transforms, solvers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (grid counts, parameter ranges, unknown keys).
    #[error("configuration error: {0}")]
    Config(String),

    /// Operation asked for a point outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Discretization cannot deliver the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// `a(z)` vanished (or nearly vanished) on the contour: the initial datum
    /// carries an eigenvalue or spectral singularity and lies outside the
    /// admissible set.
    #[error("resonance detected: min |a| = {min_abs_a:.3e} below floor {floor:.3e}")]
    Resonance { min_abs_a: f64, floor: f64 },

    /// Jump density lost positivity; the scalar conditioning problem is
    /// ill-posed for these data.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// Linear solver failed or the system is numerically singular.
    #[error("solver error: {msg} (smallest singular value ~ {sigma_min:.3e})")]
    Solver { msg: String, sigma_min: f64 },

    /// Caller broke an inter-module contract (mismatched grids, wrong regime).
    #[error("contract violation: {0}")]
    Contract(String),

    /// File is syntactically or structurally invalid.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
