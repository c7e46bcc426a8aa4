//! Numerical inverse scattering transform for the Fokas-Lenells equation
//! on the line.
//!
//! The crate implements the full direct/inverse pipeline:
//!
//! * [`scattering`] — forward map: initial datum to scattering data
//!   `(a, 2ikb, r1, r2)` through a Zakharov-Shabat spectral problem,
//! * [`evolution`] — explicit linear time flow of the reflection
//!   coefficients,
//! * [`rh`] — the vector Riemann-Hilbert solve on the real `z`-line in
//!   Beals-Coifman form, with scalar `delta`-conditioning on the negative
//!   half-line,
//! * [`reconstruct`] — field reconstruction and phase untangling,
//! * [`validate`] — executable identity suites, a PDE residual oracle and
//!   stability probes.
//!
//! The narrative guide in `book/` walks through each stage; its code
//! snippets compile against this crate and run as doc-tests.

pub mod error;
pub mod grid;
pub mod interp;
pub mod fourier;
pub mod plemelj;
pub mod field;
pub mod norms;
pub mod linalg;
pub mod oscint;
pub mod scattering;
pub mod evolution;
pub mod rh;
pub mod reconstruct;
pub mod validate;
pub mod io;

pub use error::{Error, Result};
pub use grid::{ComplexSamples, RealGrid, SpectralGrid, SpectralGridParams};
