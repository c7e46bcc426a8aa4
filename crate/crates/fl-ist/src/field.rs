//! Complex field samples on the physical grid, with spectral derivatives.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::RealGrid;

/// Default tolerance for the compact-support check at the grid ends.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Initial-datum profiles understood by the constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Gaussian { amplitude: f64, width: f64, center: f64 },
    Sech { amplitude: f64, width: f64, center: f64 },
}

/// Complex field `u` with its first two spectral derivatives.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: RealGrid,
    pub values: Vec<C64>,
    pub d1: Vec<C64>,
    pub d2: Vec<C64>,
}

impl Field {
    /// Build a field from raw samples; derivatives are computed spectrally.
    pub fn from_values(grid: RealGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::Contract(format!(
                "field sample count {} != grid size {}",
                values.len(),
                grid.n
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Contract("non-finite field values".into()));
        }
        let d1 = spectral_derivative(&grid, &values, 1);
        let d2 = spectral_derivative(&grid, &values, 2);
        Ok(Self {
            grid,
            values,
            d1,
            d2,
        })
    }

    pub fn zero(grid: RealGrid) -> Self {
        let n = grid.n;
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); n],
            d1: vec![C64::new(0.0, 0.0); n],
            d2: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn from_profile(grid: RealGrid, profile: &Profile) -> Result<Self> {
        let values = grid
            .nodes()
            .iter()
            .map(|&x| match profile {
                Profile::Gaussian {
                    amplitude,
                    width,
                    center,
                } => {
                    let s = (x - center) / width;
                    C64::new(amplitude * (-s * s).exp(), 0.0)
                }
                Profile::Sech {
                    amplitude,
                    width,
                    center,
                } => {
                    let s = (x - center) / width;
                    C64::new(amplitude / s.cosh(), 0.0)
                }
            })
            .collect();
        Self::from_values(grid, values)
    }

    /// Largest |u| over the two boundary nodes; values above
    /// [`BOUNDARY_TOL`] mean the datum is not compactly supported on the
    /// grid to tolerance (a warning condition, not an error).
    pub fn boundary_defect(&self) -> f64 {
        self.values[0]
            .norm()
            .max(self.values[self.grid.n - 1].norm())
    }

    /// Spectral n-th derivative of arbitrary samples on this grid.
    pub fn derivative_of(&self, values: &[C64], order: u32) -> Vec<C64> {
        spectral_derivative(&self.grid, values, order)
    }

    /// Third derivative of the field (used by the Sobolev norms).
    pub fn d3(&self) -> Vec<C64> {
        spectral_derivative(&self.grid, &self.values, 3)
    }

    /// Uniform-grid trapezoidal integral of sampled values.
    pub fn integrate(&self, values: &[C64]) -> C64 {
        trapezoid(self.grid.spacing(), values)
    }
}

/// Trapezoidal rule on a uniform grid.
pub fn trapezoid(h: f64, values: &[C64]) -> C64 {
    if values.len() < 2 {
        return C64::new(0.0, 0.0);
    }
    let inner: C64 = values[1..values.len() - 1].iter().sum();
    (inner + (values[0] + values[values.len() - 1]) * 0.5) * h
}

/// FFT derivative on the periodic extension of the grid (period `n*h`).
pub fn spectral_derivative(grid: &RealGrid, values: &[C64], order: u32) -> Vec<C64> {
    let n = grid.n;
    assert_eq!(values.len(), n);
    if order == 0 {
        return values.to_vec();
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = values.to_vec();
    fwd.process(&mut buf);
    let period = grid.spacing() * n as f64;
    let base = 2.0 * std::f64::consts::PI / period;
    for (k, b) in buf.iter_mut().enumerate() {
        let m = if k <= n / 2 {
            k as isize
        } else {
            k as isize - n as isize
        };
        if m == (n / 2) as isize && order % 2 == 1 {
            // unmatched Nyquist mode carries no usable odd-derivative phase
            *b = C64::new(0.0, 0.0);
            continue;
        }
        let ik = C64::new(0.0, base * m as f64);
        *b *= ik.powu(order);
    }
    inv.process(&mut buf);
    for b in buf.iter_mut() {
        *b /= n as f64;
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_derivatives_match_closed_form() {
        let grid = RealGrid::new(-20.0, 20.0, 1024).unwrap();
        let f = Field::from_profile(
            grid.clone(),
            &Profile::Gaussian {
                amplitude: 0.3,
                width: 1.0,
                center: 0.0,
            },
        )
        .unwrap();
        let mut worst1 = 0.0f64;
        let mut worst2 = 0.0f64;
        for (i, &x) in grid.nodes().iter().enumerate() {
            let u = 0.3 * (-x * x).exp();
            let du = -2.0 * x * u;
            let ddu = (4.0 * x * x - 2.0) * u;
            worst1 = worst1.max((f.d1[i] - C64::new(du, 0.0)).norm());
            worst2 = worst2.max((f.d2[i] - C64::new(ddu, 0.0)).norm());
        }
        assert!(worst1 < 1e-9, "d1 defect {worst1:.3e}");
        assert!(worst2 < 1e-8, "d2 defect {worst2:.3e}");
    }

    #[test]
    fn boundary_defect_detects_wide_profile() {
        let grid = RealGrid::new(-20.0, 20.0, 512).unwrap();
        let narrow = Field::from_profile(
            grid.clone(),
            &Profile::Gaussian {
                amplitude: 1.0,
                width: 1.0,
                center: 0.0,
            },
        )
        .unwrap();
        assert!(narrow.boundary_defect() < BOUNDARY_TOL);
        let wide = Field::from_profile(
            grid,
            &Profile::Gaussian {
                amplitude: 1.0,
                width: 10.0,
                center: 0.0,
            },
        )
        .unwrap();
        assert!(wide.boundary_defect() > BOUNDARY_TOL);
    }
}
