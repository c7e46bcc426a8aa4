//! Continuum-normalized Fourier pair on the physical grid.
//!
//! Convention:
//!
//! ```text
//! fhat(xi) = (1/2pi) ∫ f(x) e^{-i x xi} dx,      f(x) = ∫ fhat(xi) e^{i x xi} dxi.
//! ```
//!
//! The spectrum lives on a symmetric half-bin-shifted frequency grid (so the
//! origin is excluded, matching every other spectral sample set in the
//! crate) and the pair is exactly unitary: the round trip reproduces the
//! input to rounding.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{ComplexSamples, RealGrid, SpectralGrid};

/// Frequency grid associated with a physical grid: `n` half-shifted nodes up
/// to the Nyquist frequency `pi/h`.
pub fn frequency_grid(grid: &RealGrid) -> Result<SpectralGrid> {
    let h = grid.spacing();
    SpectralGrid::uniform_symmetric(std::f64::consts::PI / h, grid.n)
}

/// Forward transform of a field.
pub fn fourier_pair(field: &Field) -> Result<ComplexSamples> {
    let freq = Arc::new(frequency_grid(&field.grid)?);
    let values = forward_on(&field.grid, &field.values)?;
    ComplexSamples::new(freq, values)
}

/// Forward transform of raw samples on a grid.
pub fn forward_on(grid: &RealGrid, values: &[C64]) -> Result<Vec<C64>> {
    let n = grid.n;
    if values.len() != n {
        return Err(Error::Contract("sample/grid size mismatch".into()));
    }
    let h = grid.spacing();
    let dxi = 2.0 * std::f64::consts::PI / (n as f64 * h);
    let mut buf: Vec<C64> = values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            v * sign * C64::from_polar(1.0, -std::f64::consts::PI * j as f64 / n as f64)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = h / (2.0 * std::f64::consts::PI);
    let out = (0..n)
        .map(|k| {
            let xi = (k as f64 - n as f64 / 2.0 + 0.5) * dxi;
            buf[k] * scale * C64::from_polar(1.0, -xi * grid.x_min)
        })
        .collect();
    Ok(out)
}

/// Inverse transform back onto a physical grid.
pub fn fourier_inverse(spectrum: &ComplexSamples, grid: &RealGrid) -> Result<Vec<C64>> {
    let n = grid.n;
    if spectrum.len() != n {
        return Err(Error::Contract(
            "spectrum length does not match target grid".into(),
        ));
    }
    let h = grid.spacing();
    let dxi = 2.0 * std::f64::consts::PI / (n as f64 * h);
    let mut buf: Vec<C64> = (0..n)
        .map(|k| {
            let xi = (k as f64 - n as f64 / 2.0 + 0.5) * dxi;
            spectrum.values[k] * C64::from_polar(1.0, xi * grid.x_min)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    let out = buf
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            v * dxi * sign * C64::from_polar(1.0, std::f64::consts::PI * j as f64 / n as f64)
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Profile;

    fn gaussian_field(n: usize) -> Field {
        let grid = RealGrid::new(-24.0, 24.0, n).unwrap();
        Field::from_profile(
            grid,
            &Profile::Gaussian {
                amplitude: 1.0,
                width: std::f64::consts::SQRT_2,
                center: 0.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_transforms_to_zero() {
        let grid = RealGrid::new(-10.0, 10.0, 256).unwrap();
        let spec = fourier_pair(&Field::zero(grid)).unwrap();
        assert_eq!(spec.max_abs(), 0.0);
    }

    #[test]
    fn gaussian_closed_form() {
        // f = e^{-x^2/2}  =>  fhat(xi) = e^{-xi^2/2} / sqrt(2 pi)
        let f = gaussian_field(2048);
        let spec = fourier_pair(&f).unwrap();
        let c = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let mut worst = 0.0f64;
        for (k, &xi) in spec.grid.nodes.iter().enumerate() {
            let exact = c * (-0.5 * xi * xi).exp();
            worst = worst.max((spec.values[k] - C64::new(exact, 0.0)).norm());
        }
        assert!(worst < 1e-8, "worst {worst:.3e}");
    }

    #[test]
    fn round_trip_is_identity() {
        let f = gaussian_field(1024);
        let spec = fourier_pair(&f).unwrap();
        let back = fourier_inverse(&spec, &f.grid).unwrap();
        let mut worst = 0.0f64;
        for i in 0..f.values.len() {
            worst = worst.max((back[i] - f.values[i]).norm());
        }
        assert!(worst < 1e-12, "round trip defect {worst:.3e}");
    }

    #[test]
    fn plancherel_identity() {
        // ||f||_2^2 = 2 pi ||fhat||_2^2 for a random band-limited sample set
        let grid = RealGrid::new(-16.0, 16.0, 512).unwrap();
        let mut state = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        // random smooth field: a few Gaussian bumps with random weights
        let vals: Vec<C64> = grid
            .nodes()
            .iter()
            .map(|&x| {
                let mut v = C64::new(0.0, 0.0);
                for c in [-4.0, -1.0, 2.0, 5.0] {
                    v += C64::new(rnd_det(c), rnd_det(c + 0.5)) * (-(x - c) * (x - c)).exp();
                }
                v + C64::new(rnd(), rnd()) * 0.0
            })
            .collect();
        fn rnd_det(seed: f64) -> f64 {
            (seed * 12.9898).sin() * 0.43758
        }
        let f = Field::from_values(grid.clone(), vals).unwrap();
        let spec = fourier_pair(&f).unwrap();
        let h = grid.spacing();
        let lhs: f64 = f.values.iter().map(|v| v.norm_sqr() * h).sum();
        let dxi = spec.grid.weights[0];
        let rhs: f64 =
            2.0 * std::f64::consts::PI * spec.values.iter().map(|v| v.norm_sqr() * dxi).sum::<f64>();
        assert!(
            (lhs - rhs).abs() <= 1e-10 * lhs.max(1e-300),
            "plancherel defect {:.3e}",
            (lhs - rhs).abs()
        );
    }
}
