//! Explicit linear time flow of the reflection coefficients:
//!
//! ```text
//! r_j(t; z) = r_j(z) exp(-2i alpha (z - beta + beta^2/(4z)) t)
//! ```
//!
//! The exponent is `-2i eta^2 t` with `eta = sqrt(alpha)(k - beta/(2k))`
//! written in `z = k^2`; `a` does not evolve. The phase is unimodular, so
//! all moduli and weighted norms of `r_j` are preserved exactly; only the
//! `z`-derivative grows (linearly in `t`), which is what the inner grid
//! refinement has to resolve near the origin.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{ComplexSamples, INNER_RATIO};
use crate::scattering::{PhysParams, ScatteringData};

/// Evolved reflection data at one time.
#[derive(Debug, Clone)]
pub struct EvolvedData {
    pub base: ScatteringData,
    pub t: f64,
    pub r1_t: ComplexSamples,
    pub r2_t: ComplexSamples,
}

/// `exp(-2i alpha (z - beta + beta^2/(4z)) t)`.
pub fn evolution_phase(z: f64, t: f64, params: &PhysParams) -> Result<C64> {
    if z == 0.0 {
        return Err(Error::Domain("evolution phase is singular at z = 0".into()));
    }
    let eta2 = params.alpha * (z - params.beta + params.beta * params.beta / (4.0 * z));
    Ok(C64::from_polar(1.0, -2.0 * eta2 * t))
}

/// Smallest inner cutoff that still resolves the `beta^2/(4z)` oscillation
/// with at least eight nodes per period on the geometric rings.
pub fn aliasing_safe_z_min(t: f64, params: &PhysParams) -> f64 {
    2.0 * params.alpha * params.beta * params.beta * t.abs() * (1.0 - 1.0 / INNER_RATIO)
        / std::f64::consts::PI
}

/// Whether the grid's inner cutoff resolves the evolved phase at time `t`.
pub fn check_aliasing(data: &ScatteringData, t: f64, params: &PhysParams) -> Option<String> {
    let needed = aliasing_safe_z_min(t, params);
    let z_min = data.grid.params.z_min_inner;
    if z_min < needed {
        Some(format!(
            "inner nodes below z = {needed:.3e} under-resolve the evolution phase at t = {t}; \
             consider z_min_inner >= {needed:.3e}"
        ))
    } else {
        None
    }
}

/// Apply the flow to the reflection coefficients.
pub fn evolve(data: &ScatteringData, t: f64, params: &PhysParams) -> Result<EvolvedData> {
    params.validate()?;
    if !data.admissible {
        return Err(Error::Contract(
            "refusing to evolve inadmissible scattering data".into(),
        ));
    }
    let n = data.grid.len();
    let mut r1_t = Vec::with_capacity(n);
    let mut r2_t = Vec::with_capacity(n);
    for i in 0..n {
        let phase = evolution_phase(data.grid.nodes[i], t, params)?;
        r1_t.push(data.r1.values[i] * phase);
        r2_t.push(data.r2.values[i] * phase);
    }
    Ok(EvolvedData {
        base: data.clone(),
        t,
        r1_t: ComplexSamples::new(data.grid.clone(), r1_t)?,
        r2_t: ComplexSamples::new(data.grid.clone(), r2_t)?,
    })
}

/// Discrete `H^1`-growth surrogate: finite-difference d/dz norms of the
/// evolved coefficient against the linear-in-t bound
/// `||dz r(t)|| <= ||dz r(0)|| + t (2 alpha ||r|| + alpha beta^2/2 ||z^-2 r||)`.
pub fn derivative_growth_check(
    data: &ScatteringData,
    evolved: &EvolvedData,
    params: &PhysParams,
) -> (f64, f64) {
    let fd_norm = |s: &ComplexSamples| -> f64 {
        let g = &s.grid;
        let mut acc = 0.0;
        for i in 0..g.len() - 1 {
            let dz = g.nodes[i + 1] - g.nodes[i];
            let d = (s.values[i + 1] - s.values[i]) / dz;
            acc += d.norm_sqr() * dz;
        }
        acc.sqrt()
    };
    let weighted = |s: &ComplexSamples| -> f64 {
        s.values
            .iter()
            .zip(s.grid.nodes.iter().zip(s.grid.weights.iter()))
            .map(|(v, (z, w))| (v / (z * z)).norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    };
    let lhs = fd_norm(&evolved.r1_t);
    let slope =
        2.0 * params.alpha * data.r1.l2_norm() + 0.5 * params.alpha * params.beta.powi(2) * weighted(&data.r1);
    let rhs = fd_norm(&data.r1) + evolved.t.abs() * slope;
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, Profile};
    use crate::grid::{RealGrid, SpectralGrid, SpectralGridParams};
    use crate::scattering::forward_scattering;
    use std::sync::Arc;

    fn sample_data() -> ScatteringData {
        let grid = RealGrid::new(-20.0, 20.0, 1024).unwrap();
        let u = Field::from_profile(
            grid,
            &Profile::Gaussian {
                amplitude: 0.25,
                width: 1.0,
                center: 0.0,
            },
        )
        .unwrap();
        let sg = Arc::new(
            SpectralGrid::new(SpectralGridParams {
                z_cut: 16.0,
                z_ref: 1.0,
                z_min_inner: 1e-3,
                n_z_outer: 256,
            })
            .unwrap(),
        );
        forward_scattering(&u, &sg).unwrap()
    }

    #[test]
    fn phase_basics() {
        let p = PhysParams::default();
        for &z in &[0.3, -2.0, 5.5] {
            assert_eq!(evolution_phase(z, 0.0, &p).unwrap(), C64::new(1.0, 0.0));
            let ph = evolution_phase(z, 1.7, &p).unwrap();
            assert!((ph.norm() - 1.0).abs() < 1e-15);
        }
        assert!(evolution_phase(0.0, 1.0, &p).is_err());
    }

    #[test]
    fn stationary_point_at_half_beta() {
        // z = beta/2: z - beta + beta^2/(4z) = 0, so the phase is 1 for all t
        for beta in [1.0, 2.5] {
            let p = PhysParams {
                alpha: 1.3,
                beta,
                sigma: -1,
            };
            for &t in &[0.1, 1.0, 10.0] {
                let ph = evolution_phase(beta / 2.0, t, &p).unwrap();
                assert!((ph - C64::new(1.0, 0.0)).norm() < 1e-12, "t={t}: {ph}");
            }
        }
    }

    #[test]
    fn moduli_and_norms_preserved() {
        let data = sample_data();
        let p = PhysParams::default();
        let ev = evolve(&data, 0.8, &p).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..data.grid.len() {
            worst = worst.max((ev.r1_t.values[i].norm() - data.r1.values[i].norm()).abs());
            worst = worst.max((ev.r2_t.values[i].norm() - data.r2.values[i].norm()).abs());
            // common phase: r2(t) = 4 z r1(t) still
            let d = ev.r2_t.values[i] - ev.r1_t.values[i] * 4.0 * data.grid.nodes[i];
            worst = worst.max(d.norm());
        }
        assert!(worst < 1e-13, "modulus/ratio drift {worst:.3e}");
        let n0 = data.r1.l21_norm();
        let n1 = ev.r1_t.l21_norm();
        assert!((n0 - n1).abs() < 1e-12 * n0.max(1.0), "L21 drift");
    }

    #[test]
    fn group_property() {
        let data = sample_data();
        let p = PhysParams::default();
        let once = evolve(&data, 0.9, &p).unwrap();
        let data_mid = ScatteringData {
            r1: once.r1_t.clone(),
            r2: once.r2_t.clone(),
            ..data.clone()
        };
        let twice = evolve(&data_mid, 0.35, &p).unwrap();
        let direct = evolve(&data, 1.25, &p).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..data.grid.len() {
            worst = worst.max((twice.r1_t.values[i] - direct.r1_t.values[i]).norm());
        }
        assert!(worst < 1e-14, "group property defect {worst:.3e}");
    }

    #[test]
    fn t_zero_is_identity() {
        let data = sample_data();
        let ev = evolve(&data, 0.0, &PhysParams::default()).unwrap();
        for i in 0..data.grid.len() {
            assert_eq!(ev.r1_t.values[i], data.r1.values[i]);
            assert_eq!(ev.r2_t.values[i], data.r2.values[i]);
        }
    }

    #[test]
    fn derivative_growth_bounded() {
        let data = sample_data();
        let p = PhysParams::default();
        for &t in &[0.25, 0.5, 1.0] {
            let ev = evolve(&data, t, &p).unwrap();
            let (lhs, rhs) = derivative_growth_check(&data, &ev, &p);
            assert!(
                lhs <= rhs * 1.05,
                "t={t}: fd-derivative {lhs:.4e} exceeds bound {rhs:.4e}"
            );
        }
    }

    #[test]
    fn aliasing_warning_threshold() {
        let data = sample_data();
        let p = PhysParams::default();
        // z_min_inner = 1e-3 resolves only tiny times
        assert!(check_aliasing(&data, 1.0, &p).is_some());
        assert!(check_aliasing(&data, 1e-5, &p).is_none());
    }
}
