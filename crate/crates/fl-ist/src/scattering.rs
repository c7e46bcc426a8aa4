//! Forward scattering map: initial datum to scattering data.
//!
//! The spectral problem is the Zakharov-Shabat form
//!
//! ```text
//! Psi_x + i z [sigma3, Psi] = Qt Psi,
//! Qt = (1/2i) [ |u_x|^2                              u_x    ]
//!             [ -2i conj(u_xx) - conj(u_x)|u_x|^2  -|u_x|^2 ]
//! ```
//!
//! with Jost solutions `Psi^-(x_min) = I` and `Psi^+(x_max) = I`. The stiff
//! oscillation is handled analytically: the gauged matrix
//! `phi = Psi e^{-izx sigma3}` satisfies `phi' = (D + Qt) phi` with constant
//! `D = -iz sigma3`, which a fourth-order commutator-free exponential scheme
//! integrates with accuracy set by the smooth `Qt` alone. Exponentials of
//! traceless 2x2 matrices are evaluated in closed form, so `det Psi = 1`
//! holds to rounding along the whole trajectory.
//!
//! Scattering data on the `z`-line:
//!
//! ```text
//! a(z)  = det(Psi^-_1, Psi^+_2)                     (x-independent)
//! kb(z) = 2ik b(k) = e^{-2izx} (Psi^+_11 Psi^-_21 - Psi^+_21 Psi^-_11)
//! r2 = kb/a,    r1 = kb/(4 z a) = r2/(4z)
//! ```

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{ComplexSamples, RealGrid, SpectralGrid};
use crate::norms::{discrete_norms, NormReport};
use crate::plemelj::Projector;

/// Default floor below which `a(z)` counts as a resonance.
pub const A_FLOOR: f64 = 1e-8;

/// Physical parameters of the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub alpha: f64,
    pub beta: f64,
    /// Nonlinearity sign; the scattering pipeline is built on the
    /// `sigma = -1` branch of the Lax pair.
    pub sigma: i8,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            sigma: -1,
        }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return Err(Error::Config(
                "alpha and beta must be strictly positive".into(),
            ));
        }
        if self.sigma != 1 && self.sigma != -1 {
            return Err(Error::Config("sigma must be +1 or -1".into()));
        }
        Ok(())
    }
}

/// 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [C64; 4]);

impl Mat2 {
    pub const fn identity() -> Self {
        Mat2([
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ])
    }

    pub fn zero() -> Self {
        Mat2([C64::new(0.0, 0.0); 4])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn det(&self) -> C64 {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    /// `exp(M)` in closed form: with `mu0 = tr M / 2` and traceless part
    /// `N`, `exp(M) = e^{mu0}(cosh(mu) I + sinh(mu)/mu N)`, `mu^2 = N11^2 +
    /// N12 N21`.
    pub fn expm(&self) -> Mat2 {
        let m = &self.0;
        let mu0 = (m[0] + m[3]) * 0.5;
        let n11 = m[0] - mu0;
        let mu2 = n11 * n11 + m[1] * m[2];
        let mu = mu2.sqrt();
        let (ch, shm) = if mu.norm() < 1e-8 {
            (
                C64::new(1.0, 0.0) + mu2 * 0.5,
                C64::new(1.0, 0.0) + mu2 / 6.0,
            )
        } else {
            (mu.cosh(), mu.sinh() / mu)
        };
        let e0 = mu0.exp();
        Mat2([
            e0 * (ch + shm * n11),
            e0 * shm * m[1],
            e0 * shm * m[2],
            e0 * (ch - shm * n11),
        ])
    }
}

const GAUSS_C1: f64 = 0.5 - 0.288_675_134_594_812_9; // 1/2 - sqrt(3)/6
const GAUSS_C2: f64 = 0.5 + 0.288_675_134_594_812_9;
const CF4_A1: f64 = 0.25 + 0.144_337_567_297_406_44; // 1/4 + sqrt(3)/6
const CF4_A2: f64 = 0.25 - 0.144_337_567_297_406_44;

/// Entries of `Qt` from the field derivatives at one point.
fn qt_entries(ux: C64, uxx: C64) -> Mat2 {
    let half_i = C64::new(0.0, -0.5); // 1/(2i)
    let mod2 = C64::new(ux.norm_sqr(), 0.0);
    let q11 = half_i * mod2;
    let q12 = half_i * ux;
    let q21 = half_i * (C64::new(0.0, -2.0) * uxx.conj() - ux.conj() * mod2);
    Mat2([q11, q12, q21, -q11])
}

/// 6-point Lagrange evaluation of node samples at fractional coordinate `t`.
fn lagrange6(vals: &[C64], t: f64) -> C64 {
    let n = vals.len();
    let base = (t.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..6 {
        let xj = (base + j) as f64;
        let mut l = 1.0;
        for k in 0..6 {
            if k != j {
                let xk = (base + k) as f64;
                l *= (t - xk) / (xj - xk);
            }
        }
        acc += vals[base + j] * l;
    }
    acc
}

/// `Qt` samples over the grid plus interpolated values at the two Gauss
/// points inside every step, shared across all spectral values.
pub struct PotentialMatrix {
    pub at_nodes: Vec<Mat2>,
    gauss_lo: Vec<Mat2>,
    gauss_hi: Vec<Mat2>,
    d1: Vec<C64>,
    d2: Vec<C64>,
}

/// Build the transformed potential matrix over the grid (trace zero exactly).
pub fn build_potential_matrix(u: &Field) -> PotentialMatrix {
    let n = u.grid.n;
    let at_nodes: Vec<Mat2> = (0..n).map(|i| qt_entries(u.d1[i], u.d2[i])).collect();
    let mut gauss_lo = Vec::with_capacity(n - 1);
    let mut gauss_hi = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let t1 = i as f64 + GAUSS_C1;
        let t2 = i as f64 + GAUSS_C2;
        gauss_lo.push(qt_entries(lagrange6(&u.d1, t1), lagrange6(&u.d2, t1)));
        gauss_hi.push(qt_entries(lagrange6(&u.d1, t2), lagrange6(&u.d2, t2)));
    }
    PotentialMatrix {
        at_nodes,
        gauss_lo,
        gauss_hi,
        d1: u.d1.clone(),
        d2: u.d2.clone(),
    }
}

/// Full-trajectory Jost data at one spectral value.
#[derive(Debug, Clone)]
pub struct JostSolution {
    pub z: f64,
    /// `Psi^-(x_i; z)` at every grid node.
    pub psi_minus: Vec<Mat2>,
    /// `Psi^+(x_i; z)` at every grid node.
    pub psi_plus: Vec<Mat2>,
}

/// CF4 stepper for one spectral value: advances `phi = Psi e^{-izx sigma3}`.
struct Cf4<'p> {
    pot: &'p PotentialMatrix,
    h: f64,
    z: C64,
    /// substeps per grid interval (resolves `|z| h ~ 1` regimes)
    nsub: usize,
}

impl<'p> Cf4<'p> {
    fn new(pot: &'p PotentialMatrix, h: f64, z: C64) -> Self {
        let nsub = (1.0 + z.norm() * h.abs() / 1.2).floor() as usize;
        Self {
            pot,
            h,
            z,
            nsub: nsub.clamp(1, 64),
        }
    }

    /// Qt at fractional grid coordinate `t`.
    fn qt_at(&self, t: f64) -> Mat2 {
        qt_entries(lagrange6(&self.pot.d1, t), lagrange6(&self.pot.d2, t))
    }

    /// One grid step of `phi' = (D + Qt(x)) phi` from grid coordinate `t`
    /// over `dt` grid units (signed).
    fn step(&self, phi: &Mat2, t: f64, dt: f64) -> Mat2 {
        let d11 = C64::new(0.0, -1.0) * self.z; // -iz
        let mut out = *phi;
        let sub = dt / self.nsub as f64;
        let whole = self.nsub == 1 && (dt - 1.0).abs() < 1e-14;
        let whole_rev = self.nsub == 1 && (dt + 1.0).abs() < 1e-14;
        for s in 0..self.nsub {
            let t0 = t + sub * s as f64;
            let (q1, q2) = if whole {
                let i = t0.round() as usize;
                (self.pot.gauss_lo[i], self.pot.gauss_hi[i])
            } else if whole_rev {
                let i = (t0.round() as usize) - 1;
                // traversing right-to-left visits the Gauss points in
                // reverse order
                (self.pot.gauss_hi[i], self.pot.gauss_lo[i])
            } else {
                (
                    self.qt_at(t0 + GAUSS_C1 * sub),
                    self.qt_at(t0 + GAUSS_C2 * sub),
                )
            };
            let hs = self.h * sub;
            let mut m1 = Mat2::zero();
            let mut m2 = Mat2::zero();
            for e in 0..4 {
                m1.0[e] = (q1.0[e] * CF4_A1 + q2.0[e] * CF4_A2) * hs;
                m2.0[e] = (q1.0[e] * CF4_A2 + q2.0[e] * CF4_A1) * hs;
            }
            let half_d = d11 * (0.5 * hs);
            m1.0[0] += half_d;
            m1.0[3] -= half_d;
            m2.0[0] += half_d;
            m2.0[3] -= half_d;
            out = m2.expm().mul(&m1.expm().mul(&out));
        }
        out
    }
}

/// `Psi = phi e^{izx sigma3}`.
fn dress(phi: &Mat2, z: C64, x: f64) -> Mat2 {
    let e = (C64::new(0.0, 1.0) * z * x).exp();
    let ei = e.inv();
    Mat2([phi.0[0] * e, phi.0[1] * ei, phi.0[2] * e, phi.0[3] * ei])
}

/// `phi(x) = e^{-izx sigma3}` for `Psi(x) = I`.
fn undress_initial(z: C64, x: f64) -> Mat2 {
    let e = (C64::new(0.0, -1.0) * z * x).exp();
    let ei = e.inv();
    Mat2([e, C64::new(0.0, 0.0), C64::new(0.0, 0.0), ei])
}

/// Integrate both Jost solutions across the grid at real `z`, storing the
/// full trajectories.
pub fn solve_jost(u: &Field, pot: &PotentialMatrix, z: f64) -> Result<JostSolution> {
    if z == 0.0 {
        return Err(Error::Domain(
            "z = 0 is excluded from the spectral grid".into(),
        ));
    }
    let n = u.grid.n;
    let h = u.grid.spacing();
    let zc = C64::new(z, 0.0);
    let cf = Cf4::new(pot, h, zc);
    if cf.nsub >= 64 {
        return Err(Error::Accuracy(format!(
            "|z| h = {:.2} too oscillatory even for 64 substeps; refine the x-grid",
            z.abs() * h
        )));
    }

    let mut psi_minus = vec![Mat2::identity(); n];
    let mut phi = undress_initial(zc, u.grid.node(0));
    for i in 0..n - 1 {
        phi = cf.step(&phi, i as f64, 1.0);
        psi_minus[i + 1] = dress(&phi, zc, u.grid.node(i + 1));
    }

    let mut psi_plus = vec![Mat2::identity(); n];
    let mut phi = undress_initial(zc, u.grid.node(n - 1));
    for i in (1..n).rev() {
        phi = cf.step(&phi, i as f64, -1.0);
        psi_plus[i - 1] = dress(&phi, zc, u.grid.node(i - 1));
    }

    Ok(JostSolution {
        z,
        psi_minus,
        psi_plus,
    })
}

/// Jost matrices at selected node indices only (streaming, used by the
/// scattering reduction). Works for complex `z` in the closed upper half
/// plane, where both needed columns stay bounded.
pub fn jost_at_nodes(
    grid: &RealGrid,
    pot: &PotentialMatrix,
    z: C64,
    idx: &[usize],
) -> Vec<(Mat2, Mat2)> {
    let n = grid.n;
    let h = grid.spacing();
    let cf = Cf4::new(pot, h, z);
    let mut minus = vec![Mat2::identity(); idx.len()];
    let mut plus = vec![Mat2::identity(); idx.len()];

    let mut phi = undress_initial(z, grid.node(0));
    let mut next = idx.iter().position(|&i| i > 0).unwrap_or(idx.len());
    for i in 0..n - 1 {
        phi = cf.step(&phi, i as f64, 1.0);
        while next < idx.len() && idx[next] == i + 1 {
            minus[next] = dress(&phi, z, grid.node(i + 1));
            next += 1;
        }
    }

    let mut phi = undress_initial(z, grid.node(n - 1));
    let mut next_rev = idx.iter().rposition(|&i| i < n - 1).map(|p| p + 1).unwrap_or(0);
    for i in (1..n).rev() {
        phi = cf.step(&phi, i as f64, -1.0);
        while next_rev > 0 && idx[next_rev - 1] == i - 1 {
            plus[next_rev - 1] = dress(&phi, z, grid.node(i - 1));
            next_rev -= 1;
        }
    }

    minus.into_iter().zip(plus).collect()
}

/// Scattering data on the spectral grid.
#[derive(Debug, Clone)]
pub struct ScatteringData {
    pub grid: Arc<SpectralGrid>,
    pub a: ComplexSamples,
    /// `2ik b(k)` as a single-valued function of `z`.
    pub kb: ComplexSamples,
    pub r1: ComplexSamples,
    pub r2: ComplexSamples,
    /// Norming constant `c = (1/2) ∫ |u_x|^2 dx`.
    pub c: f64,
    pub admissible: bool,
    pub min_abs_a: f64,
}

/// Norming constant `c = (1/2) ∫ |u_x|^2 dx`.
pub fn norming_constant(u: &Field) -> f64 {
    let sq: Vec<C64> = u.d1.iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
    0.5 * u.integrate(&sq).re
}

/// Raw coefficients `(a, kb)` on the spectral grid. The Wronskian for `a`
/// is evaluated at the node nearest `x = 0` and re-checked at `±x_max/2`.
pub fn scattering_coefficients(
    u: &Field,
    pot: &PotentialMatrix,
    grid: &Arc<SpectralGrid>,
) -> Result<(ComplexSamples, ComplexSamples)> {
    let n = u.grid.n;
    let i_mid = u.grid.nearest(0.0);
    let mut idx = [n / 4, i_mid, (3 * n) / 4];
    idx.sort_unstable();
    let mid_slot = idx.iter().position(|&i| i == i_mid).unwrap();
    let xs: Vec<f64> = idx.iter().map(|&i| u.grid.node(i)).collect();

    let results: Vec<Result<(C64, C64)>> = grid
        .nodes
        .par_iter()
        .map(|&z| {
            let zc = C64::new(z, 0.0);
            let mv = jost_at_nodes(&u.grid, pot, zc, &idx);
            let mut a_vals = [C64::new(0.0, 0.0); 3];
            let mut kb_vals = [C64::new(0.0, 0.0); 3];
            for (k, (pm, pp)) in mv.iter().enumerate() {
                a_vals[k] = pm.0[0] * pp.0[3] - pm.0[2] * pp.0[1];
                let w = pp.0[0] * pm.0[2] - pp.0[2] * pm.0[0];
                kb_vals[k] = w * (C64::new(0.0, -2.0) * zc * xs[k]).exp();
            }
            let drift = a_vals
                .iter()
                .map(|v| (v - a_vals[mid_slot]).norm())
                .fold(0.0, f64::max);
            if drift > 1e-6 {
                return Err(Error::Accuracy(format!(
                    "Wronskian drift {drift:.3e} at z = {z}; refine the x-grid"
                )));
            }
            Ok((a_vals[mid_slot], kb_vals[mid_slot]))
        })
        .collect();

    let mut a = Vec::with_capacity(grid.len());
    let mut kb = Vec::with_capacity(grid.len());
    for r in results {
        let (av, kv) = r?;
        a.push(av);
        kb.push(kv);
    }
    Ok((
        ComplexSamples::new(grid.clone(), a)?,
        ComplexSamples::new(grid.clone(), kb)?,
    ))
}

/// Reflection coefficients from `(a, kb)`; `r2 = 4 z r1` holds by
/// construction and the stored `kb` is cross-checked against `r2 a`.
pub fn reflection_coefficients(
    a: &ComplexSamples,
    kb: &ComplexSamples,
    grid: &Arc<SpectralGrid>,
) -> Result<(ComplexSamples, ComplexSamples)> {
    let min_abs_a = a.values.iter().map(|v| v.norm()).fold(f64::MAX, f64::min);
    if min_abs_a < A_FLOOR {
        return Err(Error::Resonance {
            min_abs_a,
            floor: A_FLOOR,
        });
    }
    let r2: Vec<C64> = kb
        .values
        .iter()
        .zip(a.values.iter())
        .map(|(k, av)| k / av)
        .collect();
    let r1: Vec<C64> = r2
        .iter()
        .zip(grid.nodes.iter())
        .map(|(r, &z)| r / (4.0 * z))
        .collect();
    let worst = r2
        .iter()
        .zip(a.values.iter().zip(kb.values.iter()))
        .map(|(r, (av, kv))| (r * av - kv).norm())
        .fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::Accuracy(format!(
            "kb reconstruction drift {worst:.3e}"
        )));
    }
    Ok((
        ComplexSamples::new(grid.clone(), r1)?,
        ComplexSamples::new(grid.clone(), r2)?,
    ))
}

/// Admissibility report: the small-norm sufficient condition, the measured
/// minimum of |a| on the contour and over an off-axis lattice, and the
/// resulting flag.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    /// `2||u_x||_2^2 + ||u_x||_3^3 + 2||u_xx||_1 + ||u_x||_1`
    pub small_norm_value: f64,
    pub small_norm_ok: bool,
    pub min_abs_a_grid: f64,
    pub min_abs_a_offaxis: f64,
    pub admissible: bool,
    pub norms: NormReport,
}

impl std::fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "small_norm_value = {:.6e} ({})",
            self.small_norm_value,
            if self.small_norm_ok {
                "< 1: sufficient condition holds"
            } else {
                ">= 1: sufficient condition not informative"
            }
        )?;
        writeln!(f, "min_abs_a_grid = {:.6e}", self.min_abs_a_grid)?;
        writeln!(f, "min_abs_a_offaxis = {:.6e}", self.min_abs_a_offaxis)?;
        write!(f, "admissible = {}", self.admissible)
    }
}

fn l1_norm(grid: &RealGrid, vals: &[C64]) -> f64 {
    let h = grid.spacing();
    let m = vals.len();
    vals.iter()
        .enumerate()
        .map(|(i, v)| v.norm() * if i == 0 || i + 1 == m { 0.5 * h } else { h })
        .sum()
}

/// Evaluate the small-norm functional and scan `a` for zeros on the grid
/// and over a coarse upper-half-plane lattice (Cauchy continuation of the
/// boundary samples).
pub fn admissibility_check(u: &Field, a: &ComplexSamples, c: f64) -> AdmissibilityReport {
    let norms = discrete_norms(u);
    let small_norm_value = 2.0 * norms.l2_d1 * norms.l2_d1
        + norms.l3_d1.powi(3)
        + 2.0 * norms.l1_d2
        + l1_norm(&u.grid, &u.d1);
    let min_abs_a_grid = a.values.iter().map(|v| v.norm()).fold(f64::MAX, f64::min);

    // off-axis scan: a(z0) = e^{-ic} + C(a - e^{-ic})(z0) on a 16x8 lattice
    let a_inf = (C64::new(0.0, -1.0) * c).exp();
    let shifted: Vec<C64> = a.values.iter().map(|v| v - a_inf).collect();
    let mut projector = Projector::new(&a.grid);
    let z_cut = a.grid.params.z_cut;
    let mut min_off = f64::MAX;
    for i in 0..16 {
        let re = -z_cut / 4.0 + (i as f64 + 0.5) * (z_cut / 2.0) / 16.0;
        for j in 0..8 {
            let im = 0.25 + 3.75 * j as f64 / 7.0;
            let v = a_inf + projector.cauchy_offaxis(&shifted, C64::new(re, im));
            min_off = min_off.min(v.norm());
        }
    }

    let admissible = min_abs_a_grid > A_FLOOR && min_off > A_FLOOR;
    AdmissibilityReport {
        small_norm_value,
        small_norm_ok: small_norm_value < 1.0,
        min_abs_a_grid,
        min_abs_a_offaxis: min_off,
        admissible,
        norms,
    }
}

/// Full forward map: field to scattering data.
pub fn forward_scattering(u: &Field, grid: &Arc<SpectralGrid>) -> Result<ScatteringData> {
    let pot = build_potential_matrix(u);
    let (a, kb) = scattering_coefficients(u, &pot, grid)?;
    let (r1, r2) = reflection_coefficients(&a, &kb, grid)?;
    let c = norming_constant(u);
    let report = admissibility_check(u, &a, c);
    Ok(ScatteringData {
        grid: grid.clone(),
        a,
        kb,
        r1,
        r2,
        c,
        admissible: report.admissible,
        min_abs_a: report.min_abs_a_grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Profile;
    use crate::grid::SpectralGridParams;

    fn gaussian(amp: f64) -> Field {
        let grid = RealGrid::new(-20.0, 20.0, 1024).unwrap();
        Field::from_profile(
            grid,
            &Profile::Gaussian {
                amplitude: amp,
                width: 1.0,
                center: 0.0,
            },
        )
        .unwrap()
    }

    fn small_grid() -> Arc<SpectralGrid> {
        Arc::new(
            SpectralGrid::new(SpectralGridParams {
                z_cut: 16.0,
                z_ref: 1.0,
                z_min_inner: 1e-3,
                n_z_outer: 256,
            })
            .unwrap(),
        )
    }

    #[test]
    fn potential_matrix_properties() {
        let u = gaussian(0.5);
        let pot = build_potential_matrix(&u);
        for (i, q) in pot.at_nodes.iter().enumerate() {
            assert_eq!(q.0[0] + q.0[3], C64::new(0.0, 0.0));
            let expect = u.d1[i] / C64::new(0.0, 2.0);
            assert!((q.0[1] - expect).norm() < 1e-15);
        }
        let zero = Field::zero(RealGrid::new(-10.0, 10.0, 256).unwrap());
        let pz = build_potential_matrix(&zero);
        assert!(pz
            .at_nodes
            .iter()
            .all(|q| q.0.iter().all(|e| e.norm() == 0.0)));
    }

    #[test]
    fn zero_field_gives_identity_jost() {
        let grid = RealGrid::new(-10.0, 10.0, 256).unwrap();
        let u = Field::zero(grid);
        let pot = build_potential_matrix(&u);
        for &z in &[0.5, -3.0, 12.0] {
            let j = solve_jost(&u, &pot, z).unwrap();
            for m in j.psi_minus.iter().chain(j.psi_plus.iter()) {
                for (e, id) in m.0.iter().zip(Mat2::identity().0.iter()) {
                    assert!((e - id).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn determinant_stays_one() {
        let u = gaussian(0.4);
        let pot = build_potential_matrix(&u);
        for &z in &[0.013, 1.0, -7.3, 63.0] {
            let j = solve_jost(&u, &pot, z).unwrap();
            let worst = j
                .psi_minus
                .iter()
                .chain(j.psi_plus.iter())
                .map(|m| (m.det() - C64::new(1.0, 0.0)).norm())
                .fold(0.0, f64::max);
            assert!(worst < 1e-12, "det drift {worst:.3e} at z={z}");
        }
    }

    #[test]
    fn jost_bounded_in_z() {
        let u = gaussian(0.3);
        let pot = build_potential_matrix(&u);
        let mut sup: f64 = 0.0;
        for &z in &[0.01, 0.5, 2.0, 10.0, 40.0, 64.0] {
            let j = solve_jost(&u, &pot, z).unwrap();
            for m in j.psi_minus.iter().chain(j.psi_plus.iter()) {
                for e in m.0.iter() {
                    sup = sup.max(e.norm());
                }
            }
        }
        assert!(sup < 3.0, "Jost functions unbounded: sup = {sup}");
    }

    #[test]
    fn large_z_diagonal_limit() {
        // Psi^-_11(x; z_cut) ~ e^{-i c_-(x)}
        let u = gaussian(0.3);
        let pot = build_potential_matrix(&u);
        let j = solve_jost(&u, &pot, 64.0).unwrap();
        let h = u.grid.spacing();
        let mut c_minus = 0.0;
        let mut worst: f64 = 0.0;
        for i in 0..u.grid.n {
            if i > 0 {
                c_minus += 0.25 * h * (u.d1[i - 1].norm_sqr() + u.d1[i].norm_sqr());
            }
            let expect = (C64::new(0.0, -1.0) * c_minus).exp();
            worst = worst.max((j.psi_minus[i].0[0] - expect).norm());
        }
        assert!(worst < 5e-3, "diagonal limit defect {worst:.3e}");
    }

    #[test]
    fn zero_field_scattering_is_trivial() {
        let grid = RealGrid::new(-10.0, 10.0, 256).unwrap();
        let u = Field::zero(grid);
        let sg = small_grid();
        let data = forward_scattering(&u, &sg).unwrap();
        assert!(data
            .a
            .values
            .iter()
            .all(|v| (v - C64::new(1.0, 0.0)).norm() < 1e-12));
        assert!(data.kb.values.iter().all(|v| v.norm() < 1e-12));
        assert!(data.admissible);
        assert_eq!(data.c, 0.0);
    }

    #[test]
    fn unitarity_identity() {
        // (1 + conj(r1) r2) |a|^2 = 1 with conj(r1) r2 real
        let u = gaussian(0.25);
        let sg = small_grid();
        let data = forward_scattering(&u, &sg).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..sg.len() {
            let prod = data.r1.values[i].conj() * data.r2.values[i];
            let lhs = (1.0 + prod.re) * data.a.values[i].norm_sqr();
            worst = worst.max((lhs - 1.0).abs()).max(prod.im.abs());
        }
        assert!(worst < 1e-6, "unitarity defect {worst:.3e}");
    }

    #[test]
    fn norming_constant_gaussian_closed_form() {
        // c = (1/2) A^2 sqrt(pi/2) for u = A e^{-x^2}
        for amp in [0.25, 0.5] {
            let u = gaussian(amp);
            let c = norming_constant(&u);
            let exact = 0.5 * amp * amp * (std::f64::consts::PI / 2.0).sqrt();
            assert!((c - exact).abs() < 1e-10, "c = {c}, exact {exact}");
        }
    }

    #[test]
    fn a_limit_is_unimodular_phase() {
        let u = gaussian(0.25);
        let sg = small_grid();
        let data = forward_scattering(&u, &sg).unwrap();
        let edge = data.a.values[sg.len() - 1];
        assert!(
            (edge.norm() - 1.0).abs() < 1e-3,
            "|a(z_cut)| = {}",
            edge.norm()
        );
    }

    #[test]
    fn r2_is_4z_r1_exactly() {
        let u = gaussian(0.25);
        let sg = small_grid();
        let data = forward_scattering(&u, &sg).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..sg.len() {
            worst =
                worst.max((data.r2.values[i] - data.r1.values[i] * 4.0 * sg.nodes[i]).norm());
        }
        assert!(worst < 1e-12, "r2 - 4 z r1 = {worst:.3e}");
    }

    #[test]
    fn admissibility_zero_and_small() {
        let grid = RealGrid::new(-10.0, 10.0, 256).unwrap();
        let zero = Field::zero(grid);
        let sg = small_grid();
        let data = forward_scattering(&zero, &sg).unwrap();
        let rep = admissibility_check(&zero, &data.a, data.c);
        assert!(rep.small_norm_ok && rep.admissible);
        assert_eq!(rep.small_norm_value, 0.0);
        assert!((rep.min_abs_a_grid - 1.0).abs() < 1e-10);

        // small Gaussian: whenever the sufficient condition holds the scan
        // must find |a| >= 1/2; here the datum is admissible via the scan
        // (the quadratic-norm functional exceeds 1 already at amplitude 1/4)
        let u = gaussian(0.25);
        let data = forward_scattering(&u, &sg).unwrap();
        let rep = admissibility_check(&u, &data.a, data.c);
        if rep.small_norm_ok {
            assert!(rep.min_abs_a_grid >= 0.5);
        }
        assert!(rep.admissible);
        assert!(rep.min_abs_a_grid >= 0.5);
        assert!(rep.min_abs_a_offaxis >= 0.5);

        // a tiny datum does satisfy the sufficient condition
        let tiny = gaussian(0.05);
        let data = forward_scattering(&tiny, &sg).unwrap();
        let rep = admissibility_check(&tiny, &data.a, data.c);
        assert!(rep.small_norm_ok, "value = {}", rep.small_norm_value);
        assert!(rep.min_abs_a_grid >= 0.5);
    }

    #[test]
    fn large_amplitude_falls_back_to_scan() {
        let u = gaussian(3.0);
        let norms = discrete_norms(&u);
        let small = 2.0 * norms.l2_d1 * norms.l2_d1 + norms.l3_d1.powi(3) + 2.0 * norms.l1_d2;
        assert!(small > 1.0, "amplitude 3 should violate the small-norm bound");
    }
}
