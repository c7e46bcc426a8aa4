//! Physical and spectral grids.
//!
//! The physical grid is a plain power-of-two uniform grid in `x`. The spectral
//! grid in `z` is composite: a uniform outer region on `±[z_ref, z_cut]` and a
//! refined inner region on `±[z_min_inner, z_ref]` whose gaps shrink
//! geometrically toward the origin, with `z = 0` excluded. Both the
//! reconstruction integrands (`r1/z`) and the evolution phase (`β²/(4z)`) are
//! singular at the origin, so nodes accumulate there but never touch it.
//!
//! Every `SpectralGrid` also carries a uniform FFT lattice plus the sparse
//! resampling operators between node set and lattice; the Plemelj machinery
//! in [`crate::plemelj`] runs on that lattice.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::interp::SparseInterp;

/// Geometric shrink factor for the inner spectral gaps.
pub const INNER_RATIO: f64 = 1.3;

/// Padded lattice points available to the node sample-back stencils.
pub const SAMPLE_BACK_PAD: usize = 8;

/// Uniform grid in the physical variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl RealGrid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config(format!(
                "invalid x-range [{x_min}, {x_max}]"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "x-grid size {n} must be a power of two >= 4"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Node spacing `h = (x_max - x_min)/(n-1)`.
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x_min + self.spacing() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.spacing()).round() as isize;
        i.clamp(0, self.n as isize - 1) as usize
    }
}

/// Parameters of the composite spectral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGridParams {
    pub z_cut: f64,
    pub z_ref: f64,
    pub z_min_inner: f64,
    /// Total number of outer nodes (both sides); a power of two.
    pub n_z_outer: usize,
}

impl Default for SpectralGridParams {
    fn default() -> Self {
        Self {
            z_cut: 64.0,
            z_ref: 1.0,
            z_min_inner: 1e-3,
            n_z_outer: 1024,
        }
    }
}

/// The uniform lattice a spectral grid resamples onto for FFT work.
#[derive(Clone)]
pub struct UniformLattice {
    /// Number of physical lattice points covering `[-z_cut, z_cut)`.
    pub n: usize,
    /// Zero-padded transform length.
    pub n_pad: usize,
    pub dz: f64,
    pub z0: f64,
    pub fft_fwd: Arc<dyn Fft<f64>>,
    pub fft_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for UniformLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UniformLattice")
            .field("n", &self.n)
            .field("n_pad", &self.n_pad)
            .field("dz", &self.dz)
            .field("z0", &self.z0)
            .finish()
    }
}

impl UniformLattice {
    fn new(z_cut: f64) -> Self {
        // ~32 lattice points per unit z; enough that the lattice never limits
        // accuracy relative to the composite nodes. The 4x padding leaves
        // room for algebraic tail extensions out to |z| = 4 z_cut.
        let n = ((2.0 * z_cut * 32.0) as usize).next_power_of_two().max(256);
        let n_pad = 4 * n;
        let dz = 2.0 * z_cut / n as f64;
        let mut planner = FftPlanner::new();
        Self {
            n,
            n_pad,
            dz,
            z0: -z_cut,
            fft_fwd: planner.plan_fft_forward(n_pad),
            fft_inv: planner.plan_fft_inverse(n_pad),
        }
    }

    pub fn node(&self, j: usize) -> f64 {
        self.z0 + self.dz * j as f64
    }

    /// Frequency spacing of the padded transform.
    pub fn dxi(&self) -> f64 {
        2.0 * std::f64::consts::PI / (self.n_pad as f64 * self.dz)
    }

    /// Frequency of padded bin `m` (signed, `m` in `-n_pad/2..n_pad/2`).
    pub fn xi(&self, m: isize) -> f64 {
        self.dxi() * m as f64
    }
}

/// Composite spectral grid with quadrature weights and resampling operators.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub params: SpectralGridParams,
    /// Strictly increasing nodes, symmetric about 0, excluding 0.
    pub nodes: Vec<f64>,
    /// Trapezoidal weights spanning `[-z_cut, z_cut]`.
    pub weights: Vec<f64>,
    pub lattice: UniformLattice,
    pub to_lattice: SparseInterp,
    pub to_nodes: SparseInterp,
}

impl SpectralGrid {
    pub fn new(params: SpectralGridParams) -> Result<Self> {
        let SpectralGridParams {
            z_cut,
            z_ref,
            z_min_inner,
            n_z_outer,
        } = params;
        if !(z_cut > z_ref && z_ref > z_min_inner && z_min_inner > 0.0) {
            return Err(Error::Config(format!(
                "spectral grid needs 0 < z_min_inner < z_ref < z_cut, got {z_min_inner}, {z_ref}, {z_cut}"
            )));
        }
        if n_z_outer < 16 || !n_z_outer.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_z_outer = {n_z_outer} must be a power of two >= 16"
            )));
        }

        let per_side = n_z_outer / 2;
        let d_out = (z_cut - z_ref) / (per_side - 1) as f64;
        // Inner gaps: geometric shrink by INNER_RATIO, capped at half the
        // outer spacing so the junction never coarsens the grid.
        let cap = 0.5 * d_out;
        let mut side: Vec<f64> = Vec::new();
        let mut z = z_ref;
        loop {
            let gap = (z * (1.0 - 1.0 / INNER_RATIO)).min(cap);
            let next = z - gap;
            if next <= z_min_inner * 1.05 {
                break;
            }
            side.push(next);
            z = next;
        }
        side.push(z_min_inner);
        // side currently descends from just below z_ref to z_min_inner.
        let mut nodes: Vec<f64> = Vec::with_capacity(n_z_outer + 2 * side.len());
        for &v in side.iter() {
            nodes.push(-v);
        }
        for i in 0..per_side {
            nodes.push(-(z_ref + d_out * i as f64));
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut mirrored: Vec<f64> = nodes.iter().rev().map(|&v| -v).collect();
        nodes.append(&mut mirrored);

        let n = nodes.len();
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let left = if i == 0 { nodes[0] } else { nodes[i - 1] };
            let right = if i + 1 == n { nodes[n - 1] } else { nodes[i + 1] };
            weights[i] = 0.5 * (right - left);
        }

        let lattice = UniformLattice::new(z_cut);
        let lat_nodes: Vec<f64> = (0..lattice.n).map(|j| lattice.node(j)).collect();
        let to_lattice = SparseInterp::build(&nodes, &lat_nodes);
        // sample-back reads a few padded lattice points past +z_cut so the
        // outermost node interpolates instead of extrapolating
        let ext_nodes: Vec<f64> = (0..lattice.n + SAMPLE_BACK_PAD)
            .map(|j| lattice.node(j))
            .collect();
        let to_nodes = SparseInterp::build(&ext_nodes, &nodes);

        Ok(Self {
            params,
            nodes,
            weights,
            lattice,
            to_lattice,
            to_nodes,
        })
    }

    /// Uniform symmetric grid with half-bin-shifted nodes (no inner
    /// refinement, origin excluded). Used for Fourier-side sample sets.
    pub fn uniform_symmetric(cut: f64, n: usize) -> Result<Self> {
        if !(cut > 0.0) || n < 4 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "uniform grid needs cut > 0 and power-of-two n >= 4, got {cut}, {n}"
            )));
        }
        let d = 2.0 * cut / n as f64;
        let nodes: Vec<f64> = (0..n)
            .map(|k| (k as f64 - n as f64 / 2.0 + 0.5) * d)
            .collect();
        let weights = vec![d; n];
        let lattice = UniformLattice::new(cut);
        let lat_nodes: Vec<f64> = (0..lattice.n).map(|j| lattice.node(j)).collect();
        let to_lattice = SparseInterp::build(&nodes, &lat_nodes);
        let ext_nodes: Vec<f64> = (0..lattice.n + SAMPLE_BACK_PAD)
            .map(|j| lattice.node(j))
            .collect();
        let to_nodes = SparseInterp::build(&ext_nodes, &nodes);
        Ok(Self {
            params: SpectralGridParams {
                z_cut: cut,
                z_ref: cut,
                z_min_inner: 0.5 * d,
                n_z_outer: n,
            },
            nodes,
            weights,
            lattice,
            to_lattice,
            to_nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Trapezoidal quadrature of complex samples against the weights.
    pub fn integrate(&self, values: &[C64]) -> C64 {
        self.nodes
            .iter()
            .zip(values.iter().zip(self.weights.iter()))
            .map(|(_, (v, w))| v * *w)
            .sum()
    }

    /// Discrete L2 norm on the grid.
    pub fn l2_norm(&self, values: &[C64]) -> f64 {
        values
            .iter()
            .zip(self.weights.iter())
            .map(|(v, w)| v.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete weighted L^{2,1} norm: `||<z> v||_2` with `<z> = sqrt(1+z^2)`.
    pub fn l21_norm(&self, values: &[C64]) -> f64 {
        values
            .iter()
            .zip(self.nodes.iter().zip(self.weights.iter()))
            .map(|(v, (z, w))| v.norm_sqr() * (1.0 + z * z) * w)
            .sum::<f64>()
            .sqrt()
    }
}

/// Complex samples tied to a shared spectral grid.
#[derive(Debug, Clone)]
pub struct ComplexSamples {
    pub grid: Arc<SpectralGrid>,
    pub values: Vec<C64>,
}

impl ComplexSamples {
    pub fn new(grid: Arc<SpectralGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "sample count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Contract("non-finite sample values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Sample a scalar function of `z` on the grid.
    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.nodes.iter().map(|&z| f(z)).collect();
        Self { grid, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid.l2_norm(&self.values)
    }

    pub fn l21_norm(&self) -> f64 {
        self.grid.l21_norm(&self.values)
    }

    /// Largest |v| over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_grid_rejects_non_power_of_two() {
        assert!(RealGrid::new(-10.0, 10.0, 1000).is_err());
        assert!(RealGrid::new(-10.0, 10.0, 1024).is_ok());
    }

    #[test]
    fn spectral_grid_invariants() {
        let g = SpectralGrid::new(SpectralGridParams::default()).unwrap();
        // strictly increasing, no zero, symmetric
        for w in g.nodes.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(g.nodes.iter().all(|&z| z != 0.0));
        let n = g.len();
        for i in 0..n {
            assert!(
                (g.nodes[i] + g.nodes[n - 1 - i]).abs() < 1e-12,
                "grid not symmetric at {i}"
            );
        }
        assert!(g.weights.iter().all(|&w| w > 0.0));
        let total: f64 = g.weights.iter().sum();
        assert!(
            (total - 2.0 * g.params.z_cut).abs() / (2.0 * g.params.z_cut) < 1e-10,
            "weights sum to {total}"
        );
        // innermost node is z_min_inner
        let min_pos = g.nodes.iter().cloned().filter(|&z| z > 0.0).fold(f64::MAX, f64::min);
        assert!((min_pos - g.params.z_min_inner).abs() < 1e-12);
    }

    #[test]
    fn spectral_grid_size_near_target() {
        let g = SpectralGrid::new(SpectralGridParams::default()).unwrap();
        // ~1024 outer plus a small inner count
        assert!(g.len() >= 1024 && g.len() < 1300, "len = {}", g.len());
    }

    #[test]
    fn quadrature_gaussian() {
        // composite trapezoid: second order at the region junctions
        let g = Arc::new(SpectralGrid::new(SpectralGridParams::default()).unwrap());
        let s = ComplexSamples::from_fn(g.clone(), |z| C64::new((-z * z).exp(), 0.0));
        let v = g.integrate(&s.values);
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 2e-3);
        assert!(v.im.abs() < 1e-14);
        // uniform symmetric grid: trapezoid is spectrally accurate
        let u = Arc::new(SpectralGrid::uniform_symmetric(16.0, 512).unwrap());
        let su = ComplexSamples::from_fn(u.clone(), |z| C64::new((-z * z).exp(), 0.0));
        let vu = u.integrate(&su.values);
        assert!((vu.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}
