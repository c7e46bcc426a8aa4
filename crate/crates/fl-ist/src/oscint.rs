//! Oscillatory quadrature on the composite spectral grid.
//!
//! Reconstruction integrals have the shape `∫ f(z) e^{i w z} dz` with `f`
//! sampled on the (non-uniform) spectral grid and `|w|` up to `2 x_max`.
//! Plain trapezoid degrades once `w dz ~ 1`, so each interval is integrated
//! by a product rule: fit the cubic through the four nearest nodes and
//! integrate polynomial times `e^{i w z}` exactly. The rule is exact for
//! piecewise-cubic data at any frequency and fourth-order accurate in the
//! local spacing otherwise.

use num_complex::Complex64 as C64;

/// `∫_0^1 t^p e^{s t} dt` for p = 0..3, stable for small `|s|`.
fn phi(p: u32, s: C64) -> C64 {
    if s.norm() < 0.4 {
        // sum_k s^k / (k! (k + p + 1))
        let mut acc = C64::new(1.0 / (p as f64 + 1.0), 0.0);
        let mut term = C64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 1..16 {
            term *= s;
            fact *= k as f64;
            acc += term / (fact * (k as f64 + p as f64 + 1.0));
        }
        acc
    } else {
        let es = s.exp();
        let s2 = s * s;
        match p {
            0 => (es - 1.0) / s,
            1 => (es * (s - 1.0) + 1.0) / s2,
            2 => (es * (s2 - 2.0 * s + 2.0) - 2.0) / (s2 * s),
            3 => (es * (s2 * s - 3.0 * s2 + 6.0 * s - 6.0) + 6.0) / (s2 * s2),
            _ => unreachable!(),
        }
    }
}

/// Moments `M_p = ∫_a^b (z-a)^p e^{i w z} dz`, p = 0..3.
fn moments(a: f64, b: f64, w: f64) -> [C64; 4] {
    let width = b - a;
    let s = C64::new(0.0, w * width);
    let ea = C64::from_polar(1.0, w * a);
    let mut m = [C64::new(0.0, 0.0); 4];
    let mut pw = width;
    for (p, mp) in m.iter_mut().enumerate() {
        *mp = ea * pw * phi(p as u32, s);
        pw *= width;
    }
    m
}

/// Monomial coefficients (about `origin`) of the cubic through four nodes.
fn cubic_coeffs(zs: &[f64; 4], fs: &[C64; 4], origin: f64) -> [C64; 4] {
    // Newton divided differences, then shift to the requested origin.
    let u: Vec<f64> = zs.iter().map(|&z| z - origin).collect();
    let mut dd = *fs;
    for level in 1..4 {
        for i in (level..4).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (u[i] - u[i - level]);
        }
    }
    // expand newton form dd0 + dd1 (v-u0) + dd2 (v-u0)(v-u1) + dd3 (...)(v-u2)
    let mut c = [C64::new(0.0, 0.0); 4];
    c[0] = dd[3];
    for k in (0..3).rev() {
        // multiply c by (v - u_k) and add dd[k]
        let mut nc = [C64::new(0.0, 0.0); 4];
        for p in (0..3).rev() {
            nc[p + 1] += c[p];
        }
        for p in 0..4 {
            nc[p] -= c[p] * u[k];
        }
        nc[0] += dd[k];
        c = nc;
    }
    c
}

/// `∫ f(z) e^{i w z} dz` over the span of `nodes` by sliding-cubic product
/// integration.
pub fn filon_integral(nodes: &[f64], values: &[C64], w: f64) -> C64 {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    if n < 2 {
        return C64::new(0.0, 0.0);
    }
    if n < 4 {
        // linear product rule fallback
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n - 1 {
            let m = moments(nodes[i], nodes[i + 1], w);
            let width = nodes[i + 1] - nodes[i];
            let slope = (values[i + 1] - values[i]) / width;
            acc += values[i] * m[0] + slope * m[1];
        }
        return acc;
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n - 1 {
        let s = i.saturating_sub(1).min(n - 4);
        let zs = [nodes[s], nodes[s + 1], nodes[s + 2], nodes[s + 3]];
        let fs = [values[s], values[s + 1], values[s + 2], values[s + 3]];
        let c = cubic_coeffs(&zs, &fs, nodes[i]);
        let m = moments(nodes[i], nodes[i + 1], w);
        acc += c[0] * m[0] + c[1] * m[1] + c[2] * m[2] + c[3] * m[3];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn composite_nodes() -> Vec<f64> {
        // the solver's grid shape: uniform outer, geometric inner with the
        // gap capped at half the outer spacing, central gap at z = 0
        let d_out = 0.123;
        let mut pos: Vec<f64> = vec![];
        let mut z: f64 = 1.0;
        while z > 1.05e-3 {
            let gap = (z * (1.0 - 1.0 / 1.3)).min(0.5 * d_out);
            z -= gap;
            pos.push(z.max(1e-3));
        }
        pos.reverse();
        let mut outer: Vec<f64> = (0..520).map(|i| 1.0 + i as f64 * d_out).collect();
        pos.append(&mut outer);
        let mut all: Vec<f64> = pos.iter().rev().map(|&v| -v).collect();
        all.extend(pos.iter());
        all
    }

    #[test]
    fn gaussian_oscillatory_closed_form() {
        // ∫ e^{-z^2} e^{iwz} dz = sqrt(pi) e^{-w^2/4}
        let nodes = composite_nodes();
        for &w in &[0.0, 1.0, 7.0, 40.0] {
            let vals: Vec<C64> = nodes.iter().map(|&z| C64::new((-z * z).exp(), 0.0)).collect();
            let got = filon_integral(&nodes, &vals, w);
            let exact = std::f64::consts::PI.sqrt() * (-w * w / 4.0).exp();
            assert!(
                (got - C64::new(exact, 0.0)).norm() < 2e-5,
                "w={w}: got {got}, want {exact:.3e}"
            );
        }
    }

    #[test]
    fn lorentzian_large_frequency() {
        // ∫ e^{iwz}/(1+z^2) dz = pi e^{-|w|} up to the O(1/(w L^2)) tail
        // beyond the truncation
        let nodes: Vec<f64> = (0..40_000)
            .map(|i| -1000.0 + 0.05 * i as f64 + 0.025)
            .collect();
        let vals: Vec<C64> = nodes.iter().map(|&z| C64::new(1.0 / (1.0 + z * z), 0.0)).collect();
        for &w in &[3.0f64, 25.0] {
            let got = filon_integral(&nodes, &vals, w);
            let exact = std::f64::consts::PI * (-w.abs()).exp();
            assert!(
                (got - C64::new(exact, 0.0)).norm() < 1e-5,
                "w={w}: got {got}, want {exact:.3e}"
            );
        }
    }

    #[test]
    fn exact_for_cubics() {
        let nodes: Vec<f64> = vec![-2.0, -1.3, -0.9, -0.1, 0.4, 1.1, 1.9, 2.5];
        let f = |z: f64| C64::new(z * z * z - z, 2.0 * z * z);
        let vals: Vec<C64> = nodes.iter().map(|&z| f(z)).collect();
        let w = 5.3;
        let got = filon_integral(&nodes, &vals, w);
        // reference by ultra-fine trapezoid of the cubic
        let nf = 2_000_000usize;
        let h = 4.5 / nf as f64;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=nf {
            let z = -2.0 + h * j as f64;
            let wt = if j == 0 || j == nf { 0.5 } else { 1.0 };
            acc += f(z) * C64::from_polar(1.0, w * z) * wt;
        }
        acc *= h;
        assert!((got - acc).norm() < 1e-8, "cubic exactness defect {}", (got - acc).norm());
    }
}
