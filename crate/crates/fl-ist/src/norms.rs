//! Discrete norms of field data: Lebesgue, weighted, and the Sobolev
//! combination `H^3 ∩ H^{2,1}` the well-posedness theory lives in.

use num_complex::Complex64 as C64;

use crate::field::{spectral_derivative, Field};

/// Norm report for a field (all trapezoidal on the uniform grid).
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub l1: f64,
    pub l2: f64,
    pub l21: f64,
    pub l2_d1: f64,
    pub l3_d1: f64,
    pub l1_d2: f64,
    /// sqrt( sum_{j<=3} ||d^j u||_2^2  +  sum_{j<=2} ||<x> d^j u||_2^2 )
    pub h3_h21: f64,
}

fn trapz_weights(n: usize, h: f64) -> impl Fn(usize) -> f64 {
    move |i| if i == 0 || i + 1 == n { 0.5 * h } else { h }
}

fn lp(values: &[C64], h: f64, p: f64) -> f64 {
    let w = trapz_weights(values.len(), h);
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm().powf(p) * w(i))
        .sum::<f64>()
        .powf(1.0 / p)
}

fn weighted_l2(values: &[C64], xs: &[f64], h: f64) -> f64 {
    let w = trapz_weights(values.len(), h);
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm_sqr() * (1.0 + xs[i] * xs[i]) * w(i))
        .sum::<f64>()
        .sqrt()
}

/// All norms the admissibility and stability analyses consume.
pub fn discrete_norms(field: &Field) -> NormReport {
    let h = field.grid.spacing();
    let xs = field.grid.nodes();
    let d3 = field.d3();
    let l2s: Vec<f64> = [&field.values, &field.d1, &field.d2, &d3]
        .iter()
        .map(|v| lp(v, h, 2.0))
        .collect();
    let w2s: Vec<f64> = [&field.values, &field.d1, &field.d2]
        .iter()
        .map(|v| weighted_l2(v, &xs, h))
        .collect();
    let h3_h21 = (l2s.iter().map(|v| v * v).sum::<f64>()
        + w2s.iter().map(|v| v * v).sum::<f64>())
    .sqrt();
    NormReport {
        l1: lp(&field.values, h, 1.0),
        l2: l2s[0],
        l21: weighted_l2(&field.values, &xs, h),
        l2_d1: l2s[1],
        l3_d1: lp(&field.d1, h, 3.0),
        l1_d2: lp(&field.d2, h, 1.0),
        h3_h21,
    }
}

/// `H^3 ∩ H^{2,1}` distance between two fields on the same grid.
pub fn sobolev_distance(a: &Field, b: &Field) -> f64 {
    assert_eq!(a.grid, b.grid);
    let diff: Vec<C64> = a
        .values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| x - y)
        .collect();
    let h = a.grid.spacing();
    let xs = a.grid.nodes();
    let mut acc = 0.0;
    for order in 0..=3u32 {
        let d = spectral_derivative(&a.grid, &diff, order);
        let n2 = lp(&d, h, 2.0);
        acc += n2 * n2;
        if order <= 2 {
            let w2 = weighted_l2(&d, &xs, h);
            acc += w2 * w2;
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Profile;
    use crate::grid::RealGrid;

    #[test]
    fn zero_field_has_zero_norms() {
        let grid = RealGrid::new(-20.0, 20.0, 256).unwrap();
        let r = discrete_norms(&Field::zero(grid));
        assert_eq!(r.l1, 0.0);
        assert_eq!(r.h3_h21, 0.0);
    }

    #[test]
    fn gaussian_l1_is_sqrt_pi() {
        let grid = RealGrid::new(-20.0, 20.0, 2048).unwrap();
        let f = Field::from_profile(
            grid,
            &Profile::Gaussian {
                amplitude: 1.0,
                width: 1.0,
                center: 0.0,
            },
        )
        .unwrap();
        let r = discrete_norms(&f);
        assert!((r.l1 - std::f64::consts::PI.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn norms_are_homogeneous() {
        let grid = RealGrid::new(-20.0, 20.0, 512).unwrap();
        let f = Field::from_profile(
            grid.clone(),
            &Profile::Sech {
                amplitude: 0.4,
                width: 1.3,
                center: 0.5,
            },
        )
        .unwrap();
        let doubled =
            Field::from_values(grid, f.values.iter().map(|v| v * 2.0).collect()).unwrap();
        let r1 = discrete_norms(&f);
        let r2 = discrete_norms(&doubled);
        assert!((r2.l1 - 2.0 * r1.l1).abs() < 1e-12);
        assert!((r2.l2 - 2.0 * r1.l2).abs() < 1e-12);
        assert!((r2.l3_d1 - 2.0 * r1.l3_d1).abs() < 1e-12);
        assert!((r2.l1_d2 - 2.0 * r1.l1_d2).abs() < 1e-12);
    }
}
