//! Small dense complex linear algebra: LU with partial pivoting, GMRES, and
//! extreme-singular-value estimates. Sizes here top out around a few
//! thousand, so a straightforward implementation is adequate.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone)]
pub struct Dense {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<C64>,
}

impl Dense {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![C64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn matvec(&self, v: &[C64], out: &mut [C64]) {
        assert_eq!(v.len(), self.n_cols);
        assert_eq!(out.len(), self.n_rows);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            *o = acc;
        }
    }

    /// Conjugate-transpose apply.
    pub fn matvec_adj(&self, v: &[C64], out: &mut [C64]) {
        assert_eq!(v.len(), self.n_rows);
        assert_eq!(out.len(), self.n_cols);
        out.fill(C64::new(0.0, 0.0));
        for i in 0..self.n_rows {
            let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
            let vi = v[i];
            for (o, a) in out.iter_mut().zip(row.iter()) {
                *o += a.conj() * vi;
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Dense {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Dense {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// LU factorization with partial pivoting.
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl Lu {
    pub fn factor(m: &Dense) -> Result<Self> {
        assert_eq!(m.n_rows, m.n_cols);
        let n = m.n_rows;
        let mut lu = m.data.clone();
        let mut piv = Vec::with_capacity(n);
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Solver {
                    msg: format!("singular matrix at elimination step {k}"),
                    sigma_min: 0.0,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            piv.push(p);
            min_pivot = min_pivot.min(best);
            max_pivot = max_pivot.max(best);
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f.norm_sqr() != 0.0 {
                    let (head, tail) = lu.split_at_mut(i * n);
                    let krow = &head[k * n + k + 1..k * n + n];
                    let irow = &mut tail[k + 1..n];
                    for (iv, kv) in irow.iter_mut().zip(krow.iter()) {
                        *iv -= f * kv;
                    }
                }
            }
        }
        Ok(Self {
            n,
            lu,
            piv,
            min_pivot,
            max_pivot,
        })
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            if bk.norm_sqr() != 0.0 {
                for i in k + 1..n {
                    let f = self.lu[i * n + k];
                    b[i] -= f * bk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = b[k];
            for j in k + 1..n {
                acc -= self.lu[k * n + j] * b[j];
            }
            b[k] = acc / self.lu[k * n + k];
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

fn nrm2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Un-restarted GMRES on a matrix-free operator. Returns the solution and
/// the final relative residual.
pub fn gmres<F>(apply: F, b: &[C64], tol: f64, max_iter: usize) -> (Vec<C64>, f64)
where
    F: Fn(&[C64], &mut [C64]),
{
    let n = b.len();
    let bnorm = nrm2(b).max(1e-300);
    let mut basis: Vec<Vec<C64>> = vec![b.iter().map(|v| v / bnorm).collect()];
    let m = max_iter.min(n);
    let mut h = vec![vec![C64::new(0.0, 0.0); m]; m + 1];
    let mut cs = vec![C64::new(0.0, 0.0); m];
    let mut sn = vec![C64::new(0.0, 0.0); m];
    let mut g = vec![C64::new(0.0, 0.0); m + 1];
    g[0] = C64::new(bnorm, 0.0);
    let mut k_used = 0;
    let mut res = 1.0;
    let mut w = vec![C64::new(0.0, 0.0); n];
    for k in 0..m {
        apply(&basis[k], &mut w);
        // modified Gram-Schmidt
        for (j, q) in basis.iter().enumerate() {
            let hjk = dot_conj(q, &w);
            h[j][k] = hjk;
            for (wi, qi) in w.iter_mut().zip(q.iter()) {
                *wi -= hjk * qi;
            }
        }
        let hk1 = nrm2(&w);
        h[k + 1][k] = C64::new(hk1, 0.0);
        // apply stored rotations
        for j in 0..k {
            let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
            h[j + 1][k] = -sn[j].conj() * h[j][k] + cs[j].conj() * h[j + 1][k];
            h[j][k] = t;
        }
        // new rotation annihilating h[k+1][k]
        let (a, bb) = (h[k][k], h[k + 1][k]);
        let r = (a.norm_sqr() + bb.norm_sqr()).sqrt();
        if r == 0.0 {
            k_used = k;
            break;
        }
        cs[k] = a.conj() / r;
        sn[k] = bb.conj() / r;
        h[k][k] = C64::new(r, 0.0);
        h[k + 1][k] = C64::new(0.0, 0.0);
        g[k + 1] = -sn[k].conj() * g[k];
        g[k] = cs[k] * g[k];
        k_used = k + 1;
        res = g[k + 1].norm() / bnorm;
        if res < tol {
            break;
        }
        if hk1 > 0.0 {
            basis.push(w.iter().map(|v| v / hk1).collect());
        } else {
            break;
        }
    }
    // back substitution
    let mut y = vec![C64::new(0.0, 0.0); k_used];
    for i in (0..k_used).rev() {
        let mut acc = g[i];
        for j in i + 1..k_used {
            acc -= h[i][j] * y[j];
        }
        y[i] = acc / h[i][i];
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (j, yj) in y.iter().enumerate() {
        for (xi, qi) in x.iter_mut().zip(basis[j].iter()) {
            *xi += yj * qi;
        }
    }
    (x, res)
}

/// Largest singular value of an operator by power iteration on `A^H A`.
pub fn sigma_max<F, G>(apply: F, apply_adj: G, n: usize, iters: usize) -> f64
where
    F: Fn(&[C64], &mut [C64]),
    G: Fn(&[C64], &mut [C64]),
{
    let mut v: Vec<C64> = (0..n)
        .map(|i| {
            let t = (i as f64 * 0.7321 + 0.313).sin();
            C64::new(t, (i as f64 * 1.177).cos() * 0.3)
        })
        .collect();
    let nv = nrm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut av = vec![C64::new(0.0, 0.0); n];
    let mut s = 0.0;
    for _ in 0..iters {
        apply(&v, &mut av);
        s = nrm2(&av);
        let mut w = vec![C64::new(0.0, 0.0); n];
        apply_adj(&av, &mut w);
        let nw = nrm2(&w).max(1e-300);
        for (vi, wi) in v.iter_mut().zip(w.iter()) {
            *vi = wi / nw;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> Dense {
        // well-conditioned: small pseudo-random off-diagonals, strong diagonal
        let mut m = Dense::zeros(n, n);
        let s = 1.0 / n as f64;
        for i in 0..n {
            for j in 0..n {
                let v = ((i * 7 + j * 3) % 11) as f64 / 11.0;
                let w = ((i * 5 + j * 13) % 17) as f64 / 17.0;
                m[(i, j)] = C64::new(v - 0.3, w - 0.4) * s;
            }
            m[(i, i)] += C64::new(3.0, 0.5);
        }
        m
    }

    #[test]
    fn lu_solves_dense_system() {
        let n = 40;
        let m = test_matrix(n);
        let x_true: Vec<C64> = (0..n).map(|i| C64::new(i as f64 * 0.1, -(i as f64) * 0.05)).collect();
        let mut b = vec![C64::new(0.0, 0.0); n];
        m.matvec(&x_true, &mut b);
        let lu = Lu::factor(&m).unwrap();
        let x = lu.solve(&b);
        let err: f64 = x
            .iter()
            .zip(x_true.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "LU error {err:.3e}");
    }

    #[test]
    fn gmres_matches_lu() {
        let n = 60;
        let m = test_matrix(n);
        let b: Vec<C64> = (0..n).map(|i| C64::new((i as f64 * 0.13).sin(), 0.2)).collect();
        let lu = Lu::factor(&m).unwrap();
        let x_direct = lu.solve(&b);
        let (x_gm, res) = gmres(|v, out| m.matvec(v, out), &b, 1e-12, 200);
        assert!(res < 1e-10);
        let err: f64 = x_gm
            .iter()
            .zip(x_direct.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "gmres vs lu {err:.3e}");
    }

    #[test]
    fn sigma_max_of_diagonal() {
        let n = 16;
        let mut m = Dense::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0 + i as f64, 0.0);
        }
        let s = sigma_max(
            |v, o| m.matvec(v, o),
            |v, o| m.matvec_adj(v, o),
            n,
            60,
        );
        assert!((s - n as f64).abs() < 1e-6);
    }
}
