//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! Columns of the working matrix are orthogonalized pairwise; the accumulated
//! rotations give V, the surviving columns give U and the singular values.
//! Jacobi converges to high relative accuracy, which is what the
//! rank-revealing subspace operations lean on.

use num_complex::Complex64;

use crate::matrix::{cr, Matrix};

/// Thin factorization `A = U diag(sigma) V^H` with `V` square (cols x cols),
/// `sigma` of length `cols` in nonincreasing order and `U` of shape
/// rows x cols. Columns of `U` past the rank are zero and must not be used.
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    /// Numerical rank at a relative threshold.
    pub fn rank(&self, rank_tol: f64) -> usize {
        let smax = self.sigma.first().copied().unwrap_or(0.0);
        if smax <= 0.0 {
            return 0;
        }
        self.sigma.iter().take_while(|&&s| s > rank_tol * smax).count()
    }
}

const MAX_SWEEPS: usize = 64;

pub fn svd(a: &Matrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    if n == 0 {
        return Svd {
            u: Matrix::zeros(m, 0),
            sigma: vec![],
            v: Matrix::zeros(0, 0),
        };
    }
    let mut w = a.clone();
    let mut v = Matrix::identity(n);

    let scale = w.norm_fro();
    if scale > 0.0 {
        let eps = f64::EPSILON * 0.5;
        // Columns whose squared norm falls below this are numerically zero;
        // rotating against them only churns denormals.
        let dead = (f64::EPSILON * scale).powi(2);
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let (app, aqq, apq) = gram(&w, p, q);
                    if app <= dead || aqq <= dead {
                        continue;
                    }
                    let off = apq.norm();
                    if off <= eps * (app * aqq).sqrt() {
                        continue;
                    }
                    rotated = true;
                    // Unitary 2x2 eliminating the off-diagonal Gram entry.
                    let phase = Complex64::new(apq.re / off, apq.im / off);
                    let tau = (aqq - app) / (2.0 * off);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = cs * t;
                    apply_rotation(&mut w, p, q, cs, sn, phase);
                    apply_rotation(&mut v, p, q, cs, sn, phase);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = Matrix::zeros(m, n);
    let mut vv = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let tiny = f64::EPSILON * scale.max(1.0);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        for i in 0..n {
            vv[(i, k)] = v[(i, j)];
        }
        if s > tiny {
            for i in 0..m {
                u[(i, k)] = w[(i, j)] / cr(s);
            }
        }
    }
    Svd { u, sigma, v: vv }
}

fn gram(w: &Matrix, p: usize, q: usize) -> (f64, f64, Complex64) {
    let m = w.rows();
    let mut app = 0.0;
    let mut aqq = 0.0;
    let mut apq = Complex64::new(0.0, 0.0);
    for i in 0..m {
        app += w[(i, p)].norm_sqr();
        aqq += w[(i, q)].norm_sqr();
        apq += w[(i, p)].conj() * w[(i, q)];
    }
    (app, aqq, apq)
}

/// Right-multiply columns (p, q) by the unitary
/// [[cs, sn], [-sn*conj(phase), cs*conj(phase)]], which folds the phase of
/// the Gram off-diagonal into column q and then rotates.
fn apply_rotation(m: &mut Matrix, p: usize, q: usize, cs: f64, sn: f64, phase: Complex64) {
    for i in 0..m.rows() {
        let xp = m[(i, p)];
        let xq = phase.conj() * m[(i, q)];
        m[(i, p)] = cr(cs) * xp - cr(sn) * xq;
        m[(i, q)] = cr(sn) * xp + cr(cs) * xq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn reconstruct(s: &Svd, n: usize) -> Matrix {
        let mut d = Matrix::zeros(n, n);
        for (i, &sv) in s.sigma.iter().enumerate() {
            d[(i, i)] = cr(sv);
        }
        &(&s.u * &d) * &s.v.adjoint()
    }

    #[test]
    fn svd_reconstructs_random_complex() {
        // Fixed small matrix with complex entries.
        let a = Matrix::from_rows(&[
            vec![c(1.0, 0.5), c(-2.0, 1.0), c(0.0, 0.0)],
            vec![c(0.5, -0.5), c(3.0, 0.0), c(1.0, 2.0)],
        ]);
        let s = svd(&a);
        let r = reconstruct(&s, 3);
        assert!((&r - &a).norm_fro() < 1e-12 * a.norm_fro());
        // V unitary.
        let vtv = &s.v.adjoint() * &s.v;
        assert!((&vtv - &Matrix::identity(3)).norm_fro() < 1e-12);
    }

    #[test]
    fn svd_rank_one() {
        let a = Matrix::from_real(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let s = svd(&a);
        assert_eq!(s.rank(1e-10), 1);
        assert!((s.sigma[0] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn svd_fat_matrix_kernel() {
        let a = Matrix::from_real(&[vec![1.0, 1.0]]);
        let s = svd(&a);
        assert_eq!(s.rank(1e-10), 1);
        // Second V column spans the kernel.
        let k = s.v.column(1);
        assert!((&a * &k).norm_fro() < 1e-12);
    }

    #[test]
    fn svd_zero_and_empty() {
        let z = svd(&Matrix::zeros(3, 2));
        assert_eq!(z.rank(1e-10), 0);
        let e = svd(&Matrix::zeros(0, 0));
        assert!(e.sigma.is_empty());
    }
}
