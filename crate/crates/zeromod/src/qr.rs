//! Householder QR, orthonormalization and unitary basis completion.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{cr, Matrix};

/// Householder reflectors of `a` stored as unit vectors, plus the triangular
/// factor. `full_q()` materializes the square unitary factor.
struct Reflectors {
    vs: Vec<Vec<Complex64>>,
    r: Matrix,
    rows: usize,
}

fn householder(a: &Matrix) -> Reflectors {
    let m = a.rows();
    let n = a.cols();
    let mut r = a.clone();
    let mut vs = Vec::new();
    for k in 0..n.min(m) {
        let mut v: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            vs.push(vec![Complex64::new(0.0, 0.0); m - k]);
            continue;
        }
        let phase = if v[0].norm() > 0.0 { v[0] / cr(v[0].norm()) } else { cr(1.0) };
        let alpha = -phase * cr(norm);
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            for z in v.iter_mut() {
                *z /= cr(vnorm);
            }
            // Apply I - 2 v v^H to the trailing block of r.
            for j in k..n {
                let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * r[(i, j)]).sum();
                for i in k..m {
                    r[(i, j)] -= cr(2.0) * v[i - k] * dot;
                }
            }
        }
        vs.push(v);
    }
    for i in 0..m {
        for j in 0..n.min(i) {
            r[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Reflectors { vs, r, rows: m }
}

impl Reflectors {
    fn full_q(&self) -> Matrix {
        let m = self.rows;
        let mut q = Matrix::identity(m);
        for (k, v) in self.vs.iter().enumerate().rev() {
            if v.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            for j in 0..m {
                let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * q[(i, j)]).sum();
                for i in k..m {
                    q[(i, j)] -= cr(2.0) * v[i - k] * dot;
                }
            }
        }
        q
    }
}

/// Multiply each column by a unit phase making its largest-modulus entry
/// (first such, scanning down) real and positive. Returns the diagonal of
/// applied phases so factors can be carried along. Keeps orthonormality and
/// spans; pins the sign freedom of every computed basis.
pub fn phase_normalize_columns(m: &mut Matrix) -> Vec<Complex64> {
    let mut phases = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for i in 0..m.rows() {
            let mag = m[(i, j)].norm();
            if mag > best_mag + 1e-14 * best_mag.max(1.0) {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag == 0.0 {
            phases.push(cr(1.0));
            continue;
        }
        let pivot = m[(best, j)];
        let phase = pivot.conj() / cr(pivot.norm());
        for i in 0..m.rows() {
            let v = m[(i, j)] * phase;
            m[(i, j)] = v;
        }
        phases.push(phase);
    }
    phases
}

/// Thin QR `a = q r` with `q` of shape rows x min(rows, cols).
pub fn qr_thin(a: &Matrix) -> (Matrix, Matrix) {
    let m = a.rows();
    let n = a.cols();
    let k = m.min(n);
    let h = householder(a);
    let q = h.full_q().block(0, 0, m, k);
    let r = h.r.block(0, 0, k, n);
    (q, r)
}

/// Orthonormalize the (full-column-rank) matrix `m = q t` with `t` square
/// invertible. Fails when a column is numerically dependent.
pub fn orthonormalize(m: &Matrix, rank_tol: f64) -> Result<(Matrix, Matrix)> {
    let (mut q, mut r) = qr_thin(m);
    if m.cols() > m.rows() {
        return Err(Error::DimensionMismatch(
            "cannot orthonormalize more columns than rows".into(),
        ));
    }
    let scale = m.norm_fro().max(1.0);
    for i in 0..r.rows() {
        if r[(i, i)].norm() <= rank_tol * scale {
            return Err(Error::DimensionMismatch(format!(
                "column {i} numerically dependent during orthonormalization"
            )));
        }
    }
    // Pin column phases: m = (q phi)(phi^H r).
    let phases = phase_normalize_columns(&mut q);
    for (i, phase) in phases.iter().enumerate() {
        for j in 0..r.cols() {
            let v = r[(i, j)] * phase.conj();
            r[(i, j)] = v;
        }
    }
    Ok((q, r))
}

/// Extend a matrix with orthonormal columns (n x k) to a full unitary basis,
/// returning the n x (n-k) complement block. Deterministic: Householder
/// reflectors of the input applied to trailing identity columns.
pub fn unitary_completion(q0: &Matrix) -> Matrix {
    let n = q0.rows();
    let k = q0.cols();
    assert!(k <= n, "completion of an overfull basis");
    if k == 0 {
        return Matrix::identity(n);
    }
    let h = householder(q0);
    let mut comp = h.full_q().block(0, k, n, n - k);
    phase_normalize_columns(&mut comp);
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn qr_reconstructs() {
        let a = Matrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(0.0, -1.0), c(1.0, 0.5)],
            vec![c(3.0, 0.0), c(0.0, 0.0)],
        ]);
        let (q, r) = qr_thin(&a);
        assert!((&(&q * &r) - &a).norm_fro() < 1e-12);
        assert!((&(&q.adjoint() * &q) - &Matrix::identity(2)).norm_fro() < 1e-12);
    }

    #[test]
    fn completion_is_unitary() {
        let b = Matrix::from_real(&[vec![0.0], vec![1.0]]);
        let l = unitary_completion(&b);
        assert_eq!((l.rows(), l.cols()), (2, 1));
        let full = Matrix::hstack(&[&b, &l]);
        assert!((&(&full.adjoint() * &full) - &Matrix::identity(2)).norm_fro() < 1e-12);
    }

    #[test]
    fn completion_of_empty_is_identity() {
        let l = unitary_completion(&Matrix::zeros(3, 0));
        assert_eq!((&l - &Matrix::identity(3)).norm_fro(), 0.0);
    }
}
