//! Complex Schur decomposition by Hessenberg reduction and shifted QR
//! iteration, with eigenvalue reordering for invariant-subspace selection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{cr, Matrix};

/// `a = q t q^H` with `q` unitary and `t` upper triangular.
pub struct Schur {
    pub q: Matrix,
    pub t: Matrix,
}

/// Eigenvalue class selected by [`ordered_schur`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurSelect {
    /// Strictly negative real part first.
    Stable,
    /// Strictly positive real part first.
    Unstable,
}

/// Complex Givens pair: the unitary [[c, conj(s)], [-s, c]] with real c.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: Complex64,
}

fn givens(a: Complex64, b: Complex64) -> Givens {
    let bn = b.norm();
    if bn == 0.0 {
        return Givens { c: 1.0, s: Complex64::new(0.0, 0.0) };
    }
    let an = a.norm();
    let r = (an * an + bn * bn).sqrt();
    if an == 0.0 {
        return Givens { c: 0.0, s: b / cr(bn) };
    }
    Givens {
        c: an / r,
        s: b * a.conj() / cr(an * r),
    }
}

/// Rows i and i+1 of `m` over column range `cols`.
fn rot_rows(m: &mut Matrix, g: Givens, i: usize, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = m[(i, j)];
        let y = m[(i + 1, j)];
        m[(i, j)] = cr(g.c) * x + g.s.conj() * y;
        m[(i + 1, j)] = -g.s * x + cr(g.c) * y;
    }
}

/// Columns j and j+1 of `m` over row range `rows` (the adjoint rotation).
fn rot_cols(m: &mut Matrix, g: Givens, j: usize, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = m[(i, j)];
        let y = m[(i, j + 1)];
        m[(i, j)] = cr(g.c) * x + g.s * y;
        m[(i, j + 1)] = -g.s.conj() * x + cr(g.c) * y;
    }
}

fn hessenberg(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        for i in (k + 2..n).rev() {
            if h[(i, k)].norm() == 0.0 {
                continue;
            }
            let g = givens(h[(i - 1, k)], h[(i, k)]);
            rot_rows(&mut h, g, i - 1, k..n);
            h[(i, k)] = Complex64::new(0.0, 0.0);
            rot_cols(&mut h, g, i - 1, 0..n);
            rot_cols(&mut q, g, i - 1, 0..n);
        }
    }
    (q, h)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c2: Complex64, d: Complex64) -> Complex64 {
    // Eigenvalue of [[a, b], [c2, d]] closest to d.
    let tr2 = (a + d) * cr(0.5);
    let det = a * d - b * c2;
    let disc = (tr2 * tr2 - det).sqrt();
    let e1 = tr2 + disc;
    let e2 = tr2 - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Complex Schur form. Converges for any finite matrix at these sizes; a
/// failure to deflate within the iteration cap is reported as an error.
pub fn schur(a: &Matrix) -> Result<Schur> {
    assert!(a.is_square(), "schur needs a square matrix");
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Schur { q: Matrix::zeros(0, 0), t: Matrix::zeros(0, 0) });
    }
    let (mut q, mut t) = hessenberg(a);
    let norm = t.norm_fro().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;

    let mut hi = n - 1;
    let mut stall = 0usize;
    let max_stall = 40 * n + 100;
    loop {
        // Deflate converged subdiagonal entries at the active corner.
        while hi > 0 {
            let s = t[(hi - 1, hi - 1)].norm() + t[(hi, hi)].norm();
            let s = if s == 0.0 { norm } else { s };
            if t[(hi, hi - 1)].norm() <= eps * s {
                t[(hi, hi - 1)] = Complex64::new(0.0, 0.0);
                hi -= 1;
                stall = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            break;
        }
        // Active block [lo..=hi].
        let mut lo = hi;
        while lo > 0 {
            let s = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            let s = if s == 0.0 { norm } else { s };
            if t[(lo, lo - 1)].norm() <= eps * s {
                t[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        stall += 1;
        if stall > max_stall {
            return Err(Error::NoConvergence(format!(
                "QR iteration stalled on block [{lo}, {hi}]"
            )));
        }
        let mu = if stall % 30 == 0 {
            // Exceptional shift to break symmetric cycling.
            t[(hi, hi)] + cr(1.5) * t[(hi, hi - 1)]
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };
        // Explicit shifted QR sweep on the Hessenberg block.
        for i in lo..=hi {
            t[(i, i)] -= mu;
        }
        let mut gs = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = givens(t[(k, k)], t[(k + 1, k)]);
            rot_rows(&mut t, g, k, k..n);
            t[(k + 1, k)] = Complex64::new(0.0, 0.0);
            gs.push(g);
        }
        for (k, g) in (lo..hi).zip(gs) {
            rot_cols(&mut t, g, k, 0..(k + 2).min(n));
            rot_cols(&mut q, g, k, 0..n);
        }
        for i in lo..=hi {
            t[(i, i)] += mu;
        }
    }
    // Clean the strictly lower part.
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(Schur { q, t })
}

/// Swap the diagonal entries at (k, k) and (k+1, k+1) of the triangular
/// factor by a unitary similarity, updating q alongside.
fn swap_adjacent(q: &mut Matrix, t: &mut Matrix, k: usize) {
    let n = t.rows();
    let l1 = t[(k, k)];
    let l2 = t[(k + 1, k + 1)];
    let t12 = t[(k, k + 1)];
    // Eigenvector of [[l1, t12], [0, l2]] for l2 is [t12, l2 - l1].
    let v1 = t12;
    let v2 = l2 - l1;
    if v2.norm() == 0.0 {
        return; // equal eigenvalues: order is immaterial
    }
    let g = givens(v1, v2);
    rot_rows(t, g, k, 0..n);
    rot_cols(t, g, k, 0..n);
    rot_cols(q, g, k, 0..n);
    t[(k + 1, k)] = Complex64::new(0.0, 0.0);
    t[(k, k)] = l2;
    t[(k + 1, k + 1)] = l1;
}

/// Schur form with the eigenvalues satisfying `select` moved to the leading
/// block. Returns the decomposition and the number of selected eigenvalues.
pub fn ordered_schur_by(a: &Matrix, select: impl Fn(Complex64) -> bool) -> Result<(Schur, usize)> {
    let mut s = schur(a)?;
    let n = a.rows();
    let mut picked: Vec<bool> = (0..n).map(|i| select(s.t[(i, i)])).collect();
    let mut target = 0usize;
    for i in 0..n {
        if !picked[i] {
            continue;
        }
        for j in (target..i).rev() {
            swap_adjacent(&mut s.q, &mut s.t, j);
            picked.swap(j, j + 1);
        }
        target += 1;
    }
    Ok((s, target))
}

pub fn ordered_schur(a: &Matrix, select: SchurSelect) -> Result<(Schur, usize)> {
    match select {
        SchurSelect::Stable => ordered_schur_by(a, |z| z.re < 0.0),
        SchurSelect::Unstable => ordered_schur_by(a, |z| z.re > 0.0),
    }
}

/// Eigenvalues in nonincreasing real-part order (ties by descending
/// imaginary part).
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>> {
    let s = schur(a)?;
    let mut ev: Vec<Complex64> = (0..a.rows()).map(|i| s.t[(i, i)]).collect();
    ev.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap()
            .then(y.im.partial_cmp(&x.im).unwrap())
    });
    Ok(ev)
}
