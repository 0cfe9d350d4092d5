//! Dense complex matrices in row-major storage.
//!
//! Everything downstream (subspaces, solvers, realizations) is built on this
//! type. Sizes are desk scale (n up to a few tens), so the implementations
//! favour clarity and numerical robustness over blocking or parallelism.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Numerical thresholds used throughout the pipeline.
///
/// `rank_tol` is relative to the largest singular value of the matrix being
/// examined; `residual_tol` is an absolute bound scaled by operand norms in
/// each equation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rank_tol: f64,
    pub residual_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_tol: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_tol: f64, residual_tol: f64) -> Self {
        assert!(
            rank_tol > 0.0 && residual_tol > 0.0,
            "tolerances must be strictly positive"
        );
        Tolerance {
            rank_tol,
            residual_tol,
        }
    }
}

/// Dense complex matrix, row-major. Zero rows or columns are legal; a 0x0
/// matrix stands for the empty operator that appears in degenerate cases
/// (constant transfer functions, empty kernels).
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(1.0);
        }
        m
    }

    pub fn scalar(z: Complex64) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        let complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| cr(x)).collect())
            .collect();
        Matrix::from_rows(&complex)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, z: Complex64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * z)
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.block(0, j, self.rows, 1)
    }

    pub fn row(&self, i: usize) -> Matrix {
        self.block(i, 0, 1, self.cols)
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Matrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, m: &Matrix) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "block out of range");
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(r0 + i, c0 + j)] = m[(i, j)];
            }
        }
    }

    /// Horizontal concatenation. All blocks must agree on row count; a call
    /// with an empty list yields a 0x0 matrix.
    pub fn hstack(blocks: &[&Matrix]) -> Matrix {
        if blocks.is_empty() {
            return Matrix::zeros(0, 0);
        }
        let rows = blocks[0].rows;
        assert!(blocks.iter().all(|b| b.rows == rows), "hstack row mismatch");
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            m.set_block(0, at, b);
            at += b.cols;
        }
        m
    }

    pub fn vstack(blocks: &[&Matrix]) -> Matrix {
        if blocks.is_empty() {
            return Matrix::zeros(0, 0);
        }
        let cols = blocks[0].cols;
        assert!(blocks.iter().all(|b| b.cols == cols), "vstack col mismatch");
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut m = Matrix::zeros(rows, cols);
        let mut at = 0;
        for b in blocks {
            m.set_block(at, 0, b);
            at += b.rows;
        }
        m
    }

    /// Scale rows towards unit 2-norm. The exact null space is unchanged;
    /// the numerical rank reveal stops being dominated by rows of wildly
    /// different magnitude. Rows more than twelve orders below the largest
    /// are left alone: blowing up roundoff-level rows would manufacture
    /// constraints out of noise.
    pub fn equilibrate_rows(&self) -> Matrix {
        self.scale_rows(&self.row_scaling_factors())
    }

    pub fn row_scaling_factors(&self) -> Vec<f64> {
        let norms: Vec<f64> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let global = norms.iter().copied().fold(0.0, f64::max);
        norms
            .iter()
            .map(|&n| if n > global * 1e-12 { 1.0 / n } else { 1.0 })
            .collect()
    }

    pub fn scale_rows(&self, factors: &[f64]) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = out[(i, j)] * cr(factors[i]);
                out[(i, j)] = v;
            }
        }
        out
    }

    /// `rhs - self * x` with compensated (fma-based) accumulation: the
    /// products are split error-free, so the result resolves residuals far
    /// below `eps * |self| * |x|`. Iterative refinement of consistent
    /// systems with large solutions depends on this.
    pub fn mul_sub_compensated(&self, x: &Matrix, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, x.rows());
        assert_eq!((self.rows, x.cols()), (rhs.rows(), rhs.cols()));
        let mut out = Matrix::zeros(self.rows, x.cols());
        for i in 0..self.rows {
            for j in 0..x.cols() {
                let mut sum_re = Accumulator::new(rhs[(i, j)].re);
                let mut sum_im = Accumulator::new(rhs[(i, j)].im);
                for k in 0..self.cols {
                    let a = self[(i, k)];
                    let b = x[(k, j)];
                    // rhs - a*b accumulated componentwise.
                    sum_re.add_product(-a.re, b.re);
                    sum_re.add_product(a.im, b.im);
                    sum_im.add_product(-a.re, b.im);
                    sum_im.add_product(-a.im, b.re);
                }
                out[(i, j)] = Complex64::new(sum_re.value(), sum_im.value());
            }
        }
        out
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.norm_fro().max(1.0);
        (self - &self.adjoint()).norm_fro() <= tol * scale
    }

    /// Solve `self * x = rhs` for square `self` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        assert!(self.is_square(), "solve needs a square matrix");
        assert_eq!(self.rows, rhs.rows, "solve rhs row mismatch");
        let n = self.rows;
        if n == 0 {
            return Ok(Matrix::zeros(0, rhs.cols));
        }
        let mut lu = self.clone();
        let mut x = rhs.clone();
        let scale = self.norm_max().max(1.0);
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best <= f64::EPSILON * scale * (n as f64) {
                return Err(Error::NoStabilizingSolution(format!(
                    "singular linear system (pivot {best:.3e})"
                )));
            }
            if piv != k {
                for j in 0..n {
                    self_swap(&mut lu, (k, j), (piv, j));
                }
                for j in 0..x.cols {
                    self_swap(&mut x, (k, j), (piv, j));
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] -= f * v;
                }
                for j in 0..x.cols {
                    let v = x[(k, j)];
                    x[(i, j)] -= f * v;
                }
            }
        }
        for j in 0..x.cols {
            for ii in (0..n).rev() {
                let mut s = x[(ii, j)];
                for k in ii + 1..n {
                    s -= lu[(ii, k)] * x[(k, j)];
                }
                x[(ii, j)] = s / lu[(ii, ii)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.rows))
    }
}

/// Neumaier-compensated sum with error-free products through fma.
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn new(init: f64) -> Self {
        Accumulator { sum: init, comp: 0.0 }
    }

    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let err = f64::mul_add(a, b, -p);
        self.add(p);
        self.add(err);
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn self_swap(m: &mut Matrix, a: (usize, usize), b: (usize, usize)) {
    let t = m[a];
    m[a] = m[b];
    m[b] = t;
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| -self[(i, j)])
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                if z.im == 0.0 {
                    write!(f, "{:>12.6} ", z.re)?;
                } else {
                    write!(f, "{:>12.6}{:+.6}i ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
