//! Dense matrices over the exact rationals: just enough linear algebra for
//! the oracle (products, exact Gaussian elimination, null spaces).

use num_traits::{One, Zero};

use crate::poly::Rat;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        RatMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| crate::poly::rat_int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn scale(&self, c: &Rat) -> RatMatrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (v, w) in out.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        out
    }

    /// Exact rank by Gaussian elimination (fresh working copy).
    pub fn rank(&self) -> usize {
        let mut w = self.clone();
        let mut rank = 0;
        for col in 0..w.cols {
            let Some(piv) = (rank..w.rows).find(|&i| !w[(i, col)].is_zero()) else {
                continue;
            };
            w.swap_rows(rank, piv);
            let lead = w[(rank, col)].clone();
            for i in 0..w.rows {
                if i != rank && !w[(i, col)].is_zero() {
                    let f = &w[(i, col)] / &lead;
                    for j in col..w.cols {
                        let delta = &f * &w[(rank, j)];
                        w[(i, j)] -= delta;
                    }
                }
            }
            rank += 1;
            if rank == w.rows {
                break;
            }
        }
        rank
    }

    /// Exact null space basis (columns), via reduced row echelon form.
    pub fn null_space(&self) -> RatMatrix {
        let mut w = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut rank = 0;
        for col in 0..w.cols {
            let Some(piv) = (rank..w.rows).find(|&i| !w[(i, col)].is_zero()) else {
                continue;
            };
            w.swap_rows(rank, piv);
            let lead = w[(rank, col)].clone();
            for j in col..w.cols {
                let v = &w[(rank, j)] / &lead;
                w[(rank, j)] = v;
            }
            for i in 0..w.rows {
                if i != rank && !w[(i, col)].is_zero() {
                    let f = w[(i, col)].clone();
                    for j in col..w.cols {
                        let delta = &f * &w[(rank, j)];
                        w[(i, j)] -= delta;
                    }
                }
            }
            pivots.push((rank, col));
            rank += 1;
            if rank == w.rows {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free_cols: Vec<usize> = (0..w.cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = RatMatrix::zeros(w.cols, free_cols.len());
        for (k, &fc) in free_cols.iter().enumerate() {
            basis[(fc, k)] = Rat::one();
            for &(pr, pc) in &pivots {
                basis[(pc, k)] = -w[(pr, fc)].clone();
            }
        }
        basis
    }

    /// Solve `self * x = rhs` exactly; `None` when singular.
    pub fn solve(&self, rhs: &RatMatrix) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let mut w = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let piv = (col..n).find(|&i| !w[(i, col)].is_zero())?;
            w.swap_rows(col, piv);
            x.swap_rows(col, piv);
            let lead = w[(col, col)].clone();
            for i in 0..n {
                if i != col && !w[(i, col)].is_zero() {
                    let f = &w[(i, col)] / &lead;
                    for j in col..n {
                        let delta = &f * &w[(col, j)];
                        w[(i, j)] -= delta;
                    }
                    for j in 0..x.cols {
                        let delta = &f * &x[(col, j)];
                        x[(i, j)] -= delta;
                    }
                }
            }
        }
        for i in 0..n {
            let lead = w[(i, i)].clone();
            for j in 0..x.cols {
                let v = &x[(i, j)] / &lead;
                x[(i, j)] = v;
            }
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_null_space() {
        let m = RatMatrix::from_ints(&[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(m.rank(), 1);
        let ns = m.null_space();
        assert_eq!(ns.cols(), 2);
        let prod = m.mul(&ns);
        assert!((0..prod.rows()).all(|i| (0..prod.cols()).all(|j| prod[(i, j)].is_zero())));
    }

    #[test]
    fn exact_solve() {
        let m = RatMatrix::from_ints(&[vec![2, 1], vec![1, 3]]);
        let rhs = RatMatrix::from_ints(&[vec![5], vec![10]]);
        let x = m.solve(&rhs).unwrap();
        assert_eq!(x[(0, 0)], crate::poly::rat_int(1));
        assert_eq!(x[(1, 0)], crate::poly::rat_int(3));
    }
}
