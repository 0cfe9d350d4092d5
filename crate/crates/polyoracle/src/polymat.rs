//! Matrices of exact polynomials.

use crate::poly::{Poly, Rat};
use crate::ratmat::RatMatrix;

#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Poly::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        PolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = self[(i, k)].mul(&other[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&add);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn max_degree(&self) -> usize {
        self.entries
            .iter()
            .filter_map(Poly::degree)
            .max()
            .unwrap_or(0)
    }

    /// Degree of column j (0 for a zero column).
    pub fn col_degree(&self, j: usize) -> usize {
        (0..self.rows)
            .filter_map(|i| self[(i, j)].degree())
            .max()
            .unwrap_or(0)
    }

    /// Matrix of highest column-degree coefficients.
    pub fn highest_col_coeffs(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            let d = self.col_degree(j);
            for i in 0..self.rows {
                out[(i, j)] = self[(i, j)].coeff(d);
            }
        }
        out
    }

    /// Coefficient-of-z^k matrix.
    pub fn coeff_matrix(&self, k: usize) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].coeff(k);
            }
        }
        out
    }

    pub fn eval(&self, x: &Rat) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].eval(x);
            }
        }
        out
    }

    /// Rank over the rational-function field, by fraction-free elimination:
    /// cross-multiplication keeps every entry polynomial.
    pub fn rank(&self) -> usize {
        let mut w = self.clone();
        let mut rank = 0;
        for col in 0..w.cols {
            let Some(piv) = (rank..w.rows).find(|&i| !w[(i, col)].is_zero()) else {
                continue;
            };
            w.swap_rows(rank, piv);
            let lead = w[(rank, col)].clone();
            for i in rank + 1..w.rows {
                if w[(i, col)].is_zero() {
                    continue;
                }
                let f = w[(i, col)].clone();
                for j in col..w.cols {
                    let a = w[(i, j)].mul(&lead);
                    let b = w[(rank, j)].mul(&f);
                    w[(i, j)] = a.sub(&b);
                }
            }
            rank += 1;
            if rank == w.rows {
                break;
            }
        }
        rank
    }

    /// Exact determinant by cofactor expansion (small matrices only).
    pub fn determinant(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            0 => Poly::one(),
            1 => self[(0, 0)].clone(),
            _ => {
                let mut det = Poly::zero();
                for j in 0..n {
                    if self[(0, j)].is_zero() {
                        continue;
                    }
                    let minor = self.minor_matrix(0, j);
                    let term = self[(0, j)].mul(&minor.determinant());
                    det = if j % 2 == 0 { det.add(&term) } else { det.sub(&term) };
                }
                det
            }
        }
    }

    fn minor_matrix(&self, row: usize, col: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.rows - 1, self.cols - 1);
        let mut ii = 0;
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let mut jj = 0;
            for j in 0..self.cols {
                if j == col {
                    continue;
                }
                out[(ii, jj)] = self[(i, j)].clone();
                jj += 1;
            }
            ii += 1;
        }
        out
    }

    /// All k x k minors formed by the given column set over all row choices.
    pub fn minors_for_columns(&self, cols: &[usize]) -> Vec<Poly> {
        let k = cols.len();
        let mut out = Vec::new();
        let mut rows_choice = (0..k).collect::<Vec<usize>>();
        if k == 0 || k > self.rows {
            return out;
        }
        loop {
            let mut sub = PolyMatrix::zeros(k, k);
            for (a, &i) in rows_choice.iter().enumerate() {
                for (b, &j) in cols.iter().enumerate() {
                    sub[(a, b)] = self[(i, j)].clone();
                }
            }
            out.push(sub.determinant());
            // next combination
            let mut idx = k;
            loop {
                if idx == 0 {
                    return out;
                }
                idx -= 1;
                if rows_choice[idx] + (k - idx) < self.rows {
                    rows_choice[idx] += 1;
                    for t in idx + 1..k {
                        rows_choice[t] = rows_choice[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_rows_pub(&mut self, a: usize, b: usize) {
        self.swap_rows(a, b)
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl std::ops::Index<(usize, usize)> for PolyMatrix {
    type Output = Poly;
    fn index(&self, (i, j): (usize, usize)) -> &Poly {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for PolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Poly {
        &mut self.entries[i * self.cols + j]
    }
}

impl std::fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "PolyMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                write!(f, " {:?} ;", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    #[test]
    fn rank_of_poly_matrix() {
        // [z, 1; z^2, z] has rank 1.
        let m = PolyMatrix::from_rows(vec![
            vec![Poly::from_ints(&[0, 1]), Poly::one()],
            vec![Poly::from_ints(&[0, 0, 1]), Poly::from_ints(&[0, 1])],
        ]);
        assert_eq!(m.rank(), 1);
        assert_eq!(PolyMatrix::identity(3).rank(), 3);
    }

    #[test]
    fn determinant_small() {
        let m = PolyMatrix::from_rows(vec![
            vec![Poly::from_ints(&[0, 1]), Poly::one()],
            vec![Poly::from_ints(&[-1]), Poly::from_ints(&[0, 1])],
        ]);
        // det = z^2 + 1
        assert_eq!(m.determinant(), Poly::from_ints(&[1, 0, 1]));
    }

    #[test]
    fn eval_matches_entries() {
        let m = PolyMatrix::from_rows(vec![vec![Poly::from_ints(&[1, 1])]]);
        assert_eq!(m.eval(&rat_int(2))[(0, 0)], rat_int(3));
    }
}
