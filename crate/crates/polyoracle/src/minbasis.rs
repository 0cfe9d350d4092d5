//! Minimal polynomial bases of right null spaces, by an exact degree sweep.
//!
//! For each degree bound d the polynomial kernel vectors of degree <= d form
//! a Q-vector space computed from a block convolution system. New basis
//! columns are the sweep residues modulo the z-shifts of the columns already
//! selected; the result is certified against the minimal-basis criterion
//! (full rank of the highest-coefficient matrix, no finite rank drop) and
//! the degree-count identity before it is returned.

use num_traits::Zero;

use crate::poly::{Poly, Rat};
use crate::polymat::PolyMatrix;
use crate::ratmat::RatMatrix;

/// Rolling exact echelon basis used to test membership in a growing span.
struct Echelon {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: vec![] }
    }

    /// Reduce `v` against the span; returns the residue (empty span keeps v).
    fn reduce(&self, mut v: Vec<Rat>) -> Vec<Rat> {
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let f = &v[*pivot] / &row[*pivot];
                for (x, y) in v.iter_mut().zip(row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    /// Insert a (nonzero) vector, returning false if it reduced to zero.
    fn insert(&mut self, v: Vec<Rat>) -> bool {
        let v = self.reduce(v);
        match v.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                self.rows.push((pivot, v));
                true
            }
            None => false,
        }
    }
}

/// Solve for all polynomial kernel vectors of degree <= d: coefficients
/// stacked as q-blocks per power, constrained by the convolution with n.
fn kernel_coefficients(n: &PolyMatrix, d: usize) -> RatMatrix {
    let p = n.rows();
    let q = n.cols();
    let delta = n.max_degree();
    let out_terms = delta + d + 1;
    let mut sys = RatMatrix::zeros(p * out_terms, q * (d + 1));
    for s in 0..=d {
        for k in 0..=delta {
            let blk = n.coeff_matrix(k);
            let t = s + k;
            for i in 0..p {
                for j in 0..q {
                    if !blk[(i, j)].is_zero() {
                        sys[(t * p + i, s * q + j)] = blk[(i, j)].clone();
                    }
                }
            }
        }
    }
    sys.null_space()
}

fn coeffs_to_poly_column(v: &[Rat], q: usize) -> Vec<Poly> {
    let terms = v.len() / q;
    (0..q)
        .map(|row| Poly::from_coeffs((0..terms).map(|s| v[s * q + row].clone()).collect()))
        .collect()
}

fn poly_column_to_coeffs(col: &[Poly], q: usize, d: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); q * (d + 1)];
    for (row, poly) in col.iter().enumerate() {
        for (s, c) in poly.coeffs().iter().enumerate() {
            out[s * q + row] = c.clone();
        }
    }
    out
}

/// Minimal polynomial basis of the right null space of `n` over Q(z),
/// columns in ascending degree order. Panics if the internal certification
/// of the Forney criterion fails (which would be a bug, not bad input).
pub fn minimal_kernel_basis(n: &PolyMatrix) -> PolyMatrix {
    let q = n.cols();
    let m = q - n.rank();
    if m == 0 {
        return PolyMatrix::zeros(q, 0);
    }
    let delta = n.max_degree();
    let cap = q.min(n.rows().max(1)) * delta + 1;

    // selected columns as (degree, polynomial entries)
    let mut selected: Vec<(usize, Vec<Poly>)> = Vec::new();
    let mut d = 0usize;
    while selected.len() < m {
        assert!(d <= cap, "degree sweep exceeded the index bound");
        let space = kernel_coefficients(n, d);
        let space_dim = space.cols();
        // Span of shifts of already-selected columns inside degree <= d.
        let mut ech = Echelon::new();
        for (nu, col) in &selected {
            for s in 0..=(d - nu) {
                let shifted: Vec<Poly> = col.iter().map(|p| p.shift(s)).collect();
                ech.insert(poly_column_to_coeffs(&shifted, q, d));
            }
        }
        for k in 0..space_dim {
            if selected.len() == m {
                break;
            }
            let cand: Vec<Rat> = (0..space.rows()).map(|i| space[(i, k)].clone()).collect();
            let residue = ech.reduce(cand);
            if residue.iter().all(Zero::is_zero) {
                continue;
            }
            let col = normalize_column(coeffs_to_poly_column(&residue, q));
            let nu = col.iter().filter_map(Poly::degree).max().unwrap_or(0);
            ech.insert(poly_column_to_coeffs(&col, q, d));
            selected.push((nu, col));
        }
        // Forney (iii): dim of degree-< d+1 kernel polynomials must equal
        // the shift count of the selected columns once the stage is done.
        let expect: usize = selected.iter().map(|(nu, _)| (d + 1).saturating_sub(*nu)).sum();
        assert_eq!(
            space_dim, expect,
            "degree-count certification failed at d = {d}"
        );
        d += 1;
    }
    selected.sort_by_key(|(nu, _)| *nu);
    let mut basis = PolyMatrix::zeros(q, m);
    for (j, (_, col)) in selected.iter().enumerate() {
        for (i, poly) in col.iter().enumerate() {
            basis[(i, j)] = poly.clone();
        }
    }
    certify_minimal(n, &basis);
    basis
}

/// Scale a polynomial column so its entries are coprime integers and its
/// highest-degree coefficient vector has positive first nonzero entry.
fn normalize_column(col: Vec<Poly>) -> Vec<Poly> {
    // Common rational scale: make the whole column primitive by treating it
    // as one long polynomial.
    let mut flat = Vec::new();
    for p in &col {
        flat.extend(p.coeffs().iter().cloned());
    }
    let flat_poly = Poly::from_coeffs(flat);
    if flat_poly.is_zero() {
        return col;
    }
    // primitive() scales by a single rational; recover that scale by
    // comparing any nonzero coefficient.
    let prim = flat_poly.primitive();
    let idx = flat_poly
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero");
    let scale = &prim.coeffs()[idx] / &flat_poly.coeffs()[idx];
    let col: Vec<Poly> = col.iter().map(|p| p.scale(&scale)).collect();
    // Sign: first nonzero entry of the highest-degree coefficient vector.
    let nu = col.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let lead_sign = col
        .iter()
        .map(|p| p.coeff(nu))
        .find(|c| !c.is_zero())
        .map(|c| if c < Rat::zero() { -1i64 } else { 1 })
        .unwrap_or(1);
    if lead_sign < 0 {
        col.iter().map(Poly::neg).collect()
    } else {
        col
    }
}

/// Forney criterion (iv) plus basis checks, all exact.
fn certify_minimal(n: &PolyMatrix, v: &PolyMatrix) {
    let m = v.cols();
    assert!(n.mul(v).is_zero(), "basis does not annihilate the matrix");
    assert_eq!(v.rank(), m, "basis not independent over Q(z)");
    assert_eq!(
        v.highest_col_coeffs().rank(),
        m,
        "highest-coefficient matrix rank deficient"
    );
    // No finite rank drop: gcd of all maximal minors is a nonzero constant.
    let cols: Vec<usize> = (0..m).collect();
    let mut g = Poly::zero();
    for minor in v.minors_for_columns(&cols) {
        g = g.gcd(&minor);
        if g.is_constant() && !g.is_zero() {
            return;
        }
    }
    panic!("maximal minors share a nonconstant factor");
}

/// Sum of the column degrees of a minimal basis.
pub fn degmin(v: &PolyMatrix) -> usize {
    (0..v.cols()).map(|j| v.col_degree(j)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_kernel_basis() {
        // N = [z+1, 1] -> basis [1; -(z+1)], degree 1.
        let n = PolyMatrix::from_rows(vec![vec![Poly::from_ints(&[1, 1]), Poly::one()]]);
        let v = minimal_kernel_basis(&n);
        assert_eq!((v.rows(), v.cols()), (2, 1));
        assert_eq!(degmin(&v), 1);
        // Up to sign the basis is [1, -(z+1)]^T; our normalization makes
        // the leading coefficient vector positive: [-1; z+1].
        let ratio_ok = (v[(0, 0)] == Poly::from_ints(&[1]) && v[(1, 0)] == Poly::from_ints(&[-1, -1]))
            || (v[(0, 0)] == Poly::from_ints(&[-1]) && v[(1, 0)] == Poly::from_ints(&[1, 1]));
        assert!(ratio_ok, "unexpected basis {v:?}");
    }

    #[test]
    fn full_rank_gives_empty_basis() {
        let n = PolyMatrix::identity(2);
        let v = minimal_kernel_basis(&n);
        assert_eq!(v.cols(), 0);
        assert_eq!(degmin(&v), 0);
    }

    #[test]
    fn constant_row_gives_degree_zero() {
        let n = PolyMatrix::from_rows(vec![vec![Poly::one(), Poly::one()]]);
        let v = minimal_kernel_basis(&n);
        assert_eq!(v.cols(), 1);
        assert_eq!(degmin(&v), 0);
    }

    #[test]
    fn two_dim_kernel_mixed_degrees() {
        // N = [z, 1, 0] (1x3): kernel dim 2; minimal indices {0, 1}:
        // [0;0;1] and [1;-z;0].
        let n = PolyMatrix::from_rows(vec![vec![
            Poly::from_ints(&[0, 1]),
            Poly::one(),
            Poly::zero(),
        ]]);
        let v = minimal_kernel_basis(&n);
        assert_eq!(v.cols(), 2);
        let mut degs: Vec<usize> = (0..2).map(|j| v.col_degree(j)).collect();
        degs.sort();
        assert_eq!(degs, vec![0, 1]);
        assert_eq!(degmin(&v), 1);
    }

    #[test]
    fn zero_matrix_kernel_is_identity_like() {
        let n = PolyMatrix::zeros(1, 2);
        let v = minimal_kernel_basis(&n);
        assert_eq!(v.cols(), 2);
        assert_eq!(degmin(&v), 0);
    }
}
