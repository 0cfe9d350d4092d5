//! Subspaces of complex coordinate space, held as orthonormal bases.
//!
//! This is the currency of the geometric objects downstream: maximal
//! output-nulling subspaces, reachability subspaces and their lattice
//! combinations all live here.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Tolerance};
use crate::svd::svd;

/// A subspace of C^n carried by an orthonormal basis matrix (n x dim) and
/// the rank tolerance used at construction.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    tol: f64,
}

impl Subspace {
    pub fn trivial(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(ambient, 0),
            tol: Tolerance::default().rank_tol,
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
            tol: Tolerance::default().rank_tol,
        }
    }

    /// Wrap a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: Matrix, tol: f64) -> Self {
        let ambient = basis.rows();
        debug_assert!(basis.cols() <= ambient);
        Subspace { ambient, basis, tol }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Distance of a vector (n x 1 matrix) from the subspace.
    pub fn distance(&self, v: &Matrix) -> f64 {
        let proj = &self.basis * &(&self.basis.adjoint() * v);
        (v - &proj).norm_fro()
    }

    /// Whether every column of `m` lies in the subspace within `tol * scale`.
    pub fn contains_columns(&self, m: &Matrix, tol: f64) -> bool {
        let proj = &self.basis * &(&self.basis.adjoint() * m);
        (m - &proj).norm_fro() <= tol * m.norm_fro().max(1.0)
    }
}

/// Column space of `m` at the numerical rank determined by `tol.rank_tol`.
pub fn image(m: &Matrix, tol: &Tolerance) -> Subspace {
    image_with_scale(m, tol, 0.0)
}

/// Column space with the rank threshold floored at `rank_tol * scale`.
/// Use this when `m` is a block extracted from a larger unit-scale object:
/// judging its rank relative to its own largest singular value would count
/// pure roundoff as directions.
pub fn image_with_scale(m: &Matrix, tol: &Tolerance, scale: f64) -> Subspace {
    let s = svd(m);
    let smax = s.sigma.first().copied().unwrap_or(0.0).max(scale);
    let r = if smax <= 0.0 {
        0
    } else {
        s.sigma
            .iter()
            .take_while(|&&sv| sv > tol.rank_tol * smax)
            .count()
    };
    let mut basis = s.u.block(0, 0, m.rows(), r);
    crate::qr::phase_normalize_columns(&mut basis);
    Subspace::from_orthonormal(basis, tol.rank_tol)
}

/// Null space of `m` (right kernel), dual of [`image`] by rank-nullity.
pub fn kernel(m: &Matrix, tol: &Tolerance) -> Subspace {
    kernel_with_scale(m, tol, 0.0)
}

/// Null space with the rank threshold floored at `rank_tol * scale`; the
/// counterpart of [`image_with_scale`] for projected or extracted blocks
/// whose own largest singular value may be pure roundoff.
pub fn kernel_with_scale(m: &Matrix, tol: &Tolerance, scale: f64) -> Subspace {
    if m.rows() == 0 {
        return Subspace::full(m.cols());
    }
    let s = svd(m);
    let smax = s.sigma.first().copied().unwrap_or(0.0).max(scale);
    let r = if smax <= 0.0 {
        0
    } else {
        s.sigma
            .iter()
            .take_while(|&&sv| sv > tol.rank_tol * smax)
            .count()
    };
    let mut basis = s.v.block(0, r, m.cols(), m.cols() - r);
    crate::qr::phase_normalize_columns(&mut basis);
    Subspace::from_orthonormal(basis, tol.rank_tol)
}

fn check_ambient(s1: &Subspace, s2: &Subspace) -> Result<()> {
    if s1.ambient != s2.ambient {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {} differ",
            s1.ambient, s2.ambient
        )));
    }
    Ok(())
}

/// Intersection: the joint null space of the two complement projectors,
/// computed from one rank-revealing factorization of the stacked matrix.
pub fn intersect(s1: &Subspace, s2: &Subspace) -> Result<Subspace> {
    check_ambient(s1, s2)?;
    let tol = Tolerance {
        rank_tol: s1.tol.max(s2.tol),
        ..Tolerance::default()
    };
    let z1 = ortho_complement(s1);
    let z2 = ortho_complement(s2);
    let stacked = Matrix::vstack(&[&z1.basis.adjoint(), &z2.basis.adjoint()]);
    Ok(kernel(&stacked, &tol))
}

/// Sum of subspaces: image of the concatenated bases.
pub fn join(s1: &Subspace, s2: &Subspace) -> Result<Subspace> {
    check_ambient(s1, s2)?;
    let tol = Tolerance {
        rank_tol: s1.tol.max(s2.tol),
        ..Tolerance::default()
    };
    Ok(image(&Matrix::hstack(&[&s1.basis, &s2.basis]), &tol))
}

pub fn ortho_complement(s: &Subspace) -> Subspace {
    let tol = Tolerance {
        rank_tol: s.tol,
        ..Tolerance::default()
    };
    kernel(&s.basis.adjoint(), &tol)
}

/// Principal angles between two subspaces, ascending, of length
/// min(dim1, dim2). Small angles are recovered through sines for accuracy.
pub fn principal_angles(s1: &Subspace, s2: &Subspace) -> Result<Vec<f64>> {
    check_ambient(s1, s2)?;
    let k = s1.dim().min(s2.dim());
    if k == 0 {
        return Ok(vec![]);
    }
    let (a, b) = if s1.dim() <= s2.dim() { (s1, s2) } else { (s2, s1) };
    let cross = &a.basis.adjoint() * &b.basis;
    let mut cosines = svd(&cross).sigma;
    cosines.truncate(k);
    // sin(theta_i) from the projection of the smaller basis onto the
    // complement of the larger one.
    let proj = &b.basis * &(&b.basis.adjoint() * &a.basis);
    let resid = &a.basis - &proj;
    let mut sines = svd(&resid).sigma;
    sines.resize(k, 0.0);
    sines.reverse(); // ascending, pairing with descending cosines
    let angles: Vec<f64> = (0..k)
        .map(|i| {
            let c = cosines[i].min(1.0);
            let s = sines[i].min(1.0);
            if c * c > 0.5 {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    Ok(angles)
}

/// Largest principal angle; zero for a trivial comparison set.
pub fn max_principal_angle(s1: &Subspace, s2: &Subspace) -> Result<f64> {
    Ok(principal_angles(s1, s2)?.last().copied().unwrap_or(0.0))
}

/// Basis-independent subspace equality: equal dimension and largest
/// principal angle below 1e-7 radians.
pub fn subspace_eq(s1: &Subspace, s2: &Subspace) -> bool {
    s1.ambient == s2.ambient
        && s1.dim() == s2.dim()
        && max_principal_angle(s1, s2).map_or(false, |a| a < 1e-7)
}
