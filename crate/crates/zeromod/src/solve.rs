//! Matrix equation solvers: Sylvester and Lyapunov by Bartels-Stewart on
//! the complex Schur form, and the continuous algebraic Riccati equation by
//! Hamiltonian Schur with stable-subspace selection plus Newton-Kleinman
//! polishing.


use crate::error::{Error, Result};
use crate::matrix::{cr, Matrix, Tolerance};
use crate::schur::{eigenvalues, ordered_schur_by, schur};

/// Solve `A X + X B = Q`. Requires the spectra of `A` and `-B` to be
/// separated at the residual tolerance.
pub fn solve_sylvester(a: &Matrix, b: &Matrix, q: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    assert!(a.is_square() && b.is_square());
    assert_eq!(q.rows(), a.rows());
    assert_eq!(q.cols(), b.rows());
    let n = a.rows();
    let m = b.rows();
    if n == 0 || m == 0 {
        return Ok(Matrix::zeros(n, m));
    }
    let sa = schur(a)?;
    let sb = schur(b)?;
    let scale = (a.norm_fro() + b.norm_fro()).max(1.0);
    check_separation(&sa.t, &sb.t, tol.residual_tol * scale)?;

    // Transformed system T_a Y + Y T_b = Q~, both triangular.
    let qt = &(&sa.q.adjoint() * q) * &sb.q;
    let mut y = Matrix::zeros(n, m);
    for j in 0..m {
        // rhs_j = Q~[:, j] - sum_{k<j} Y[:, k] T_b[k, j]
        let mut rhs = qt.column(j);
        for k in 0..j {
            let f = sb.t[(k, j)];
            for i in 0..n {
                let v = y[(i, k)];
                rhs[(i, 0)] -= v * f;
            }
        }
        // (T_a + T_b[j,j] I) y_j = rhs, upper triangular back-substitution.
        let d = sb.t[(j, j)];
        for i in (0..n).rev() {
            let mut s = rhs[(i, 0)];
            for k in i + 1..n {
                s -= sa.t[(i, k)] * y[(k, j)];
            }
            y[(i, j)] = s / (sa.t[(i, i)] + d);
        }
    }
    Ok(&(&sa.q * &y) * &sb.q.adjoint())
}

fn check_separation(ta: &Matrix, tb: &Matrix, threshold: f64) -> Result<()> {
    let mut min_sep = f64::INFINITY;
    for i in 0..ta.rows() {
        for j in 0..tb.rows() {
            min_sep = min_sep.min((ta[(i, i)] + tb[(j, j)]).norm());
        }
    }
    if min_sep < threshold {
        return Err(Error::SpectraOverlap(min_sep));
    }
    Ok(())
}

/// Solve `P A + A^H P + Q = 0` for hermitian `Q`. The result is
/// hermitian; positive semidefinite when `A` is stable and `Q >= 0`.
pub fn solve_lyapunov(a: &Matrix, q: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    assert!(a.is_square() && q.is_square());
    assert_eq!(a.rows(), q.rows());
    let p = solve_sylvester(&a.adjoint(), a, &-q, tol)?;
    // Symmetrize away roundoff.
    Ok((&p + &p.adjoint()).scale(cr(0.5)))
}

/// Stabilizing solution of `X F + F^H X - X G X + Q = 0` with `G, Q >= 0`.
///
/// Method: ordered Schur form of the Hamiltonian [[F, -G], [-Q, -F^H]] with
/// the stable invariant subspace leading, then at most five Newton-Kleinman
/// corrections, each a Lyapunov solve on the current closed loop.
pub fn solve_care(f: &Matrix, g: &Matrix, q: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    assert!(f.is_square() && g.is_square() && q.is_square());
    let n = f.rows();
    assert_eq!(g.rows(), n);
    assert_eq!(q.rows(), n);
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let scale = (f.norm_fro() + g.norm_fro() + q.norm_fro()).max(1.0);

    let mut ham = Matrix::zeros(2 * n, 2 * n);
    ham.set_block(0, 0, f);
    ham.set_block(0, n, &-g);
    ham.set_block(n, 0, &-q);
    ham.set_block(n, n, &-&f.adjoint());

    let axis_tol = tol.residual_tol * scale;
    for ev in eigenvalues(&ham)? {
        if ev.re.abs() < axis_tol {
            return Err(Error::ImaginaryAxisEigenvalue(ev.re.abs()));
        }
    }

    let (s, k) = ordered_schur_by(&ham, |z| z.re < 0.0)?;
    if k != n {
        return Err(Error::NoStabilizingSolution(format!(
            "stable Hamiltonian subspace has dimension {k}, expected {n}"
        )));
    }
    let u11 = s.q.block(0, 0, n, n);
    let u21 = s.q.block(n, 0, n, n);
    // X = U21 U11^{-1}, i.e. X solves X U11 = U21.
    let x = u11
        .transpose()
        .solve(&u21.transpose())
        .map_err(|_| Error::NoStabilizingSolution("stable subspace not complementary".into()))?
        .transpose();
    let mut x = (&x + &x.adjoint()).scale(cr(0.5));

    // Newton-Kleinman polishing; each step solves
    //   X (F - G X_k) + (F - G X_k)^H X + X_k G X_k + Q = 0.
    let mut best = x.clone();
    let mut best_res = care_residual(f, g, q, &x);
    for _ in 0..5 {
        if best_res <= 1e-3 * f64::EPSILON * scale {
            break;
        }
        let closed = f - &(g * &x);
        let rhs = &(&(&x * g) * &x) + q;
        let Ok(next) = solve_lyapunov(&closed, &rhs, tol) else {
            break;
        };
        let res = care_residual(f, g, q, &next);
        x = next;
        if res < best_res {
            best_res = res;
            best = x.clone();
        } else {
            break;
        }
    }
    let x = best;

    let closed = f - &(g * &x);
    if !eigenvalues(&closed)?.iter().all(|z| z.re < 0.0) {
        return Err(Error::NoStabilizingSolution(
            "closed loop not strictly stable".into(),
        ));
    }
    if best_res > tol.residual_tol * scale.max(x.norm_fro()) {
        return Err(Error::NoStabilizingSolution(format!(
            "residual {best_res:.3e} above certificate"
        )));
    }
    Ok(x)
}

/// Frobenius norm of `X F + F^H X - X G X + Q`.
pub fn care_residual(f: &Matrix, g: &Matrix, q: &Matrix, x: &Matrix) -> f64 {
    let r = &(&(x * f) + &(&f.adjoint() * x)) - &(&(x * g) * x);
    (&r + q).norm_fro()
}

/// Frobenius norm of `A X + X B - Q`.
pub fn sylvester_residual(a: &Matrix, b: &Matrix, q: &Matrix, x: &Matrix) -> f64 {
    (&(&(a * x) + &(x * b)) - q).norm_fro()
}

/// Frobenius norm of `P A + A^H P + Q`.
pub fn lyapunov_residual(a: &Matrix, q: &Matrix, p: &Matrix) -> f64 {
    (&(&(p * a) + &(&a.adjoint() * p)) + q).norm_fro()
}

/// Cholesky factor of a hermitian positive definite matrix: upper
/// triangular `R` with `R^H R = m`.
pub fn cholesky_upper(m: &Matrix) -> Result<Matrix> {
    assert!(m.is_square());
    let n = m.rows();
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= r[(k, j)].norm_sqr();
        }
        if d <= 0.0 {
            return Err(Error::NoStabilizingSolution(format!(
                "matrix not positive definite at pivot {j} ({d:.3e})"
            )));
        }
        let pivot = d.sqrt();
        r[(j, j)] = cr(pivot);
        for i in j + 1..n {
            let mut s = m[(j, i)];
            for k in 0..j {
                s -= r[(k, j)].conj() * r[(k, i)];
            }
            r[(j, i)] = s / cr(pivot);
        }
    }
    Ok(r)
}

/// Smallest eigenvalue of a hermitian matrix (0.0 for the empty matrix).
pub fn min_hermitian_eigenvalue(m: &Matrix) -> Result<f64> {
    if m.rows() == 0 {
        return Ok(0.0);
    }
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min))
}
