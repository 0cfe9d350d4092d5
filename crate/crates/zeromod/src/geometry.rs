//! Geometric-control subspaces of a realization: the maximal output-nulling
//! controlled invariant subspace V*, the minimal input-containing subspace
//! C* (output-nulling reachable set), their intersection R*, and the left
//! counterparts obtained through the adjoint system.

use crate::matrix::{Matrix, Tolerance};
use crate::ss::StateSpace;
use crate::subspace::{image, image_with_scale, intersect, kernel, kernel_with_scale, ortho_complement, Subspace};

/// All subspaces of interest for one realization.
#[derive(Clone, Debug)]
pub struct GeometricProfile {
    pub vstar: Subspace,
    pub cstar: Subspace,
    pub rstar: Subspace,
    pub reach: Subspace,
    pub vstar_left: Subspace,
    pub cstar_left: Subspace,
}

/// Maximal output-nulling controlled invariant subspace: the fixed point of
/// the descending recursion V_0 = C^n,
/// V_{k+1} = { x : exists u with Ax + Bu in V_k and Cx + Du = 0 }.
///
/// Each step costs one rank-revealing factorization of the stacked matrix
/// [Z_k^H A, Z_k^H B; C, D] (Z_k a basis of the complement of V_k); the
/// iteration stops at the first dimension repeat, after at most n steps.
pub fn vstar(ss: &StateSpace, tol: &Tolerance) -> Subspace {
    let n = ss.order();
    let mut current = Subspace::full(n);
    loop {
        // x is in the next subspace iff [Z^H A; C] x lies in the column
        // space of [Z^H B; D]. The two rank decisions are kept separate so
        // that blocks of wildly different magnitude (reduced realizations
        // can carry huge input maps) cannot mask each other.
        let z = ortho_complement(&current);
        let state_rows = Matrix::vstack(&[&(&z.basis().adjoint() * ss.a()), ss.c()]);
        let input_rows = Matrix::vstack(&[&(&z.basis().adjoint() * ss.b()), ss.d()]);
        // Floor the rank decision at the unprojected input scale: the
        // compressed block can be exact zero plus roundoff.
        let input_scale = (ss.b().norm_fro().powi(2) + ss.d().norm_fro().powi(2)).sqrt();
        let reachable = image_with_scale(&input_rows, tol, input_scale.max(1.0) * 1e-2);
        let projected = &state_rows - &(reachable.basis() * &(&reachable.basis().adjoint() * &state_rows));
        let raw = kernel_with_scale(&projected, tol, state_rows.norm_fro().max(1.0));
        // Enforce nesting against tolerance flutter.
        let next = intersect(&raw, &current).expect("same ambient");
        if next.dim() == current.dim() {
            return next;
        }
        current = next;
    }
}

/// Minimal input-containing subspace (output-nulling reachable set): the
/// ascending recursion C_0 = {0},
/// C_{k+1} = { Ax + Bu : x in C_k, Cx + Du = 0 }, stationary within n steps.
pub fn cstar(ss: &StateSpace, tol: &Tolerance) -> Subspace {
    let n = ss.order();
    let mut current = Subspace::trivial(n);
    loop {
        // Next = { A W xi + B u : C W xi + D u = 0 }. Split u into the
        // D-kernel part and a particular solution so every rank decision
        // happens at the scale of its own block.
        let w = current.basis();
        let cw = ss.c() * w;
        let d_im = image(ss.d(), tol);
        let projected = &cw - &(d_im.basis() * &(&d_im.basis().adjoint() * &cw));
        let xi = kernel_with_scale(&projected, tol, cw.norm_fro().max(1.0));
        // Particular input: u_p = -D^+ (C W xi).
        let u_p = d_pinv_apply(ss.d(), &-&(&cw * xi.basis()), tol);
        let d_ker = kernel(ss.d(), tol);
        let from_states = &(&(ss.a() * w) * xi.basis()) + &(ss.b() * &u_p);
        let from_inputs = ss.b() * d_ker.basis();
        let scale = (ss.a().norm_fro() + ss.b().norm_fro()).max(1.0);
        let candidates = Matrix::hstack(&[&from_states, &from_inputs]);
        let raw = image_with_scale(&candidates, tol, scale);
        // Enforce growth against tolerance flutter.
        let next = crate::subspace::join(&raw, &current).expect("same ambient");
        if next.dim() == current.dim() {
            return next;
        }
        current = next;
    }
}

/// Minimum-norm application of the pseudoinverse of `d` to `rhs`.
fn d_pinv_apply(d: &Matrix, rhs: &Matrix, tol: &Tolerance) -> Matrix {
    let s = crate::svd::svd(d);
    let r = s.rank(tol.rank_tol);
    let mut y = &s.u.block(0, 0, d.rows(), r).adjoint() * rhs;
    for i in 0..r {
        for j in 0..y.cols() {
            let v = y[(i, j)] / crate::matrix::cr(s.sigma[i]);
            y[(i, j)] = v;
        }
    }
    &s.v.block(0, 0, d.cols(), r) * &y
}

/// Maximal output-nulling reachability subspace `R* = V* cap C*`.
pub fn rstar(ss: &StateSpace, tol: &Tolerance) -> Subspace {
    intersect(&vstar(ss, tol), &cstar(ss, tol)).expect("same ambient")
}

/// Left-hand V* and C*: the corresponding right objects of the hermitian
/// adjoint system, which already live in column-vector form.
pub fn left_profile(ss: &StateSpace, tol: &Tolerance) -> (Subspace, Subspace) {
    let adj = ss.adjoint_system();
    (vstar(&adj, tol), cstar(&adj, tol))
}

pub fn profile(ss: &StateSpace, tol: &Tolerance) -> GeometricProfile {
    let v = vstar(ss, tol);
    let c = cstar(ss, tol);
    let r = intersect(&v, &c).expect("same ambient");
    let (vl, cl) = left_profile(ss, tol);
    GeometricProfile {
        vstar: v,
        cstar: c,
        rstar: r,
        reach: ss.reachable_subspace(tol),
        vstar_left: vl,
        cstar_left: cl,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::{max_principal_angle, subspace_eq};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn scalar_example() -> StateSpace {
        StateSpace::siso(-1.0, 1.0, -2.0, 1.0)
    }

    fn row_example() -> StateSpace {
        StateSpace::new(
            Matrix::from_real(&[vec![-1.0]]),
            Matrix::from_real(&[vec![0.0, 1.0]]),
            Matrix::from_real(&[vec![1.0]]),
            Matrix::from_real(&[vec![1.0, 0.0]]),
        )
        .unwrap()
    }

    #[test]
    fn vstar_trivial_when_output_reads_state() {
        // C = I, D = 0: output nulling forces x = 0.
        let f = StateSpace::new(
            Matrix::from_real(&[vec![0.0, 1.0], vec![-1.0, 0.0]]),
            Matrix::from_real(&[vec![1.0], vec![0.0]]),
            Matrix::identity(2),
            Matrix::zeros(2, 1),
        )
        .unwrap();
        assert_eq!(vstar(&f, &tol()).dim(), 0);
    }

    #[test]
    fn vstar_of_scalar_examples() {
        assert_eq!(vstar(&scalar_example(), &tol()).dim(), 1);
        assert_eq!(vstar(&row_example(), &tol()).dim(), 1);
    }

    #[test]
    fn cstar_cases() {
        // B = 0 -> C* = {0}.
        let f = StateSpace::new(
            Matrix::from_real(&[vec![-1.0]]),
            Matrix::zeros(1, 1),
            Matrix::from_real(&[vec![1.0]]),
            Matrix::zeros(1, 1),
        )
        .unwrap();
        assert_eq!(cstar(&f, &tol()).dim(), 0);
        // D = 1 invertible forces u = 0 along zero-output trajectories.
        assert_eq!(cstar(&scalar_example(), &tol()).dim(), 0);
        // u = (0, 1) reaches x = 1 with zero output.
        assert_eq!(cstar(&row_example(), &tol()).dim(), 1);
    }

    #[test]
    fn rstar_is_intersection() {
        assert_eq!(rstar(&scalar_example(), &tol()).dim(), 0);
        assert_eq!(rstar(&row_example(), &tol()).dim(), 1);
    }

    #[test]
    fn monotone_recursions_on_example() {
        // V recursion nonincreasing and C recursion nondecreasing is implied
        // by stationarity at the right dimensions for these systems; here we
        // just pin the profile dims of the row example.
        let p = profile(&row_example(), &tol());
        assert_eq!(p.vstar.dim(), 1);
        assert_eq!(p.cstar.dim(), 1);
        assert_eq!(p.rstar.dim(), 1);
        assert_eq!(p.reach.dim(), 1);
    }

    #[test]
    fn left_right_duality_on_minimal_scalar() {
        let f = scalar_example();
        let (vl, cl) = left_profile(&f, &tol());
        assert_eq!(vl.dim(), 1);
        assert_eq!(cl.dim(), 0);
        let v = vstar(&f, &tol());
        let c = cstar(&f, &tol());
        // complement(V*) = C*_left and complement(C*) = V*_left
        assert!(subspace_eq(&ortho_complement(&v), &cl));
        assert!(subspace_eq(&ortho_complement(&c), &vl));
        assert!(max_principal_angle(&ortho_complement(&v), &cl).unwrap() < 1e-7);
    }

    #[test]
    fn dual_of_constant_invertible_all_trivial() {
        let f = StateSpace::constant(Matrix::identity(2));
        let p = profile(&f, &tol());
        assert_eq!(p.vstar.dim(), 0);
        assert_eq!(p.cstar.dim(), 0);
        assert_eq!(p.vstar_left.dim(), 0);
        assert_eq!(p.cstar_left.dim(), 0);
    }
}
