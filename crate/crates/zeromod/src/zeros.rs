//! Zero structure from the zero pencil equation
//! `[A B; C D][Pi; H] = [Pi Lambda; 0]`.
//!
//! Maximal solutions carry the output-nulling geometry: the image of Pi for
//! the maximal solution is V*, and restricting to the reachable part gives
//! the basis of the finite-zero-plus-kernel space. The kernel equation
//! `[B; D] R0 = [Pi alpha0; 0]` and a controllability staircase of
//! `(Lambda, alpha0)` then split the spectrum into the kernel block (whose
//! controllability indices are the minimal indices of ker F) and the finite
//! zero matrix.

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{cr, Matrix, Tolerance};
use crate::qr::{orthonormalize, unitary_completion};
use crate::schur::eigenvalues;
use crate::ss::StateSpace;
use crate::subspace::{image, intersect, join, kernel, kernel_with_scale, Subspace};
use crate::svd::svd;
use crate::geometry;

/// A solution `(Pi, H, Lambda)` of the zero pencil equation with orthonormal
/// `Pi` columns and a certified residual.
#[derive(Clone, Debug)]
pub struct ZeroTriple {
    pub pi: Matrix,
    pub h: Matrix,
    pub lambda: Matrix,
    pub residual: f64,
}

impl ZeroTriple {
    pub fn dim(&self) -> usize {
        self.lambda.rows()
    }
}

/// Frobenius norm of `[A B; C D][Pi; H] - [Pi Lambda; 0]`.
pub fn pencil_residual(ss: &StateSpace, pi: &Matrix, h: &Matrix, lambda: &Matrix) -> f64 {
    let top = &(&(ss.a() * pi) + &(ss.b() * h)) - &(pi * lambda);
    let bottom = &(ss.c() * pi) + &(ss.d() * h);
    (top.norm_fro().powi(2) + bottom.norm_fro().powi(2)).sqrt()
}

fn system_scale(ss: &StateSpace) -> f64 {
    (ss.a().norm_fro() + ss.b().norm_fro() + ss.c().norm_fro() + ss.d().norm_fro()).max(1.0)
}

fn require_observable(ss: &StateSpace, tol: &Tolerance, force: bool) -> Result<()> {
    if !force && !ss.is_observable(tol) {
        return Err(Error::NotObservable);
    }
    Ok(())
}

/// Minimum-norm least-squares solve of `m x = rhs` (columnwise) through the
/// SVD. The pseudoinverse cut sits at machine-noise level rather than the
/// subspace rank tolerance: the pencil systems solved here are consistent
/// by theory but can legitimately carry singular values many orders below
/// the largest one, and the per-column residual certificate catches any
/// inconsistency afterwards.
fn min_norm_solve(m: &Matrix, rhs: &Matrix, _tol: &Tolerance) -> Matrix {
    let s = svd(m);
    let noise = 16.0 * f64::EPSILON * m.rows().max(m.cols()) as f64;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let r = s
        .sigma
        .iter()
        .take_while(|&&sv| sv > noise * smax)
        .count();
    let ur = s.u.block(0, 0, m.rows(), r);
    let vr = s.v.block(0, 0, m.cols(), r);
    let mut y = &ur.adjoint() * rhs;
    for i in 0..r {
        for j in 0..y.cols() {
            y[(i, j)] /= cr(s.sigma[i]);
        }
    }
    &vr * &y
}

/// Solve the pencil equation for a fixed orthonormal `pi`: each column i
/// takes the minimum-norm `(lambda_i, u_i)` with
/// `[-Pi, B; 0, D][lambda_i; u_i] = [-A pi_i; -C pi_i]`.
fn solve_triple_for(ss: &StateSpace, pi: Matrix, tol: &Tolerance) -> Result<ZeroTriple> {
    let p = ss.outputs();
    let r = pi.cols();
    let sys = Matrix::vstack(&[
        &Matrix::hstack(&[&-&pi, ss.b()]),
        &Matrix::hstack(&[&Matrix::zeros(p, r), ss.d()]),
    ]);
    let rhs = Matrix::vstack(&[&-&(ss.a() * &pi), &-&(ss.c() * &pi)]);
    let x = min_norm_solve(&sys, &rhs, tol);
    let scale = system_scale(ss);
    let misfit = &(&sys * &x) - &rhs;
    for j in 0..r {
        let col_res = misfit.column(j).norm_fro();
        if col_res > tol.residual_tol * scale {
            return Err(Error::InfeasibleColumn {
                col: j,
                residual: col_res,
            });
        }
    }
    let lambda = x.block(0, 0, r, r);
    let h = x.block(r, 0, ss.inputs(), r);
    let residual = pencil_residual(ss, &pi, &h, &lambda);
    Ok(ZeroTriple { pi, h, lambda, residual })
}

/// Maximal solution of the pencil equation: `Im Pi = V*`.
pub fn max_zero_triple(ss: &StateSpace, tol: &Tolerance, force: bool) -> Result<ZeroTriple> {
    require_observable(ss, tol, force)?;
    let v = geometry::vstar(ss, tol);
    solve_triple_for(ss, v.basis().clone(), tol)
}

/// The solution whose image is `V* cap <A|B>`: the basis of the finite-zero
/// plus kernel space.
pub fn fzk_triple(ss: &StateSpace, tol: &Tolerance, force: bool) -> Result<ZeroTriple> {
    require_observable(ss, tol, force)?;
    let v = geometry::vstar(ss, tol);
    let reach = ss.reachable_subspace(tol);
    let pi = intersect(&v, &reach).expect("same ambient");
    solve_triple_for(ss, pi.basis().clone(), tol)
}

/// Maximal solution `(R0, alpha0)` of `[B; D] R0 = [Pi alpha0; 0]`: the full
/// null space of `[B, -Pi; D, 0]` with the input parts orthonormalized.
/// Constant kernel directions appear as columns with a zero alpha part.
pub fn kernel_generators(
    ss: &StateSpace,
    triple: &ZeroTriple,
    tol: &Tolerance,
) -> Result<(Matrix, Matrix)> {
    let q = ss.inputs();
    let r = triple.dim();
    // Two scale-separated stages: inputs in ker D first, then within those
    // the directions whose B-image lies in Im Pi. A single stacked null
    // space would make the rank decision at the scale of the largest block
    // and can both miss and invent kernel directions when B is huge.
    let d_ker = kernel(ss.d(), tol);
    if d_ker.dim() == 0 {
        return Ok((Matrix::zeros(q, 0), Matrix::zeros(r, 0)));
    }
    let b_on_ker = ss.b() * d_ker.basis();
    let projected = &b_on_ker - &(&triple.pi * &(&triple.pi.adjoint() * &b_on_ker));
    let w = kernel_with_scale(&projected, tol, b_on_ker.norm_fro().max(1.0));
    let m = w.dim();
    if m == 0 {
        return Ok((Matrix::zeros(q, 0), Matrix::zeros(r, 0)));
    }
    let u_part = d_ker.basis() * w.basis();
    // ker Pi = 0 makes the input parts independent; orthonormalize them and
    // read alpha off the (certified) inclusion B R0 = Pi alpha0.
    let (r0, _t) = orthonormalize(&u_part, tol.rank_tol)?;
    let alpha0 = &triple.pi.adjoint() * &(ss.b() * &r0);
    Ok((r0, alpha0))
}

/// The kernel/finite partition of a maximal fzk solution, in staircase
/// coordinates. `lambda_fzk` is block upper triangular
/// `[[lambda_k, lambda_kf], [0, lambda_f]]` with `(lambda_k, alpha_k)`
/// controllable; the controllability indices of that pair are the minimal
/// indices of ker F (index 0 for constant kernel directions).
#[derive(Clone, Debug)]
pub struct KernelStructure {
    pub r0: Matrix,
    pub alpha0: Matrix,
    pub pi_k: Matrix,
    pub pi_f: Matrix,
    pub h_k: Matrix,
    pub h_f: Matrix,
    pub lambda_k: Matrix,
    pub lambda_kf: Matrix,
    pub lambda_f: Matrix,
    pub alpha_k: Matrix,
    pub kernel_indices: Vec<usize>,
}

impl KernelStructure {
    pub fn kernel_dim(&self) -> usize {
        self.r0.cols()
    }

    pub fn pi_fzk(&self) -> Matrix {
        Matrix::hstack(&[&self.pi_k, &self.pi_f])
    }

    pub fn h_fzk(&self) -> Matrix {
        Matrix::hstack(&[&self.h_k, &self.h_f])
    }

    pub fn lambda_fzk(&self) -> Matrix {
        let rk = self.lambda_k.rows();
        let rf = self.lambda_f.rows();
        let mut out = Matrix::zeros(rk + rf, rk + rf);
        out.set_block(0, 0, &self.lambda_k);
        out.set_block(0, rk, &self.lambda_kf);
        out.set_block(rk, rk, &self.lambda_f);
        out
    }
}

/// Greedy power-major Kalman sweep: returns the per-column controllability
/// indices of `(a, b)` and an orthonormal basis of the reachable span.
fn controllability_indices(a: &Matrix, b: &Matrix, tol: &Tolerance) -> (Vec<usize>, Matrix) {
    let r = a.rows();
    let m = b.cols();
    let mut indices = vec![0usize; m];
    let mut basis: Vec<Matrix> = Vec::new();
    let mut active: Vec<bool> = vec![true; m];
    let mut current: Vec<Matrix> = (0..m).map(|j| b.column(j)).collect();
    let scale = b.norm_fro().max(a.norm_fro()).max(1.0);
    let thresh = tol.rank_tol.sqrt() * scale * 1e-2;
    for _power in 0..=r {
        if basis.len() == r || active.iter().all(|&x| !x) {
            break;
        }
        for j in 0..m {
            if !active[j] {
                continue;
            }
            // Orthogonalize against the accumulated basis (twice, for
            // numerical safety).
            let mut w = current[j].clone();
            for _ in 0..2 {
                for qcol in &basis {
                    let coeff = (&qcol.adjoint() * &w)[(0, 0)];
                    w = &w - &qcol.scale(coeff);
                }
            }
            let nw = w.norm_fro();
            if nw > thresh {
                basis.push(w.scale(cr(1.0 / nw)));
                indices[j] += 1;
                current[j] = a * &current[j];
            } else {
                active[j] = false;
            }
        }
    }
    let q = if basis.is_empty() {
        Matrix::zeros(r, 0)
    } else {
        let refs: Vec<&Matrix> = basis.iter().collect();
        Matrix::hstack(&refs)
    };
    (indices, q)
}

/// Expose the kernel/finite split of a maximal fzk solution by a unitary
/// controllability staircase of `(Lambda, alpha0)`.
pub fn staircase_partition(
    triple: &ZeroTriple,
    r0: &Matrix,
    alpha0: &Matrix,
    tol: &Tolerance,
) -> KernelStructure {
    let r = triple.dim();
    let (kernel_indices, reach_basis) = controllability_indices(&triple.lambda, alpha0, tol);
    let rk = reach_basis.cols();
    let completion = unitary_completion(&reach_basis);
    let s = Matrix::hstack(&[&reach_basis, &completion]);
    let lambda_hat = &(&s.adjoint() * &triple.lambda) * &s;
    let alpha_hat = &s.adjoint() * alpha0;
    let pi_hat = &triple.pi * &s;
    let h_hat = &triple.h * &s;

    let rf = r - rk;
    let lambda_k = lambda_hat.block(0, 0, rk, rk);
    let lambda_kf = lambda_hat.block(0, rk, rk, rf);
    let lambda_f = lambda_hat.block(rk, rk, rf, rf);
    let alpha_k = alpha_hat.block(0, 0, rk, alpha0.cols());
    debug_assert!(kernel_indices.iter().sum::<usize>() == rk);

    KernelStructure {
        r0: r0.clone(),
        alpha0: {
            let mut a0 = Matrix::zeros(r, alpha0.cols());
            a0.set_block(0, 0, &alpha_k);
            a0
        },
        pi_k: pi_hat.block(0, 0, pi_hat.rows(), rk),
        pi_f: pi_hat.block(0, rk, pi_hat.rows(), rf),
        h_k: h_hat.block(0, 0, h_hat.rows(), rk),
        h_f: h_hat.block(0, rk, h_hat.rows(), rf),
        lambda_k,
        lambda_kf,
        lambda_f,
        alpha_k,
        kernel_indices,
    }
}

/// `K0(z) = R0 + H_k (zI - Lambda_k)^{-1} alpha_k`: a proper rational
/// function whose columns generate ker F over the rational functions.
pub fn k0_function(ks: &KernelStructure) -> StateSpace {
    StateSpace::new(
        ks.lambda_k.clone(),
        ks.alpha_k.clone(),
        ks.h_k.clone(),
        ks.r0.clone(),
    )
    .expect("kernel structure blocks are dimensionally consistent")
}

/// The four zero-module dimensions, the finite zeros, and the counting
/// identity verdict against the McMillan degree.
#[derive(Clone, Debug)]
pub struct ZeroReport {
    /// Eigenvalues of the finite zero matrix, sorted by (re, im).
    pub finite_zeros: Vec<Complex64>,
    pub dim_z: usize,
    pub dim_zinf: usize,
    pub dim_wker: usize,
    pub dim_wim: usize,
    pub kernel_indices: Vec<usize>,
    pub mcmillan: usize,
    pub identity_holds: bool,
}

impl ZeroReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "finite_zeros": self.finite_zeros.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "dim_Z": self.dim_z,
            "dim_Zinf": self.dim_zinf,
            "dim_Wker": self.dim_wker,
            "dim_WIm": self.dim_wim,
            "kernel_indices": self.kernel_indices,
            "mcmillan": self.mcmillan,
            "identity_holds": self.identity_holds,
        })
    }
}

pub fn sort_complex(mut zs: Vec<Complex64>) -> Vec<Complex64> {
    zs.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    zs
}

/// Full zero analysis of one realization.
pub fn zero_report(ss: &StateSpace, tol: &Tolerance, force: bool) -> Result<ZeroReport> {
    require_observable(ss, tol, force)?;
    let v = geometry::vstar(ss, tol);
    let c = geometry::cstar(ss, tol);
    let rst = intersect(&v, &c).expect("same ambient");
    let reach = ss.reachable_subspace(tol);

    let triple = fzk_triple(ss, tol, true)?;
    let (r0, alpha0) = kernel_generators(ss, &triple, tol)?;
    let ks = staircase_partition(&triple, &r0, &alpha0, tol);

    let finite_zeros = sort_complex(eigenvalues(&ks.lambda_f)?);
    let dim_z = ks.lambda_f.rows();
    let dim_wker = ks.lambda_k.rows();
    let dim_zinf = c.dim() - rst.dim();
    let vc = join(&v, &c).expect("same ambient");
    let dim_wim = reach.dim() - intersect(&reach, &vc).expect("same ambient").dim();
    let mcmillan = ss.mcmillan_degree(tol);
    let identity_holds = mcmillan == dim_z + dim_zinf + dim_wker + dim_wim;

    Ok(ZeroReport {
        finite_zeros,
        dim_z,
        dim_zinf,
        dim_wker,
        dim_wim,
        kernel_indices: ks.kernel_indices.clone(),
        mcmillan,
        identity_holds,
    })
}

/// Subspace `{ B eta : D eta = 0 }` used by the trivial-kernel criterion.
pub fn one_step_nulling(ss: &StateSpace, tol: &Tolerance) -> Subspace {
    let dker = kernel(ss.d(), tol);
    image(&(ss.b() * dker.basis()), tol)
}

/// Multiset distance between two complex spectra: the minimum over pairings
/// of the largest pair distance (exact bitmask assignment; both lists must
/// have equal length, infinity otherwise).
pub fn spectrum_matching_distance(xs: &[Complex64], ys: &[Complex64]) -> f64 {
    if xs.len() != ys.len() {
        return f64::INFINITY;
    }
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    assert!(n <= 16, "matching sized for small spectra");
    // dp over subsets of ys: dp[mask] = best worst-pair distance after
    // assigning xs[0..popcount(mask)] to the set `mask`.
    let full = (1usize << n) - 1;
    let mut dp = vec![f64::INFINITY; full + 1];
    dp[0] = 0.0;
    for mask in 0..=full {
        if dp[mask].is_infinite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 {
                continue;
            }
            let cost = dp[mask].max((xs[i] - ys[j]).norm());
            let next = mask | (1 << j);
            if cost < dp[next] {
                dp[next] = cost;
            }
        }
    }
    dp[full]
}

/// Check `dim Wker = 0  iff  Im(Pi_fzk) cap {B eta : D eta = 0} = {0}`,
/// computing both sides independently. Used by tests and `verify`.
pub fn kernel_triviality_consistent(ss: &StateSpace, tol: &Tolerance) -> Result<bool> {
    let triple = fzk_triple(ss, tol, true)?;
    let (r0, alpha0) = kernel_generators(ss, &triple, tol)?;
    let ks = staircase_partition(&triple, &r0, &alpha0, tol);
    let lhs = ks.lambda_k.rows() == 0;
    let pi_im = image(&triple.pi, tol);
    let cap = intersect(&pi_im, &one_step_nulling(ss, tol)).expect("same ambient");
    let rhs = cap.dim() == 0;
    Ok(lhs == rhs)
}
