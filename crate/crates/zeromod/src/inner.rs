//! Inner-function factorizations that square a transfer function.
//!
//! From the kernel structure, a stabilizing Riccati solution turns the
//! kernel generator into a tall inner function K. Its square inner
//! extension [K, L] yields the right reduction `F_r = F L` with trivial
//! kernel module; the same machinery on the adjoint system gives the left
//! factors, and the squaring `F_rl = L' F L` is square and invertible with
//! the original finite zeros plus the mirrored kernel spectra.

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{cr, Matrix, Tolerance};
use crate::qr::unitary_completion;
use crate::schur::eigenvalues;
use crate::solve::{cholesky_upper, min_hermitian_eigenvalue, solve_care, solve_lyapunov};
use crate::ss::{EvalGrid, StateSpace};
use crate::subspace::{image, ortho_complement};
use crate::svd::svd;
use crate::zeros::{
    fzk_triple, kernel_generators, pencil_residual, sort_complex, staircase_partition,
    KernelStructure, ZeroTriple,
};

/// Certificate attached to a kernel inner function: the Riccati solution,
/// the feedback that stabilized the kernel block, the worst unitarity
/// defect over the imaginary-axis grid, and the closed-loop verdict.
#[derive(Clone, Debug)]
pub struct InnerCertificate {
    pub sigma: Matrix,
    pub beta_k: Matrix,
    pub grid_defect: f64,
    pub stable: bool,
}

/// Worst scaled deviation of `M(z)^H M(z)` from the identity over the
/// imaginary-axis points of the grid.
pub fn isometry_defect(sys: &StateSpace, grid: &EvalGrid, tol: &Tolerance) -> Result<f64> {
    let eye = Matrix::identity(sys.inputs());
    let mut worst = 0.0f64;
    for z in grid.imaginary_axis_points() {
        let v = sys.eval(z, tol)?;
        let defect = (&(&v.adjoint() * &v) - &eye).norm_fro();
        worst = worst.max(defect / v.norm_fro().powi(2).max(1.0));
    }
    Ok(worst)
}

/// Worst scaled product norm `|F(z) K(z)|` over the full grid.
pub fn annihilation_defect(
    f: &StateSpace,
    k: &StateSpace,
    grid: &EvalGrid,
    tol: &Tolerance,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in grid.points() {
        let fv = f.eval(z, tol)?;
        let kv = k.eval(z, tol)?;
        let prod = (&fv * &kv).norm_fro();
        worst = worst.max(prod / (fv.norm_fro().max(1.0) * kv.norm_fro().max(1.0)));
    }
    Ok(worst)
}

/// Balanced kernel-block data: the coordinates are rescaled so the Riccati
/// solution is (numerically) the identity, which keeps the inner equations
/// well scaled even when sigma is badly graded. All downstream products
/// (the function K itself, `Pi_k sigma^{-1} H_k^H`) are invariant under
/// this similarity.
struct KernelCore {
    /// Riccati solution in the original staircase coordinates.
    sigma_raw: Matrix,
    /// Feedback in the original coordinates.
    beta_raw: Matrix,
    /// Pi_k in the balanced coordinates of the returned realization.
    pi_k: Matrix,
    k: StateSpace,
}

fn riccati_blocks(ks: &KernelStructure, lambda_k: &Matrix, alpha_k: &Matrix, h_k: &Matrix) -> (Matrix, Matrix, Matrix) {
    let r0 = &ks.r0;
    let f_ric = lambda_k - &(alpha_k * &(&r0.adjoint() * h_k));
    let g_ric = alpha_k * &alpha_k.adjoint();
    let proj = &Matrix::identity(r0.rows()) - &(r0 * &r0.adjoint());
    let q_ric = &(&h_k.adjoint() * &proj) * h_k;
    (
        f_ric,
        (&g_ric + &g_ric.adjoint()).scale(cr(0.5)),
        (&q_ric + &q_ric.adjoint()).scale(cr(0.5)),
    )
}

fn kernel_core(ss: &StateSpace, ks: &KernelStructure, tol: &Tolerance) -> Result<KernelCore> {
    let rk = ks.lambda_k.rows();
    let r0 = &ks.r0;

    let (f_ric, g_ric, q_ric) = riccati_blocks(ks, &ks.lambda_k, &ks.alpha_k, &ks.h_k);
    let sigma_raw = solve_care(&f_ric, &g_ric, &q_ric, tol)
        .map_err(|e| Error::RiccatiFailure(e.to_string()))?;
    if rk > 0 {
        let min_eig = min_hermitian_eigenvalue(&sigma_raw)?;
        if min_eig <= 0.0 {
            return Err(Error::RiccatiFailure(format!(
                "sigma not positive definite (min eigenvalue {min_eig:.3e})"
            )));
        }
    }
    let beta_raw = &-&(&ks.alpha_k.adjoint() * &sigma_raw) - &(&r0.adjoint() * &ks.h_k);

    // Rebalance: with sigma = R^H R, the similarity x -> R x maps the
    // Riccati solution to the identity, pinning the inner equations at
    // unit scale. The kernel-block pencil is closed, so instead of
    // transforming H and Lambda (which would carry an error of order
    // eps * cond(R)), they are re-solved from the rescaled Pi against the
    // original system data.
    let (pi_k, h_k, lambda_k, alpha_k, sigma) = if rk == 0 {
        (
            ks.pi_k.clone(),
            ks.h_k.clone(),
            ks.lambda_k.clone(),
            ks.alpha_k.clone(),
            sigma_raw.clone(),
        )
    } else {
        let r = cholesky_upper(&sigma_raw).map_err(|e| Error::RiccatiFailure(e.to_string()))?;
        let rinv = r.inverse().map_err(|e| Error::RiccatiFailure(e.to_string()))?;
        let pi_b = &ks.pi_k * &rinv;
        let (h_b, lambda_b) = resolve_kernel_pencil(ss, &pi_b, tol)?;
        let alpha_b = resolve_alpha(ss, &pi_b, r0, tol);
        let (f2, g2, q2) = riccati_blocks(ks, &lambda_b, &alpha_b, &h_b);
        let sigma_b = solve_care(&f2, &g2, &q2, tol)
            .map_err(|e| Error::RiccatiFailure(e.to_string()))?;
        (pi_b, h_b, lambda_b, alpha_b, sigma_b)
    };

    let beta_k = &-&(&alpha_k.adjoint() * &sigma) - &(&r0.adjoint() * &h_k);
    let a_closed = &lambda_k + &(&alpha_k * &beta_k);
    let c_out = &h_k + &(r0 * &beta_k);
    let k = StateSpace::new(a_closed, alpha_k, c_out, r0.clone())?;
    Ok(KernelCore {
        sigma_raw,
        beta_raw,
        pi_k,
        k,
    })
}

/// Re-solve `A Pi + B H = Pi Lambda`, `C Pi + D H = 0` columnwise for a
/// fixed (not necessarily orthonormal) kernel-block basis `pi`, by the
/// same minimum-norm route the zero analysis uses. Backward stable in the
/// system data, unlike conjugating the staircase blocks.
fn resolve_kernel_pencil(
    ss: &StateSpace,
    pi: &Matrix,
    tol: &Tolerance,
) -> Result<(Matrix, Matrix)> {
    let p = ss.outputs();
    let r = pi.cols();
    let sys = Matrix::vstack(&[
        &Matrix::hstack(&[&-pi, ss.b()]),
        &Matrix::hstack(&[&Matrix::zeros(p, r), ss.d()]),
    ]);
    let rhs = Matrix::vstack(&[&-&(ss.a() * pi), &-&(ss.c() * pi)]);
    let mut x = pencil_min_norm(&sys, &rhs);
    // Two rounds of compensated-residual refinement: the solution norm can
    // reach cond(sigma)^(1/2), so the plain solve's misfit floor of
    // eps * |sys| * |x| is visible in the factorization identity. The
    // compensated residual sees below that floor and the correction is
    // cheap (the SVD is reused through pencil_min_norm's call pattern).
    for _ in 0..2 {
        let resid = sys.mul_sub_compensated(&x, &rhs);
        let delta = pencil_min_norm(&sys, &resid);
        x = &x + &delta;
    }
    let misfit = sys.mul_sub_compensated(&x, &rhs).norm_fro();
    let scale = (sys.norm_fro() + rhs.norm_fro()).max(1.0);
    if misfit > tol.residual_tol * scale {
        return Err(Error::RiccatiFailure(format!(
            "rebalanced kernel pencil infeasible (residual {misfit:.3e})"
        )));
    }
    Ok((x.block(r, 0, ss.inputs(), r), x.block(0, 0, r, r)))
}

/// `alpha` with `B R0 = Pi alpha` in the least-squares sense, refined with
/// compensated residuals (the misfit multiplies the stabilizing feedback,
/// whose norm grows with cond(sigma)^(1/2)).
fn resolve_alpha(ss: &StateSpace, pi: &Matrix, r0: &Matrix, _tol: &Tolerance) -> Matrix {
    let rhs = ss.b() * r0;
    let mut alpha = pencil_min_norm(pi, &rhs);
    for _ in 0..2 {
        let resid = pi.mul_sub_compensated(&alpha, &rhs);
        let delta = pencil_min_norm(pi, &resid);
        alpha = &alpha + &delta;
    }
    alpha
}

/// Minimum-norm least squares at a machine-level pseudoinverse cut.
fn pencil_min_norm(m: &Matrix, rhs: &Matrix) -> Matrix {
    let s = svd(m);
    let noise = 16.0 * f64::EPSILON * m.rows().max(m.cols()) as f64;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let r = s.sigma.iter().take_while(|&&sv| sv > noise * smax).count();
    let ur = s.u.block(0, 0, m.rows(), r);
    let vr = s.v.block(0, 0, m.cols(), r);
    let mut y = &ur.adjoint() * rhs;
    for i in 0..r {
        for j in 0..y.cols() {
            let v = y[(i, j)] / cr(s.sigma[i]);
            y[(i, j)] = v;
        }
    }
    &vr * &y
}

/// Build the tall inner kernel function `K` from the kernel structure:
/// solve the Riccati equation on the kernel block, set the feedback
/// `beta_k = -alpha_k^H sigma - R0^H H_k`, and realize
/// `K = R0 + (H_k + R0 beta_k)(zI - (Lambda_k + alpha_k beta_k))^{-1} alpha_k`
/// (internally in rebalanced coordinates; the function is unaffected).
/// Constant kernel directions (zero alpha columns) ride along as constant
/// columns of `K`. The certificate reports sigma and beta in the staircase
/// coordinates of `ks`.
pub fn kernel_inner(
    ss: &StateSpace,
    ks: &KernelStructure,
    tol: &Tolerance,
) -> Result<(StateSpace, InnerCertificate)> {
    let core = kernel_core(ss, ks, tol)?;
    let stable = eigenvalues(core.k.a())?.iter().all(|z| z.re < 0.0);
    let grid = EvalGrid::for_systems(&[ss, &core.k])?;
    let grid_defect = isometry_defect(&core.k, &grid, tol)?;
    Ok((
        core.k,
        InnerCertificate {
            sigma: core.sigma_raw,
            beta_k: core.beta_raw,
            grid_defect,
            stable,
        },
    ))
}

/// Square inner extension of a certified tall inner function: with `P`
/// solving `P A + A^H P + C^H C = 0`, the completion takes the unitary
/// extension `D~` of `D` and `B~ = -P^{-1} C^H D~`. For the kernel inner
/// function `P` coincides with the Riccati solution.
pub fn square_inner_extension(
    k: &StateSpace,
    cert: &InnerCertificate,
    tol: &Tolerance,
) -> Result<StateSpace> {
    if !cert.stable {
        return Err(Error::NotInner(cert.grid_defect));
    }
    if k.order() == 0 {
        return Ok(StateSpace::constant(unitary_completion(k.d())));
    }
    let q_lyap = &k.c().adjoint() * k.c();
    let p = solve_lyapunov(k.a(), &q_lyap, tol)?;
    completion_with_gramian(k, &p)
}

/// Complete `k` to a square inner function using the given observability
/// Gramian. The kernel pipeline passes its Riccati solution here so both
/// sides of the factorization use the very same matrix.
fn completion_with_gramian(k: &StateSpace, p: &Matrix) -> Result<StateSpace> {
    let d_ext = unitary_completion(k.d());
    if k.order() == 0 {
        return Ok(StateSpace::constant(d_ext));
    }
    let b_ext = -&p.solve(&(&k.c().adjoint() * &d_ext))?;
    StateSpace::new(k.a().clone(), b_ext, k.c().clone(), d_ext)
}

/// Everything the right-side reduction produces.
pub struct RightPipeline {
    pub kernel: KernelStructure,
    pub k: StateSpace,
    pub cert: InnerCertificate,
    pub l: StateSpace,
    pub l0: Matrix,
    pub f_r: StateSpace,
}

/// Run fzk analysis, kernel extraction, staircase, Riccati and extension,
/// and assemble the reduced realization
/// `F_r ~ (A, (B + Pi_k sigma^{-1} H_k^H) L0, C, D L0)`.
pub fn right_pipeline(ss: &StateSpace, tol: &Tolerance, force: bool) -> Result<RightPipeline> {
    let triple = fzk_triple(ss, tol, force)?;
    let (r0, alpha0) = kernel_generators(ss, &triple, tol)?;
    let ks = staircase_partition(&triple, &r0, &alpha0, tol);
    let core = kernel_core(ss, &ks, tol)?;
    let stable = eigenvalues(core.k.a())?.iter().all(|z| z.re < 0.0);
    let grid = EvalGrid::for_systems(&[ss, &core.k])?;
    let grid_defect = isometry_defect(&core.k, &grid, tol)?;
    let cert = InnerCertificate {
        sigma: core.sigma_raw.clone(),
        beta_k: core.beta_raw.clone(),
        grid_defect,
        stable,
    };
    if !stable {
        return Err(Error::RiccatiFailure(
            "kernel block not stabilized".into(),
        ));
    }
    let l = square_inner_extension(&core.k, &cert, tol)?;
    let l0 = l.d().clone();

    // (B + Pi_k sigma^{-1} H_k^H) L0 = B L0 - Pi_k B~, reusing the very
    // input matrix B~ = -P^{-1} C_K^H L0 of the completion so the
    // factorization cancellation is exact by construction.
    let b_r = &(ss.b() * &l0) - &(&core.pi_k * l.b());
    let f_r = StateSpace::new(
        ss.a().clone(),
        b_r,
        ss.c().clone(),
        ss.d() * &l0,
    )?;
    Ok(RightPipeline {
        kernel: ks,
        k: core.k,
        cert,
        l,
        l0,
        f_r,
    })
}

/// Right reduction `F_r = F L`: same finite zeros, trivial kernel module,
/// left-invertible.
pub fn right_reduce(ss: &StateSpace, tol: &Tolerance, force: bool) -> Result<StateSpace> {
    Ok(right_pipeline(ss, tol, force)?.f_r)
}

/// Left reduction `F_l = L' F`: the right pipeline on the adjoint system
/// mapped back.
pub fn left_reduce(ss: &StateSpace, tol: &Tolerance, force: bool) -> Result<StateSpace> {
    let adj = ss.adjoint_system();
    Ok(right_pipeline(&adj, tol, force)?.f_r.adjoint_system())
}

/// Hypothesis flags for degree preservation of the squaring, reported
/// rather than enforced: either the spectrum of A stays in the closed left
/// half plane, or A and -A^H have disjoint spectra together with
/// stabilizability / detectability of the Gramian-shifted pairs.
#[derive(Clone, Debug)]
pub struct HypothesisFlags {
    pub input_was_minimal: bool,
    /// dim <A|B> of the minimal realization and of the reduced one; a gap
    /// is exactly the degree drop of the right reduction.
    pub reach_before: usize,
    pub reach_after: usize,
    pub a_spectrum_closed_lhp: bool,
    pub disjoint_spectra: bool,
    pub stabilizable: bool,
    pub detectable: bool,
    pub degree_preservation_expected: bool,
    pub mcmillan_f: usize,
    pub mcmillan_frl: usize,
    pub degree_preserved: bool,
}

/// Scaled-grid diagnostics for one factorization.
#[derive(Clone, Debug)]
pub struct FactorizationChecks {
    pub inner_defect_right: f64,
    pub inner_defect_left: f64,
    pub unitary_defect_right: f64,
    pub unitary_defect_left: f64,
    pub annihilation_right: f64,
    pub annihilation_left: f64,
    pub reconstruction_fr: f64,
    pub reconstruction_frl: f64,
}

/// The full two-sided factorization `F = L_left* F_rl L*`.
pub struct Factorization {
    /// The minimal realization the pipelines ran on.
    pub minimal: StateSpace,
    pub k: StateSpace,
    pub l: StateSpace,
    pub f_r: StateSpace,
    pub k_left: StateSpace,
    pub l_left: StateSpace,
    pub f_rl: StateSpace,
    pub cert_right: InnerCertificate,
    pub cert_left: InnerCertificate,
    pub kernel_right: KernelStructure,
    /// Kernel structure of the adjoint system (the left data before
    /// conjugate-transposition).
    pub kernel_left_adjoint: KernelStructure,
    pub checks: FactorizationChecks,
    pub hypothesis: HypothesisFlags,
}

impl Factorization {
    /// The spectrum the squared function's finite zero matrix must carry:
    /// the original finite zeros plus the kernel spectra mirrored into the
    /// open right half plane from both sides.
    pub fn predicted_frl_zeros(&self) -> Result<Vec<Complex64>> {
        let mut zs = eigenvalues(&self.kernel_right.lambda_f)?;
        // Right kernel block mirrored into the right half plane:
        // eig(-sigma^{-1} (Lambda_k + alpha_k beta_k)^H sigma), computed
        // from the staircase-coordinate blocks where norms are moderate.
        let closed_r = &self.kernel_right.lambda_k
            + &(&self.kernel_right.alpha_k * &self.cert_right.beta_k);
        for ev in eigenvalues(&closed_r)? {
            zs.push(-ev.conj());
        }
        // Left kernel block mirrored likewise (adjoint-side data).
        let closed_l = &self.kernel_left_adjoint.lambda_k
            + &(&self.kernel_left_adjoint.alpha_k * &self.cert_left.beta_k);
        for ev in eigenvalues(&closed_l)? {
            zs.push(-ev.conj());
        }
        Ok(sort_complex(zs))
    }
}

fn pbh_stabilizable(a: &Matrix, b: &Matrix, tol: &Tolerance) -> Result<bool> {
    let n = a.rows();
    let scale = a.norm_fro().max(b.norm_fro()).max(1.0);
    for ev in eigenvalues(a)? {
        if ev.re < 0.0 {
            continue;
        }
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= ev;
        }
        let pencil = Matrix::hstack(&[&shifted, b]);
        let smin = svd(&pencil).sigma.last().copied().unwrap_or(0.0);
        if smin <= tol.rank_tol.sqrt() * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compute the two-sided squaring of `ss`. The realization is reduced to a
/// minimal one first; hypothesis failures are reported in the flags, never
/// raised.
pub fn squaring(ss: &StateSpace, tol: &Tolerance) -> Result<Factorization> {
    let input_was_minimal = ss.is_minimal(tol);
    let minimal = if input_was_minimal {
        ss.clone()
    } else {
        ss.minimal_realization(tol)
    };

    let right = right_pipeline(&minimal, tol, false)?;
    let adj = minimal.adjoint_system();
    let left_adj = right_pipeline(&adj, tol, false)?;

    let k_left = left_adj.k.adjoint_system();
    let l_left = left_adj.l.adjoint_system();
    // F_rl ~ (A, (B + Pi_k s^-1 H_k^H) L0, L0'(C + H_k'^H s'^-1 Pi_k'), L0' D L0)
    // where the left factors are the adjoint-pipeline blocks mapped back.
    let c_rl = left_adj.f_r.b().adjoint();
    let d_rl = &(&left_adj.l0.adjoint() * minimal.d()) * &right.l0;
    let f_rl = StateSpace::new(
        minimal.a().clone(),
        right.f_r.b().clone(),
        c_rl,
        d_rl,
    )?;

    // Hypothesis checks for degree preservation.
    let a = minimal.a();
    let n = minimal.order();
    let scale = a.norm_fro().max(1.0);
    let poles = minimal.poles()?;
    let a_spectrum_closed_lhp = poles.iter().all(|z| z.re <= tol.residual_tol * scale);
    let mut disjoint = true;
    for x in &poles {
        for y in &poles {
            if (x + y.conj()).norm() <= tol.residual_tol * scale {
                disjoint = false;
            }
        }
    }
    let (stabilizable, detectable) = if disjoint && n > 0 {
        let p = solve_lyapunov(&a.adjoint(), &(minimal.b() * &minimal.b().adjoint()), tol)?;
        // p solves A P + P A^H + B B^H = 0 written as P' A' + A'^H P' + Q.
        let cbar = &(minimal.c() * &p) + &(minimal.d() * &minimal.b().adjoint());
        let st = pbh_stabilizable(a, &cbar.adjoint(), tol)?;
        let qg = solve_lyapunov(a, &(&minimal.c().adjoint() * minimal.c()), tol)?;
        let bbar = &(&qg * minimal.b()) + &(&minimal.c().adjoint() * minimal.d());
        // (B-bar^H, A) detectable <=> (A^H, B-bar) stabilizable.
        let dt = pbh_stabilizable(&a.adjoint(), &bbar, tol)?;
        (st, dt)
    } else {
        (false, false)
    };
    let degree_preservation_expected = a_spectrum_closed_lhp || (disjoint && stabilizable && detectable);

    let mcmillan_f = minimal.order();
    let mcmillan_frl = f_rl.mcmillan_degree(tol);
    let reach_before = minimal.reachable_subspace(tol).dim();
    let reach_after = right.f_r.reachable_subspace(tol).dim();

    // Grid diagnostics.
    let lpc = right.l.para_conjugate();
    let llpc = l_left.para_conjugate();
    let all: Vec<&StateSpace> = vec![
        &minimal, &right.k, &right.l, &right.f_r, &k_left, &l_left, &f_rl, &lpc, &llpc,
    ];
    let grid = EvalGrid::for_systems(&all)?;
    let eye_left = Matrix::identity(minimal.outputs());
    let mut unitary_defect_right = 0.0f64;
    let mut unitary_defect_left = 0.0f64;
    for z in grid.imaginary_axis_points() {
        let kv = right.k.eval(z, tol)?;
        let lv = right.l.eval(z, tol)?;
        let klv = Matrix::hstack(&[&kv, &lv]);
        let d = (&(&klv.adjoint() * &klv) - &Matrix::identity(klv.cols())).norm_fro();
        unitary_defect_right = unitary_defect_right.max(d / klv.norm_fro().powi(2).max(1.0));

        let kvl = k_left.eval(z, tol)?;
        let lvl = l_left.eval(z, tol)?;
        let stacked = Matrix::vstack(&[&kvl, &lvl]);
        let d = (&(&stacked * &stacked.adjoint()) - &eye_left).norm_fro();
        unitary_defect_left = unitary_defect_left.max(d / stacked.norm_fro().powi(2).max(1.0));
    }

    let mut annihilation_right = 0.0f64;
    let mut annihilation_left = 0.0f64;
    let mut reconstruction_fr = 0.0f64;
    let mut reconstruction_frl = 0.0f64;
    for &z in grid.points() {
        let fv = minimal.eval(z, tol)?;
        let kv = right.k.eval(z, tol)?;
        annihilation_right = annihilation_right
            .max((&fv * &kv).norm_fro() / (fv.norm_fro().max(1.0) * kv.norm_fro().max(1.0)));
        let kvl = k_left.eval(z, tol)?;
        annihilation_left = annihilation_left
            .max((&kvl * &fv).norm_fro() / (fv.norm_fro().max(1.0) * kvl.norm_fro().max(1.0)));

        let frv = right.f_r.eval(z, tol)?;
        let lpcv = lpc.eval(z, tol)?;
        let rec1 = &frv * &lpcv;
        reconstruction_fr =
            reconstruction_fr.max((&rec1 - &fv).norm_fro() / fv.norm_fro().max(1.0));

        let frlv = f_rl.eval(z, tol)?;
        let llpcv = llpc.eval(z, tol)?;
        let rec2 = &(&llpcv * &frlv) * &lpcv;
        reconstruction_frl =
            reconstruction_frl.max((&rec2 - &fv).norm_fro() / fv.norm_fro().max(1.0));
    }

    Ok(Factorization {
        checks: FactorizationChecks {
            inner_defect_right: right.cert.grid_defect,
            inner_defect_left: left_adj.cert.grid_defect,
            unitary_defect_right,
            unitary_defect_left,
            annihilation_right,
            annihilation_left,
            reconstruction_fr,
            reconstruction_frl,
        },
        hypothesis: HypothesisFlags {
            input_was_minimal,
            reach_before,
            reach_after,
            a_spectrum_closed_lhp,
            disjoint_spectra: disjoint,
            stabilizable,
            detectable,
            degree_preservation_expected,
            mcmillan_f,
            mcmillan_frl,
            degree_preserved: mcmillan_f == mcmillan_frl,
        },
        minimal,
        k: right.k,
        l: right.l,
        f_r: right.f_r,
        k_left,
        l_left,
        f_rl,
        cert_right: right.cert,
        cert_left: left_adj.cert,
        kernel_right: right.kernel,
        kernel_left_adjoint: left_adj.kernel,
    })
}

/// Zero structure of a certified tall inner function `Q` with stable `A`
/// and observable `(C, A)`: with `P` the observability Gramian and `B~` the
/// completion input matrix, the maximal solution has
/// `P Im(Pi) = reach(A, B~)^perp`, `H = -D^H C Pi`, and
/// `Lambda = Pi^H (A - B D^H C) Pi`.
pub fn inner_zero_structure(q: &StateSpace, tol: &Tolerance) -> Result<ZeroTriple> {
    if !q.is_observable(tol) {
        return Err(Error::NotObservable);
    }
    if !q.poles()?.iter().all(|z| z.re < 0.0) {
        return Err(Error::NotInner(f64::INFINITY));
    }
    let grid = EvalGrid::for_system(q)?;
    let defect = isometry_defect(q, &grid, tol)?;
    if defect > 1e-6 {
        return Err(Error::NotInner(defect));
    }
    let n = q.order();
    if n == 0 {
        return Ok(ZeroTriple {
            pi: Matrix::zeros(0, 0),
            h: Matrix::zeros(q.inputs(), 0),
            lambda: Matrix::zeros(0, 0),
            residual: 0.0,
        });
    }
    let p = solve_lyapunov(q.a(), &(&q.c().adjoint() * q.c()), tol)?;
    let d_ext = unitary_completion(q.d());
    let b_ext = -&p.solve(&(&q.c().adjoint() * &d_ext))?;
    let ext = StateSpace::new(q.a().clone(), b_ext, q.c().clone(), d_ext)?;
    let reach_ext = ext.reachable_subspace(tol);
    let ortho = ortho_complement(&reach_ext);
    let pre_pi = p.solve(ortho.basis())?;
    let pi = image(&pre_pi, tol).basis().clone();
    let h = -&(&(&q.d().adjoint() * q.c()) * &pi);
    let closed = q.a() - &(&(q.b() * &q.d().adjoint()) * q.c());
    let lambda = &pi.adjoint() * &(&closed * &pi);
    let residual = pencil_residual(q, &pi, &h, &lambda);
    Ok(ZeroTriple { pi, h, lambda, residual })
}

impl Factorization {
    /// JSON bundle of the factor systems plus certificates, the format the
    /// CLI writes next to the per-factor files.
    pub fn certificates_json(&self) -> serde_json::Value {
        json!({
            "right": {
                "inner_defect": self.checks.inner_defect_right,
                "unitary_defect": self.checks.unitary_defect_right,
                "annihilation": self.checks.annihilation_right,
                "stable": self.cert_right.stable,
                "kernel_indices": self.kernel_right.kernel_indices,
            },
            "left": {
                "inner_defect": self.checks.inner_defect_left,
                "unitary_defect": self.checks.unitary_defect_left,
                "annihilation": self.checks.annihilation_left,
                "stable": self.cert_left.stable,
                "kernel_indices": self.kernel_left_adjoint.kernel_indices,
            },
            "reconstruction_fr": self.checks.reconstruction_fr,
            "reconstruction_frl": self.checks.reconstruction_frl,
            "hypothesis": {
                "input_was_minimal": self.hypothesis.input_was_minimal,
                "reach_before": self.hypothesis.reach_before,
                "reach_after": self.hypothesis.reach_after,
                "a_spectrum_closed_lhp": self.hypothesis.a_spectrum_closed_lhp,
                "disjoint_spectra": self.hypothesis.disjoint_spectra,
                "stabilizable": self.hypothesis.stabilizable,
                "detectable": self.hypothesis.detectable,
                "degree_preservation_expected": self.hypothesis.degree_preservation_expected,
                "mcmillan_f": self.hypothesis.mcmillan_f,
                "mcmillan_frl": self.hypothesis.mcmillan_frl,
                "degree_preserved": self.hypothesis.degree_preserved,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ss::grid_distance;
    use crate::zeros::zero_report;

    fn tol() -> Tolerance {
        Tolerance::default()
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

    fn row_structure() -> (StateSpace, KernelStructure) {
        let f = row_example();
        let t = fzk_triple(&f, &tol(), false).unwrap();
        let (r0, a0) = kernel_generators(&f, &t, &tol()).unwrap();
        let ks = staircase_partition(&t, &r0, &a0, &tol());
        (f, ks)
    }

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn worked_example_kernel_inner() {
        let (f, ks) = row_structure();
        let (k, cert) = kernel_inner(&f, &ks, &tol()).unwrap();
        // sigma = sqrt(2) - 1
        assert_eq!(cert.sigma.rows(), 1);
        assert!((cert.sigma[(0, 0)].re - (SQRT2 - 1.0)).abs() < 1e-12);
        // closed loop pole at -sqrt(2)
        let poles = k.poles().unwrap();
        assert!((poles[0] + cr(SQRT2)).norm() < 1e-12);
        assert!(cert.stable);
        assert!(cert.grid_defect < 1e-10);
        // F K = 0 on the grid
        let grid = EvalGrid::for_systems(&[&f, &k]).unwrap();
        assert!(annihilation_defect(&f, &k, &grid, &tol()).unwrap() < 1e-10);
        // K(z) = [-1/(z+sqrt2); 1 - (sqrt2-1)/(z+sqrt2)] up to kernel phase:
        // check values at z = 1.
        let kv = k.eval(cr(1.0), &tol()).unwrap();
        let expect0 = -1.0 / (1.0 + SQRT2);
        let expect1 = 1.0 - (SQRT2 - 1.0) / (1.0 + SQRT2);
        let phase = kv[(1, 0)] / cr(expect1);
        assert!((phase.norm() - 1.0).abs() < 1e-10);
        assert!((kv[(0, 0)] / phase - cr(expect0)).norm() < 1e-10);
    }

    #[test]
    fn worked_example_extension_and_fr() {
        let (f, _) = row_structure();
        let pipe = right_pipeline(&f, &tol(), false).unwrap();
        // [K, L] unitary on the imaginary axis.
        let grid = EvalGrid::for_systems(&[&pipe.k, &pipe.l]).unwrap();
        for z in grid.imaginary_axis_points() {
            let kv = pipe.k.eval(z, &tol()).unwrap();
            let lv = pipe.l.eval(z, &tol()).unwrap();
            let kl = Matrix::hstack(&[&kv, &lv]);
            let defect = (&(&kl.adjoint() * &kl) - &Matrix::identity(2)).norm_fro();
            assert!(defect < 1e-10, "unitary defect {defect}");
        }
        // F_r realization: (-1, -(sqrt2+1), 1, 1)
        let fr = &pipe.f_r;
        assert_eq!(fr.order(), 1);
        assert!((fr.a()[(0, 0)].re + 1.0).abs() < 1e-12);
        assert!((fr.b()[(0, 0)].re + (SQRT2 + 1.0)).abs() < 1e-9);
        assert!((fr.c()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((fr.d()[(0, 0)].re - 1.0).abs() < 1e-9);
        // F_r(z) = (z - sqrt2)/(z + 1) on the grid.
        let target = StateSpace::siso(-1.0, 1.0, -(SQRT2 + 1.0), 1.0);
        let grid = EvalGrid::for_systems(&[fr, &target]).unwrap();
        assert!(grid_distance(fr, &target, &grid, &tol()).unwrap() < 1e-9);
        // Reconstruction F = F_r L*.
        let lpc = pipe.l.para_conjugate();
        let recon = StateSpace::series(fr, &lpc).unwrap();
        let grid = EvalGrid::for_systems(&[&f, &recon]).unwrap();
        assert!(grid_distance(&f, &recon, &grid, &tol()).unwrap() < 1e-9);
        // Finite zero of F_r at +sqrt2; kernel module now trivial.
        let rep = zero_report(fr, &tol(), false).unwrap();
        assert_eq!(rep.dim_z, 1);
        assert!((rep.finite_zeros[0] - cr(SQRT2)).norm() < 1e-9);
        assert_eq!(rep.dim_wker, 0);
    }

    #[test]
    fn empty_kernel_passthrough() {
        let f = StateSpace::siso(-1.0, 1.0, -2.0, 1.0);
        let pipe = right_pipeline(&f, &tol(), false).unwrap();
        assert_eq!(pipe.k.inputs(), 0);
        assert_eq!(pipe.l.inputs(), 1);
        let grid = EvalGrid::for_systems(&[&f, &pipe.f_r]).unwrap();
        assert!(grid_distance(&f, &pipe.f_r, &grid, &tol()).unwrap() < 1e-12);
    }

    #[test]
    fn constant_kernel_completion() {
        let f = StateSpace::constant(Matrix::from_real(&[vec![1.0, 1.0]]));
        let pipe = right_pipeline(&f, &tol(), false).unwrap();
        assert_eq!(pipe.k.order(), 0);
        let kd = pipe.k.d();
        assert!((kd[(0, 0)] + kd[(1, 0)]).norm() < 1e-12);
        let ld = pipe.l.d();
        assert!((ld[(0, 0)] - ld[(1, 0)]).norm() < 1e-12, "completion [1;1]/sqrt2");
        let full = Matrix::hstack(&[kd, ld]);
        assert!((&(&full.adjoint() * &full) - &Matrix::identity(2)).norm_fro() < 1e-12);
    }

    #[test]
    fn squaring_worked_example() {
        let f = row_example();
        let fac = squaring(&f, &tol()).unwrap();
        // Left kernel is trivial: L' = identity, F_rl = F_r.
        assert_eq!(fac.k_left.outputs(), 0);
        assert_eq!(fac.f_rl.inputs(), 1);
        assert_eq!(fac.f_rl.outputs(), 1);
        let target = StateSpace::siso(-1.0, 1.0, -(SQRT2 + 1.0), 1.0);
        let grid = EvalGrid::for_systems(&[&fac.f_rl, &target]).unwrap();
        assert!(grid_distance(&fac.f_rl, &target, &grid, &tol()).unwrap() < 1e-9);
        assert!(fac.hypothesis.degree_preserved);
        assert!(fac.checks.reconstruction_frl < 1e-9);
        // Column version via duality.
        let col = row_example().dual();
        let fac2 = squaring(&col, &tol()).unwrap();
        let grid = EvalGrid::for_systems(&[&fac2.f_rl, &target]).unwrap();
        assert!(grid_distance(&fac2.f_rl, &target, &grid, &tol()).unwrap() < 1e-9);
    }

    #[test]
    fn squaring_of_square_invertible_is_identity_like() {
        let f = StateSpace::siso(-1.0, 1.0, -2.0, 1.0);
        let fac = squaring(&f, &tol()).unwrap();
        assert_eq!(fac.k.inputs(), 0);
        assert_eq!(fac.k_left.outputs(), 0);
        let grid = EvalGrid::for_systems(&[&f, &fac.f_rl]).unwrap();
        assert!(grid_distance(&f, &fac.f_rl, &grid, &tol()).unwrap() < 1e-10);
    }

    #[test]
    fn inner_zero_structure_allpass() {
        // Q(z) = (z - sqrt2)/(z + sqrt2) ~ (-sqrt2, 1, -2 sqrt2, 1)
        let q = StateSpace::siso(-SQRT2, 1.0, -2.0 * SQRT2, 1.0);
        let t = inner_zero_structure(&q, &tol()).unwrap();
        assert_eq!(t.dim(), 1);
        assert!((t.lambda[(0, 0)] - cr(SQRT2)).norm() < 1e-10);
        assert!(t.residual < 1e-8);
        // eig(A - B D^H C) = sqrt2
        let closed = q.a() - &(&(q.b() * &q.d().adjoint()) * q.c());
        assert!((closed[(0, 0)] - cr(SQRT2)).norm() < 1e-12);
    }

    #[test]
    fn inner_zero_structure_of_kernel_inner_is_empty() {
        let (f, ks) = row_structure();
        let (k, _) = kernel_inner(&f, &ks, &tol()).unwrap();
        let t = inner_zero_structure(&k, &tol()).unwrap();
        assert_eq!(t.dim(), 0);
        let rep = zero_report(&k, &tol(), false).unwrap();
        assert_eq!(rep.dim_z, 0);
        assert_eq!(rep.dim_wker, 0);
    }

    #[test]
    fn square_inner_completion_is_empty() {
        // Q(z) = (z - sqrt2)/(z + sqrt2) is already square inner: the
        // extension has no columns left to add.
        let q = StateSpace::siso(-SQRT2, 1.0, -2.0 * SQRT2, 1.0);
        let grid = EvalGrid::for_system(&q).unwrap();
        let cert = InnerCertificate {
            sigma: solve_lyapunov(q.a(), &(&q.c().adjoint() * q.c()), &tol()).unwrap(),
            beta_k: Matrix::zeros(1, 1),
            grid_defect: isometry_defect(&q, &grid, &tol()).unwrap(),
            stable: true,
        };
        assert!(cert.grid_defect < 1e-10);
        let l = square_inner_extension(&q, &cert, &tol()).unwrap();
        assert_eq!(l.inputs(), 0);
        assert_eq!(l.outputs(), 1);
    }

    #[test]
    fn non_inner_rejected() {
        let not_inner = StateSpace::siso(-1.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            inner_zero_structure(&not_inner, &tol()),
            Err(Error::NotInner(_))
        ));
    }
}
