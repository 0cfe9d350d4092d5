//! State-space realization algebra.
//!
//! A [`StateSpace`] realizes the proper rational matrix
//! `F(z) = D + C (zI - A)^{-1} B`. Realizations with zero states are legal
//! and denote constant functions. Evaluation, the para-hermitian conjugate,
//! duals, cascades, Kalman reduction and the McMillan degree all live here,
//! together with the JSON interchange schema shared with the CLI.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{cr, Matrix, Tolerance};
use crate::schur::eigenvalues;
use crate::subspace::{image, image_with_scale, join, ortho_complement, Subspace};

pub struct StateSpace {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
    pole_cache: std::sync::OnceLock<Vec<Complex64>>,
}

impl Clone for StateSpace {
    fn clone(&self) -> Self {
        StateSpace {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
            pole_cache: self.pole_cache.clone(),
        }
    }
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.c == other.c && self.d == other.d
    }
}

impl std::fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StateSpace")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("c", &self.c)
            .field("d", &self.d)
            .finish()
    }
}

impl StateSpace {
    /// Build a realization, validating dimension compatibility. `A` must be
    /// square; `B`, `C`, `D` must agree with it and with each other.
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() {
            return Err(Error::DimensionMismatch("A must be square".into()));
        }
        if b.rows() != n || c.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows and C has {} cols; both must equal n = {n}",
                b.rows(),
                c.cols()
            )));
        }
        if d.rows() != c.rows() || d.cols() != b.cols() {
            return Err(Error::DimensionMismatch(format!(
                "D is {}x{}, expected {}x{}",
                d.rows(),
                d.cols(),
                c.rows(),
                b.cols()
            )));
        }
        for m in [&a, &b, &c, &d] {
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(StateSpace { a, b, c, d, pole_cache: std::sync::OnceLock::new() })
    }

    /// Constant function `F(z) = D` (zero states).
    pub fn constant(d: Matrix) -> Self {
        let p = d.rows();
        let q = d.cols();
        StateSpace {
            a: Matrix::zeros(0, 0),
            b: Matrix::zeros(0, q),
            c: Matrix::zeros(p, 0),
            d,
            pole_cache: std::sync::OnceLock::new(),
        }
    }

    fn raw(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Self {
        StateSpace {
            a,
            b,
            c,
            d,
            pole_cache: std::sync::OnceLock::new(),
        }
    }

    /// Scalar first-order helper used pervasively in tests.
    pub fn siso(a: f64, b: f64, c: f64, d: f64) -> Self {
        StateSpace::new(
            Matrix::from_real(&[vec![a]]),
            Matrix::from_real(&[vec![b]]),
            Matrix::from_real(&[vec![c]]),
            Matrix::from_real(&[vec![d]]),
        )
        .unwrap()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn c(&self) -> &Matrix {
        &self.c
    }
    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// State dimension.
    pub fn order(&self) -> usize {
        self.a.rows()
    }

    /// Input dimension (columns of the transfer matrix).
    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    /// Output dimension (rows of the transfer matrix).
    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if let Some(cached) = self.pole_cache.get() {
            return Ok(cached.clone());
        }
        let poles = eigenvalues(&self.a)?;
        Ok(self.pole_cache.get_or_init(|| poles).clone())
    }

    /// `F(z) = D + C (zI - A)^{-1} B`. Errors when `z` is within the
    /// residual tolerance of an eigenvalue of `A`.
    pub fn eval(&self, z: Complex64, tol: &Tolerance) -> Result<Matrix> {
        let n = self.order();
        if n == 0 {
            return Ok(self.d.clone());
        }
        let scale = self.a.norm_fro().max(1.0);
        for pole in self.poles()? {
            if (z - pole).norm() <= tol.residual_tol * scale {
                return Err(Error::PoleHit(z));
            }
        }
        let mut zia = -&self.a;
        for i in 0..n {
            zia[(i, i)] += z;
        }
        let x = zia.solve(&self.b)?;
        Ok(&self.d + &(&self.c * &x))
    }

    /// Para-hermitian conjugate `F*(z) = F(-conj(z))^H`, realized as
    /// `(-A^H, -C^H, B^H, D^H)`.
    pub fn para_conjugate(&self) -> StateSpace {
        StateSpace::raw(
            -&self.a.adjoint(),
            -&self.c.adjoint(),
            self.b.adjoint(),
            self.d.adjoint(),
        )
    }

    /// Transposed function: `(A^T, C^T, B^T, D^T)` realizes `F(z)^T`.
    /// Right-side algorithms applied to the dual compute left-side objects.
    pub fn dual(&self) -> StateSpace {
        StateSpace::raw(
            self.a.transpose(),
            self.c.transpose(),
            self.b.transpose(),
            self.d.transpose(),
        )
    }

    /// Hermitian adjoint system `(A^H, C^H, B^H, D^H)`, realizing
    /// `z -> F(conj(z))^H`. This is the conjugated dual; left pipelines run
    /// the right machinery on it and map results back by [`Matrix::adjoint`].
    pub fn adjoint_system(&self) -> StateSpace {
        StateSpace::raw(
            self.a.adjoint(),
            self.c.adjoint(),
            self.b.adjoint(),
            self.d.adjoint(),
        )
    }

    /// Cascade: `series(f, g)` realizes the product `F(z) G(z)` (the output
    /// of `g` feeds `f`), with state dimension n_f + n_g.
    pub fn series(f: &StateSpace, g: &StateSpace) -> Result<StateSpace> {
        if f.inputs() != g.outputs() {
            return Err(Error::DimensionMismatch(format!(
                "series: {} inputs vs {} outputs",
                f.inputs(),
                g.outputs()
            )));
        }
        let nf = f.order();
        let ng = g.order();
        let mut a = Matrix::zeros(nf + ng, nf + ng);
        a.set_block(0, 0, &f.a);
        a.set_block(0, nf, &(&f.b * &g.c));
        a.set_block(nf, nf, &g.a);
        let b = Matrix::vstack(&[&(&f.b * &g.d), &g.b]);
        let c = Matrix::hstack(&[&f.c, &(&f.d * &g.c)]);
        let d = &f.d * &g.d;
        StateSpace::new(a, b, c, d)
    }

    /// Smallest A-invariant subspace containing Im B, by iterated image
    /// growth (stationary within n steps).
    pub fn reachable_subspace(&self, tol: &Tolerance) -> Subspace {
        let mut current = image(&self.b, tol);
        let scale = self.a.norm_fro().max(1.0);
        loop {
            let grown = join(
                &current,
                &image_with_scale(&(&self.a * current.basis()), tol, scale),
            )
            .expect("ambient dims agree");
            if grown.dim() == current.dim() {
                return current;
            }
            current = grown;
        }
    }

    /// Unobservable subspace: orthogonal complement of the reachable
    /// subspace of the adjoint pair `(A^H, C^H)`.
    pub fn unobservable_subspace(&self, tol: &Tolerance) -> Subspace {
        let dual = self.adjoint_system();
        ortho_complement(&dual.reachable_subspace(tol))
    }

    pub fn is_observable(&self, tol: &Tolerance) -> bool {
        self.unobservable_subspace(tol).dim() == 0
    }

    pub fn is_controllable(&self, tol: &Tolerance) -> bool {
        self.reachable_subspace(tol).dim() == self.order()
    }

    pub fn is_minimal(&self, tol: &Tolerance) -> bool {
        self.is_controllable(tol) && self.is_observable(tol)
    }

    /// Kalman reduction: restrict to the reachable subspace, then factor out
    /// the unobservable one (reachability first, deterministically). The
    /// result is reachable and observable and evaluates identically.
    pub fn minimal_realization(&self, tol: &Tolerance) -> StateSpace {
        // Stage 1: restrict to the reachable subspace.
        let reach = self.reachable_subspace(tol);
        let w = reach.basis();
        let a1 = &(&w.adjoint() * &self.a) * w;
        let b1 = &w.adjoint() * &self.b;
        let c1 = &self.c * w;
        let stage1 = StateSpace::raw(a1, b1, c1, self.d.clone());
        // Stage 2: quotient by the unobservable subspace.
        let unobs = stage1.unobservable_subspace(tol);
        let u = ortho_complement(&unobs);
        let ub = u.basis();
        StateSpace::raw(
            &(&ub.adjoint() * &stage1.a) * ub,
            &ub.adjoint() * &stage1.b,
            &stage1.c * ub,
            stage1.d,
        )
    }

    /// McMillan degree: state dimension of the minimal realization.
    pub fn mcmillan_degree(&self, tol: &Tolerance) -> usize {
        self.minimal_realization(tol).order()
    }

    /// Diagonal state rescaling with powers of two (an Osborne-style sweep
    /// over [A, B; C, 0]): the function is bit-for-bit unchanged, but rows
    /// and columns of the realization become commensurate, which protects
    /// rank decisions when a construction leaves B or C badly scaled.
    pub fn balanced_similarity(&self) -> StateSpace {
        let n = self.order();
        let mut d = vec![1.0f64; n];
        for _ in 0..8 {
            let mut moved = false;
            for i in 0..n {
                let mut row = 0.0;
                let mut col = 0.0;
                for j in 0..n {
                    if j != i {
                        row += (self.a[(i, j)].norm() * d[j] / d[i]).powi(2);
                        col += (self.a[(j, i)].norm() * d[i] / d[j]).powi(2);
                    }
                }
                for j in 0..self.inputs() {
                    row += (self.b[(i, j)].norm() / d[i]).powi(2);
                }
                for j in 0..self.outputs() {
                    col += (self.c[(j, i)].norm() * d[i]).powi(2);
                }
                if row == 0.0 || col == 0.0 {
                    continue;
                }
                let factor = (row / col).sqrt().sqrt();
                let factor = 2.0f64.powi(factor.log2().round() as i32);
                if factor != 1.0 {
                    d[i] *= factor;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        // x' = x / d: A' = D^{-1} A D, B' = D^{-1} B, C' = C D.
        let a = Matrix::from_fn(n, n, |i, j| self.a[(i, j)] * cr(d[j] / d[i]));
        let b = Matrix::from_fn(n, self.inputs(), |i, j| self.b[(i, j)] * cr(1.0 / d[i]));
        let c = Matrix::from_fn(self.outputs(), n, |i, j| self.c[(i, j)] * cr(d[j]));
        StateSpace::raw(a, b, c, self.d.clone())
    }
}


/// Build a system from parsed matrix blocks, recovering the column counts
/// that an empty JSON row list cannot carry (a 0 x q matrix serializes as
/// `[]`). n comes from A, p from C's row count, q from B or D.
pub fn assemble_system(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<StateSpace> {
    let n = a.rows();
    let q = if b.rows() > 0 {
        b.cols()
    } else if d.rows() > 0 {
        d.cols()
    } else {
        b.cols()
    };
    // Output count: C rows, or D rows for a constant function written with
    // an empty C (legal only when there are no states to observe).
    let p = if c.rows() > 0 { c.rows() } else { d.rows() };
    if c.rows() == 0 && p > 0 && n > 0 {
        return Err(Error::DimensionMismatch(
            "C is empty but the system has states and outputs".into(),
        ));
    }
    let b = if n == 0 { Matrix::zeros(0, q) } else { b };
    let c = if c.rows() == 0 { Matrix::zeros(p, n) } else { c };
    StateSpace::new(a, b, c, d)
}

/// Evaluation points for residual certificates: the origin, the four points
/// +-1 +- i, and 17 imaginary-axis points with log-spaced frequencies,
/// filtered to stay clear of the poles of every system under test.
#[derive(Clone, Debug)]
pub struct EvalGrid {
    points: Vec<Complex64>,
}

const POLE_CLEARANCE: f64 = 1e-6;

impl EvalGrid {
    pub fn for_system(ss: &StateSpace) -> Result<EvalGrid> {
        EvalGrid::for_systems(&[ss])
    }

    /// Grid safe for every listed system: candidate points within 1e-6 of
    /// any pole are dropped (the grid is regenerated per system set).
    pub fn for_systems(systems: &[&StateSpace]) -> Result<EvalGrid> {
        let mut poles = Vec::new();
        for ss in systems {
            poles.extend(ss.poles()?);
        }
        let mut candidates = vec![
            cr(0.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
        ];
        for k in 0..17 {
            let omega = 10f64.powf(-2.0 + 4.0 * k as f64 / 16.0);
            candidates.push(Complex64::new(0.0, omega));
        }
        let points: Vec<Complex64> = candidates
            .into_iter()
            .filter(|z| poles.iter().all(|p| (z - p).norm() > POLE_CLEARANCE))
            .collect();
        Ok(EvalGrid { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// The subset on the imaginary axis, where inner certificates hold.
    pub fn imaginary_axis_points(&self) -> Vec<Complex64> {
        self.points.iter().copied().filter(|z| z.re == 0.0).collect()
    }
}

/// Largest relative deviation of `F(z)` from `G(z)` over the grid, scaled by
/// the larger of 1 and the local norms.
pub fn grid_distance(
    f: &StateSpace,
    g: &StateSpace,
    grid: &EvalGrid,
    tol: &Tolerance,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in grid.points() {
        let fv = f.eval(z, tol)?;
        let gv = g.eval(z, tol)?;
        let scale = fv.norm_fro().max(gv.norm_fro()).max(1.0);
        worst = worst.max((&fv - &gv).norm_fro() / scale);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// JSON schema: {"A": [[entry]], "B": ..., "C": ..., "D": ...}
// where entry is a real number or a two-element [re, im] array. Rationals
// written as "p/q" strings are accepted on input (the CLI keeps the exact
// mirror; here they land as the rounded f64 quotient).
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawSystem {
    #[serde(rename = "A")]
    a: Vec<Vec<RawEntry>>,
    #[serde(rename = "B")]
    b: Vec<Vec<RawEntry>>,
    #[serde(rename = "C")]
    c: Vec<Vec<RawEntry>>,
    #[serde(rename = "D")]
    d: Vec<Vec<RawEntry>>,
    #[serde(rename = "labels", skip_serializing_if = "Option::is_none")]
    labels: Option<serde_json::Value>,
}

#[derive(Clone)]
enum RawEntry {
    Real(f64),
    Complex(f64, f64),
    Rational(String),
}

impl Serialize for RawEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RawEntry::Real(x) => x.serialize(s),
            RawEntry::Complex(re, im) => [*re, *im].serialize(s),
            RawEntry::Rational(txt) => txt.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for RawEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => {
                let x = n.as_f64().ok_or_else(|| D::Error::custom("bad number"))?;
                Ok(RawEntry::Real(x))
            }
            serde_json::Value::Array(items) if items.len() == 2 => {
                let re = items[0].as_f64().ok_or_else(|| D::Error::custom("bad re"))?;
                let im = items[1].as_f64().ok_or_else(|| D::Error::custom("bad im"))?;
                Ok(RawEntry::Complex(re, im))
            }
            serde_json::Value::String(s) => Ok(RawEntry::Rational(s)),
            _ => Err(D::Error::custom("entry must be a number, [re, im], or \"p/q\"")),
        }
    }
}

/// Parse a "p/q" (or plain integer) string to f64.
pub fn parse_rational_str(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().ok()?;
        let q: f64 = q.trim().parse().ok()?;
        if q == 0.0 {
            return None;
        }
        Some(p / q)
    } else {
        s.parse().ok()
    }
}

fn entry_to_complex(e: &RawEntry) -> Result<Complex64> {
    let z = match e {
        RawEntry::Real(x) => cr(*x),
        RawEntry::Complex(re, im) => Complex64::new(*re, *im),
        RawEntry::Rational(s) => cr(parse_rational_str(s).ok_or_else(|| {
            Error::DimensionMismatch(format!("cannot parse rational entry {s:?}"))
        })?),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(z)
}

fn rows_to_matrix(rows: &[Vec<RawEntry>], what: &str) -> Result<Matrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch(format!("{what} has ragged rows")));
    }
    let mut m = Matrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            m[(i, j)] = entry_to_complex(e)?;
        }
    }
    Ok(m)
}

fn matrix_to_rows(m: &Matrix) -> Vec<Vec<RawEntry>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    if z.im == 0.0 {
                        RawEntry::Real(z.re)
                    } else {
                        RawEntry::Complex(z.re, z.im)
                    }
                })
                .collect()
        })
        .collect()
}

impl StateSpace {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RawSystem {
            a: matrix_to_rows(&self.a),
            b: matrix_to_rows(&self.b),
            c: matrix_to_rows(&self.c),
            d: matrix_to_rows(&self.d),
            labels: None,
        })
        .expect("serialization cannot fail")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<StateSpace> {
        let raw: RawSystem = serde_json::from_value(v.clone())
            .map_err(|e| Error::DimensionMismatch(format!("bad system JSON: {e}")))?;
        assemble_system(
            rows_to_matrix(&raw.a, "A")?,
            rows_to_matrix(&raw.b, "B")?,
            rows_to_matrix(&raw.c, "C")?,
            rows_to_matrix(&raw.d, "D")?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// (z-1)/(z+1)
    fn scalar_example() -> StateSpace {
        StateSpace::siso(-1.0, 1.0, -2.0, 1.0)
    }

    /// [1, 1/(z+1)]
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
    fn eval_scalar_at_origin() {
        let f = scalar_example();
        let v = f.eval(cr(0.0), &tol()).unwrap();
        assert!((v[(0, 0)].re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eval_constant_everywhere() {
        let f = StateSpace::new(
            Matrix::from_real(&[vec![-3.0]]),
            Matrix::from_real(&[vec![1.0]]),
            Matrix::zeros(1, 1),
            Matrix::from_real(&[vec![7.0]]),
        )
        .unwrap();
        for z in [cr(0.0), c(2.0, 1.0), c(-0.5, 3.0)] {
            assert!((f.eval(z, &tol()).unwrap()[(0, 0)].re - 7.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eval_row_example() {
        let f = row_example();
        let v = f.eval(cr(1.0), &tol()).unwrap();
        assert!((v[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((v[(0, 1)].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn eval_pole_hit() {
        let f = scalar_example();
        assert!(matches!(f.eval(cr(-1.0), &tol()), Err(Error::PoleHit(_))));
    }

    #[test]
    fn para_conjugate_matches_definition() {
        let f = StateSpace::new(
            Matrix::from_rows(&[vec![c(-1.0, 0.3)]]),
            Matrix::from_rows(&[vec![c(1.0, -0.2), c(0.5, 0.0)]]),
            Matrix::from_rows(&[vec![c(2.0, 0.1)]]),
            Matrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)]]),
        )
        .unwrap();
        let pc = f.para_conjugate();
        let grid = EvalGrid::for_systems(&[&f, &pc]).unwrap();
        for &z in grid.points() {
            let lhs = pc.eval(z, &tol()).unwrap();
            let rhs = f.eval(-z.conj(), &tol()).unwrap().adjoint();
            assert!((&lhs - &rhs).norm_fro() < 1e-10);
        }
    }

    #[test]
    fn para_conjugate_involution_on_grid() {
        let f = scalar_example();
        let ff = f.para_conjugate().para_conjugate();
        let grid = EvalGrid::for_system(&f).unwrap();
        assert!(grid_distance(&f, &ff, &grid, &tol()).unwrap() < 1e-12);
    }

    #[test]
    fn dual_is_entrywise_transpose_involution() {
        let f = row_example();
        let dd = f.dual().dual();
        assert_eq!(&dd, &f);
        let d = f.dual();
        assert_eq!(d.inputs(), 1);
        assert_eq!(d.outputs(), 2);
    }

    #[test]
    fn series_multiplies_on_grid() {
        let f = scalar_example();
        let g = StateSpace::siso(-2.0, 1.0, 1.0, 0.5);
        let fg = StateSpace::series(&f, &g).unwrap();
        assert_eq!(fg.order(), 2);
        let grid = EvalGrid::for_systems(&[&f, &g, &fg]).unwrap();
        for &z in grid.points() {
            let lhs = fg.eval(z, &tol()).unwrap();
            let rhs = &f.eval(z, &tol()).unwrap() * &g.eval(z, &tol()).unwrap();
            assert!((&lhs - &rhs).norm_fro() < 1e-11);
        }
    }

    #[test]
    fn series_with_constant_identity() {
        let f = row_example();
        let id = StateSpace::constant(Matrix::identity(2));
        let fid = StateSpace::series(&f, &id).unwrap();
        let grid = EvalGrid::for_systems(&[&f, &fid]).unwrap();
        assert!(grid_distance(&f, &fid, &grid, &tol()).unwrap() < 1e-13);
    }

    #[test]
    fn reachability_cases() {
        let none = StateSpace::new(
            Matrix::from_real(&[vec![-1.0]]),
            Matrix::zeros(1, 1),
            Matrix::from_real(&[vec![1.0]]),
            Matrix::zeros(1, 1),
        )
        .unwrap();
        assert_eq!(none.reachable_subspace(&tol()).dim(), 0);

        assert_eq!(scalar_example().reachable_subspace(&tol()).dim(), 1);

        let decoupled = StateSpace::new(
            Matrix::from_real(&[vec![1.0, 0.0], vec![0.0, 2.0]]),
            Matrix::from_real(&[vec![1.0], vec![0.0]]),
            Matrix::from_real(&[vec![1.0, 1.0]]),
            Matrix::zeros(1, 1),
        )
        .unwrap();
        let r = decoupled.reachable_subspace(&tol());
        assert_eq!(r.dim(), 1);
        assert!((r.basis()[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reachable_subspace_is_a_invariant() {
        let f = row_example();
        let r = f.reachable_subspace(&tol());
        assert!(r.contains_columns(&(f.a() * r.basis()), 1e-10));
    }

    #[test]
    fn minimal_realization_degrees() {
        assert_eq!(scalar_example().mcmillan_degree(&tol()), 1);
        assert_eq!(StateSpace::constant(Matrix::identity(2)).mcmillan_degree(&tol()), 0);

        // Pad with an unreachable stable mode: degree unchanged.
        let f = scalar_example();
        let padded = StateSpace::new(
            Matrix::from_real(&[vec![-1.0, 0.0], vec![0.0, -5.0]]),
            Matrix::from_real(&[vec![1.0], vec![0.0]]),
            Matrix::from_real(&[vec![-2.0, 1.0]]),
            Matrix::from_real(&[vec![1.0]]),
        )
        .unwrap();
        assert_eq!(padded.mcmillan_degree(&tol()), 1);
        let min = padded.minimal_realization(&tol());
        let grid = EvalGrid::for_systems(&[&padded, &min]).unwrap();
        assert!(grid_distance(&padded, &min, &grid, &tol()).unwrap() < 1e-10);
        assert_eq!(f.mcmillan_degree(&tol()), f.dual().mcmillan_degree(&tol()));
    }

    #[test]
    fn json_round_trip_bit_exact() {
        let f = StateSpace::new(
            Matrix::from_rows(&[vec![c(-1.5, 0.0)]]),
            Matrix::from_rows(&[vec![c(0.1, 0.0), c(1.0, -2.0)]]),
            Matrix::from_rows(&[vec![c(std::f64::consts::PI, 0.0)]]),
            Matrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)]]),
        )
        .unwrap();
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back = StateSpace::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(&back, &f);
    }

    #[test]
    fn json_constant_system_keeps_dims() {
        // D-only function written with empty A, B, C.
        let v: serde_json::Value =
            serde_json::from_str(r#"{"A": [], "B": [], "C": [], "D": [[1, 0], [0, 1]]}"#).unwrap();
        let f = StateSpace::from_json(&v).unwrap();
        assert_eq!((f.order(), f.inputs(), f.outputs()), (0, 2, 2));
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let back = StateSpace::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(&back, &f);
    }

    #[test]
    fn json_accepts_rational_strings() {
        let v: serde_json::Value = serde_json::from_str(
            r#"{"A": [["-1/1"]], "B": [["1/2", 1]], "C": [[1]], "D": [[0.5, "3/4"]]}"#,
        )
        .unwrap();
        let f = StateSpace::from_json(&v).unwrap();
        assert!((f.b()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((f.d()[(0, 1)].re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn grid_avoids_poles() {
        // Pole at the grid frequency i (omega = 1 is on the log grid).
        let f = StateSpace::new(
            Matrix::from_rows(&[vec![c(0.0, 1.0)]]),
            Matrix::from_rows(&[vec![c(1.0, 0.0)]]),
            Matrix::from_rows(&[vec![c(1.0, 0.0)]]),
            Matrix::from_rows(&[vec![c(0.0, 0.0)]]),
        )
        .unwrap();
        let grid = EvalGrid::for_system(&f).unwrap();
        for &z in grid.points() {
            assert!((z - c(0.0, 1.0)).norm() > 1e-6);
            assert!(f.eval(z, &tol()).is_ok());
        }
    }
}
