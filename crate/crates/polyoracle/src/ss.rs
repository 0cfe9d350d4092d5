//! Exact rational state-space data and the conversion to a polynomial
//! matrix fraction `F(z) = N(z) / d(z)` by Faddeev-LeVerrier.

use num_traits::{One, Zero};

use crate::poly::{rat_int, Poly, Rat};
use crate::polymat::PolyMatrix;
use crate::ratmat::RatMatrix;

#[derive(Clone, Debug)]
pub struct RationalStateSpace {
    a: RatMatrix,
    b: RatMatrix,
    c: RatMatrix,
    d: RatMatrix,
}

impl RationalStateSpace {
    pub fn new(a: RatMatrix, b: RatMatrix, c: RatMatrix, d: RatMatrix) -> Option<Self> {
        let n = a.rows();
        if a.cols() != n || b.rows() != n || c.cols() != n {
            return None;
        }
        if d.rows() != c.rows() || d.cols() != b.cols() {
            return None;
        }
        Some(RationalStateSpace { a, b, c, d })
    }

    pub fn from_ints(a: &[Vec<i64>], b: &[Vec<i64>], c: &[Vec<i64>], d: &[Vec<i64>]) -> Option<Self> {
        RationalStateSpace::new(
            RatMatrix::from_ints(a),
            RatMatrix::from_ints(b),
            RatMatrix::from_ints(c),
            RatMatrix::from_ints(d),
        )
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    /// Exact evaluation `D + C (zI - A)^{-1} B` at a non-pole rational point.
    pub fn eval(&self, z: &Rat) -> Option<RatMatrix> {
        let n = self.order();
        let mut zia = self.a.scale(&-Rat::one());
        for i in 0..n {
            zia[(i, i)] += z;
        }
        let x = zia.solve(&self.b)?;
        Some(self.d.add(&self.c.mul(&x)))
    }
}

/// `d(z) = det(zI - A)` and `N(z) = C adj(zI - A) B + d(z) D`, exactly.
pub fn ss_to_rational(ss: &RationalStateSpace) -> (PolyMatrix, Poly) {
    let n = ss.order();
    let p = ss.outputs();
    let q = ss.inputs();

    // Faddeev-LeVerrier: M_1 = I, M_{k+1} = A M_k + c_{n-k} I,
    // c_{n-k} = -tr(A M_k)/k; adj(zI - A) = sum M_k z^{n-k}.
    let mut charpoly = vec![Rat::zero(); n + 1];
    charpoly[n] = Rat::one();
    let mut adj_terms: Vec<RatMatrix> = Vec::with_capacity(n);
    let mut m = RatMatrix::identity(n);
    for k in 1..=n {
        adj_terms.push(m.clone());
        let am = ss.a.mul(&m);
        let ck = -am.trace() / rat_int(k as i64);
        charpoly[n - k] = ck.clone();
        let mut next = am;
        for i in 0..n {
            next[(i, i)] += &ck;
        }
        m = next;
    }
    let den = Poly::from_coeffs(charpoly);

    // C adj B, power by power (adj term k carries z^{n-k}).
    let mut num = PolyMatrix::zeros(p, q);
    for (k, term) in adj_terms.iter().enumerate() {
        let power = n - 1 - k;
        let cab = ss.c.mul(term).mul(&ss.b);
        for i in 0..p {
            for j in 0..q {
                if !cab[(i, j)].is_zero() {
                    let mono = Poly::from_coeffs(
                        std::iter::repeat(Rat::zero())
                            .take(power)
                            .chain(std::iter::once(cab[(i, j)].clone()))
                            .collect(),
                    );
                    num[(i, j)] = num[(i, j)].add(&mono);
                }
            }
        }
    }
    for i in 0..p {
        for j in 0..q {
            if !ss.d[(i, j)].is_zero() {
                let add = den.scale(&ss.d[(i, j)]);
                num[(i, j)] = num[(i, j)].add(&add);
            }
        }
    }
    (num, den)
}
