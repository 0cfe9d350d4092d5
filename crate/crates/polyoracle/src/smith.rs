//! Smith form over the polynomial ring and the Smith-McMillan form of
//! a matrix fraction N(z)/d(z).

use num_traits::Zero;

use crate::poly::{Poly, Rat};
use crate::polymat::PolyMatrix;

/// Monic invariant factors `s_1 | s_2 | ... | s_r` of a polynomial matrix,
/// by elementary row/column operations with divisibility repair.
pub fn smith_form(m: &PolyMatrix) -> Vec<Poly> {
    let mut w = m.clone();
    let rows = w.rows();
    let cols = w.cols();
    let mut factors = Vec::new();
    let mut t = 0usize;
    while t < rows.min(cols) {
        // Find the nonzero entry of least degree in the trailing block.
        let mut best: Option<(usize, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Some(d) = w[(i, j)].degree() {
                    if best.map_or(true, |(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else {
            break; // trailing block is zero
        };
        w.swap_rows_pub(t, bi);
        w.swap_cols(t, bj);

        'reduce: loop {
            // Clear the pivot column with division steps; a nonzero
            // remainder becomes the new (smaller-degree) pivot.
            for i in t + 1..rows {
                if w[(i, t)].is_zero() {
                    continue;
                }
                let (q, r) = w[(i, t)].div_rem(&w[(t, t)]);
                for j in t..cols {
                    let sub = q.mul(&w[(t, j)]);
                    w[(i, j)] = w[(i, j)].sub(&sub);
                }
                if !r.is_zero() {
                    w.swap_rows_pub(t, i);
                    continue 'reduce;
                }
            }
            // Same for the pivot row.
            for j in t + 1..cols {
                if w[(t, j)].is_zero() {
                    continue;
                }
                let (q, r) = w[(t, j)].div_rem(&w[(t, t)]);
                for i in t..rows {
                    let sub = q.mul(&w[(i, t)]);
                    w[(i, j)] = w[(i, j)].sub(&sub);
                }
                if !r.is_zero() {
                    w.swap_cols(t, j);
                    continue 'reduce;
                }
            }
            // Divisibility: the pivot must divide every remaining entry.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if w[(i, j)].is_zero() {
                        continue;
                    }
                    let (_, r) = w[(i, j)].div_rem(&w[(t, t)]);
                    if !r.is_zero() {
                        // Fold row i into the pivot row and restart.
                        for jj in t..cols {
                            let add = w[(i, jj)].clone();
                            w[(t, jj)] = w[(t, jj)].add(&add);
                        }
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        factors.push(w[(t, t)].monic());
        t += 1;
    }
    factors
}

/// A zero or pole location: an exact rational root, or a squarefree
/// higher-degree factor without rational roots (not necessarily irreducible
/// over Q; exactness is preserved either way).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLoc {
    Rational(Rat),
    Factor(Poly),
}

/// Smith-McMillan data of `F = N / d`: coprime diagonal pairs
/// `eps_i / psi_i` with `eps_i | eps_{i+1}` and `psi_{i+1} | psi_i`, plus
/// the zero and pole factorizations and the normal rank.
#[derive(Clone, Debug)]
pub struct SmithMcMillan {
    pub epsilons: Vec<Poly>,
    pub psis: Vec<Poly>,
    pub zeros: Vec<(RootLoc, usize)>,
    pub poles: Vec<(RootLoc, usize)>,
    pub normal_rank: usize,
}

impl SmithMcMillan {
    /// Total finite zero count with multiplicity.
    pub fn zero_count(&self) -> usize {
        self.epsilons.iter().filter_map(Poly::degree).sum()
    }

    /// Total finite pole count with multiplicity (the McMillan degree for a
    /// proper function).
    pub fn pole_count(&self) -> usize {
        self.psis.iter().filter_map(Poly::degree).sum()
    }
}

pub fn smith_mcmillan(n: &PolyMatrix, d: &Poly) -> SmithMcMillan {
    assert!(!d.is_zero(), "zero denominator");
    let s = smith_form(n);
    let dm = d.monic();
    let mut epsilons = Vec::new();
    let mut psis = Vec::new();
    for si in &s {
        let g = si.gcd(&dm);
        epsilons.push(si.div_exact(&g).monic());
        psis.push(dm.div_exact(&g).monic());
    }
    let mut zero_poly = Poly::one();
    for e in &epsilons {
        zero_poly = zero_poly.mul(e);
    }
    let mut pole_poly = Poly::one();
    for p in &psis {
        pole_poly = pole_poly.mul(p);
    }
    SmithMcMillan {
        normal_rank: epsilons.len(),
        zeros: factor_roots(&zero_poly),
        poles: factor_roots(&pole_poly),
        epsilons,
        psis,
    }
}

/// Squarefree decomposition plus rational-root extraction. Rational roots
/// come out exact; what remains of each squarefree part is reported as a
/// factor with its multiplicity.
pub fn factor_roots(p: &Poly) -> Vec<(RootLoc, usize)> {
    let mut out = Vec::new();
    if p.is_constant() {
        return out;
    }
    for (part, mult) in squarefree_decomposition(p) {
        let (roots, rest) = rational_roots(&part);
        for r in roots {
            out.push((RootLoc::Rational(r), mult));
        }
        if !rest.is_constant() {
            out.push((RootLoc::Factor(rest.monic()), mult));
        }
    }
    out
}

/// Yun-style squarefree decomposition: returns pairs (q_k, k) with
/// `p = c * prod q_k^k`, each `q_k` squarefree.
fn squarefree_decomposition(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let p = p.monic();
    if p.is_constant() {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_exact(&a0);
    let mut c = dp.div_exact(&a0);
    let mut k = 1usize;
    loop {
        let d = c.sub(&b.derivative());
        if d.is_zero() {
            if !b.is_constant() {
                out.push((b.monic(), k));
            }
            break;
        }
        let t = b.gcd(&d);
        if !t.is_constant() {
            out.push((t.clone(), k));
        }
        b = b.div_exact(&t);
        c = d.div_exact(&t);
        k += 1;
        if b.is_constant() {
            break;
        }
    }
    out
}

/// Extract the rational roots of a squarefree polynomial; returns the roots
/// and the root-free cofactor. Divisor enumeration is capped; oversized
/// constant terms leave the factor intact (still exact).
fn rational_roots(p: &Poly) -> (Vec<Rat>, Poly) {
    use num_bigint::BigInt;
    use num_traits::{One, Signed};
    let mut roots = Vec::new();
    let mut work = p.primitive();
    // Pull out z = 0 roots first.
    while !work.is_zero() && work.coeff(0).is_zero() && !work.is_constant() {
        roots.push(Rat::zero());
        let coeffs = work.coeffs()[1..].to_vec();
        work = Poly::from_coeffs(coeffs);
    }
    if work.is_constant() {
        return (roots, work);
    }
    let a0 = work.coeff(0);
    let lead = work.leading();
    let p0: BigInt = a0.numer().abs();
    let pl: BigInt = lead.numer().abs();
    let limit = BigInt::from(1_000_000_000_000i64);
    if p0 > limit || pl > limit {
        return (roots, work);
    }
    let divisors = |v: &BigInt| -> Vec<BigInt> {
        let mut ds = Vec::new();
        let mut k = BigInt::one();
        while &k * &k <= *v {
            if (v % &k).is_zero() {
                ds.push(k.clone());
                ds.push(v / &k);
            }
            k += 1;
        }
        ds.sort();
        ds.dedup();
        ds
    };
    let nums = divisors(&p0);
    let dens = divisors(&pl);
    'outer: loop {
        for num in &nums {
            for den in &dens {
                for sign in [1i64, -1] {
                    let cand = Rat::new(num * BigInt::from(sign), den.clone());
                    if work.eval(&cand).is_zero() {
                        roots.push(cand.clone());
                        work = work.div_exact(&Poly::linear(cand));
                        if work.is_constant() {
                            return (roots, work);
                        }
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    (roots, work)
}
