//! Exact univariate polynomials over the rationals, ascending coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact scalar: arbitrary-precision rational, reduced, positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse "p/q" or a plain integer string.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(BigRational::new(p, q))
    } else {
        let p: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(p))
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good enough for comparison layers: quotient of big-int floats with a
    // fallback through string parsing for extreme magnitudes.
    let num = r.numer();
    let den = r.denom();
    let nf = num.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = den.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// Polynomial with exact rational coefficients, ascending degree, trailing
/// zeros trimmed (the zero polynomial has an empty coefficient list).
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `z`
    pub fn z() -> Self {
        Poly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// `z - a`
    pub fn linear(a: Rat) -> Self {
        Poly::from_coeffs(vec![-a, Rat::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Poly::from_coeffs(cs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lead = self.leading();
        Poly::from_coeffs(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::from_coeffs(coeffs)
    }

    /// Euclidean division: `self = q * div + r` with `deg r < deg div`.
    pub fn div_rem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        let lead = div.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let factor = &rem[k] / &lead;
            if !factor.is_zero() {
                quot[k - dd] = factor.clone();
                for j in 0..=dd {
                    let delta = &factor * &div.coeffs[j];
                    rem[k - dd + j] -= delta;
                }
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Exact division; panics when the remainder is nonzero.
    pub fn div_exact(&self, div: &Poly) -> Poly {
        let (q, r) = self.div_rem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat_int(i as i64 + 1))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Primitive integer content removed: returns the polynomial scaled so
    /// coefficients are coprime integers with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        use num_bigint::BigInt;
        if self.is_zero() {
            return Poly::zero();
        }
        let mut lcm_den = BigInt::one();
        for c in &self.coeffs {
            lcm_den = lcm(&lcm_den, c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm_den / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = gcd_int(&g, v);
        }
        if g.is_zero() {
            return Poly::zero();
        }
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let g = g * sign;
        Poly::from_coeffs(
            ints.iter()
                .map(|v| BigRational::from_integer(v / &g))
                .collect(),
        )
    }
}

fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    a / gcd_int(a, b) * b
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_round_trip() {
        let a = Poly::from_ints(&[1, 2, 1]); // (z+1)^2
        let b = Poly::from_ints(&[1, 1]); // z+1
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q, b);
        assert_eq!(a.gcd(&b), b.monic());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = Poly::from_ints(&[-1, 1]);
        let b = Poly::from_ints(&[1, 1]);
        assert_eq!(a.gcd(&b), Poly::one());
    }

    #[test]
    fn eval_and_derivative() {
        let p = Poly::from_ints(&[1, 0, 3]); // 3z^2+1
        assert_eq!(p.eval(&rat_int(2)), rat_int(13));
        assert_eq!(p.derivative(), Poly::from_ints(&[0, 6]));
    }

    #[test]
    fn primitive_normalization() {
        let p = Poly::from_coeffs(vec![rat(2, 3), rat(4, 3)]);
        assert_eq!(p.primitive(), Poly::from_ints(&[1, 2]));
        let q = Poly::from_ints(&[2, -4]);
        assert_eq!(q.primitive(), Poly::from_ints(&[-1, 2]));
    }
}
