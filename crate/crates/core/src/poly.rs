//! Homogeneous polynomials in `X, Y` of fixed degree, the unimodular
//! `GL(2,Z)` action on them, and the bracket pairing
//! `[P1 | P2] = sum_l (-1)^l binom(w,l)^-1 a_l b_{w-l}`.
//!
//! Coefficient `l` of a [`HomPoly`] is the coefficient of `X^l Y^(w-l)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{factorial, parse_rat, rat, Rat};
use crate::error::{Error, Result};
use crate::modsym::Cusp;
use crate::qf::BinaryQF;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomPoly {
    coeffs: Vec<Rat>,
}

impl HomPoly {
    pub fn zero(degree: usize) -> Self {
        HomPoly { coeffs: vec![Rat::zero(); degree + 1] }
    }

    pub fn one() -> Self {
        HomPoly { coeffs: vec![Rat::one()] }
    }

    /// `X^x_exp Y^(degree - x_exp)`.
    pub fn monomial(degree: usize, x_exp: usize) -> Self {
        assert!(x_exp <= degree);
        let mut p = Self::zero(degree);
        p.coeffs[x_exp] = Rat::one();
        p
    }

    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a degree-w polynomial has w+1 coefficients");
        HomPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub(crate) fn from_big(coeffs: Vec<BigInt>) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(Rat::from_integer).collect())
    }

    /// `(x Y - X)^w`, the polynomial that makes the bracket evaluate at `x`.
    pub fn evaluator(degree: usize, x: &Rat) -> Self {
        let lin = HomPoly::from_coeffs(vec![x.clone(), rat(-1)]);
        (0..degree).fold(HomPoly::one(), |acc, _| &acc * &lin)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `P(alpha, 1)` for finite `alpha`, `P(1, 0)` at infinity.
    pub fn eval(&self, alpha: &Cusp) -> Rat {
        if alpha.is_infinity() {
            return self.coeffs[self.degree()].clone();
        }
        let x = Rat::new(alpha.p().into(), alpha.q().into());
        self.eval_at(&x)
    }

    pub fn eval_at(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    /// `(A . P)(X, Y) = P(A^-1 (X, Y)^T)`.
    pub fn act(&self, a: &Mat2) -> HomPoly {
        let w = self.degree();
        let det = a.det();
        // A^-1 = det * [[d, -b], [-c, a]] since det = ±1.
        let x_img = [BigInt::from(-a.b * det), BigInt::from(a.d * det)];
        let y_img = [BigInt::from(a.a * det), BigInt::from(-a.c * det)];
        let x_pows = linear_powers(&x_img, w);
        let y_pows = linear_powers(&y_img, w);
        let mut out = vec![Rat::zero(); w + 1];
        for (l, coeff) in self.coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let prod = int_mul(&x_pows[l], &y_pows[w - l]);
            for (i, v) in prod.into_iter().enumerate() {
                if !v.is_zero() {
                    out[i] += coeff * Rat::from_integer(v);
                }
            }
        }
        HomPoly { coeffs: out }
    }

    /// Text form `[c0,c1,...]`, ascending X exponent.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| format!("expected [..], got {text:?}"))?;
        let coeffs = inner
            .split(',')
            .map(|s| parse_rat(s).ok_or_else(|| format!("bad coefficient {:?}", s.trim())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(HomPoly::from_coeffs(coeffs))
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", crate::arith::fmt_rat(c))?;
        }
        write!(f, "]")
    }
}

impl Add for &HomPoly {
    type Output = HomPoly;
    fn add(self, rhs: &HomPoly) -> HomPoly {
        assert_eq!(self.degree(), rhs.degree());
        HomPoly { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &HomPoly {
    type Output = HomPoly;
    fn sub(self, rhs: &HomPoly) -> HomPoly {
        self + &(-rhs)
    }
}

impl Neg for &HomPoly {
    type Output = HomPoly;
    fn neg(self) -> HomPoly {
        HomPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &HomPoly {
    type Output = HomPoly;
    fn mul(self, rhs: &HomPoly) -> HomPoly {
        let mut out = vec![Rat::zero(); self.degree() + rhs.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        HomPoly { coeffs: out }
    }
}

impl Mul<&Rat> for &HomPoly {
    type Output = HomPoly;
    fn mul(self, rhs: &Rat) -> HomPoly {
        HomPoly { coeffs: self.coeffs.iter().map(|c| c * rhs).collect() }
    }
}

/// Integer 2x2 matrix with determinant ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat2 {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { a, b, c, d });
        }
        Ok(Mat2 { a, b, c, d })
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2 { a: self.d * det, b: -self.b * det, c: -self.c * det, d: self.a * det }
    }

    /// Mobius action on a cusp.
    pub fn apply(&self, s: &Cusp) -> Cusp {
        let (p, q) = (s.p() as i128, s.q() as i128);
        let num = self.a as i128 * p + self.b as i128 * q;
        let den = self.c as i128 * p + self.d as i128 * q;
        Cusp::from_wide(num, den)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// The bracket pairing, computed over the common denominator `w!`.
pub fn bracket(p1: &HomPoly, p2: &HomPoly) -> Result<Rat> {
    let w = p1.degree();
    if w != p2.degree() {
        return Err(Error::DegreeMismatch(w, p2.degree()));
    }
    let weights = bracket_weights(w);
    let mut acc = Rat::zero();
    for (l, weight) in weights.iter().enumerate() {
        let (a, b) = (&p1.coeffs[l], &p2.coeffs[w - l]);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc += a * b * Rat::from_integer(weight.clone());
    }
    Ok(acc / Rat::from_integer(factorial(w)))
}

/// `(-1)^l l! (w-l)!`, so that `binom(w,l)^-1 (-1)^l = weights[l] / w!`.
pub(crate) fn bracket_weights(w: usize) -> Vec<BigInt> {
    (0..=w)
        .map(|l| {
            let v = factorial(l) * factorial(w - l);
            if l % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// `(a X^2 + b XY + c Y^2)^e`.
pub fn qf_power(q: &BinaryQF, e: usize) -> HomPoly {
    HomPoly::from_big(qf_power_int(q, e))
}

/// Integer coefficients of `Q^e`, ascending X exponent.
pub(crate) fn qf_power_int(q: &BinaryQF, e: usize) -> Vec<BigInt> {
    let (a, b, c) = (BigInt::from(q.a), BigInt::from(q.b), BigInt::from(q.c));
    let mut cur = vec![BigInt::one()];
    for _ in 0..e {
        let n = cur.len();
        let mut next = vec![BigInt::zero(); n + 2];
        for (i, v) in cur.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            next[i] += v * &c;
            next[i + 1] += v * &b;
            next[i + 2] += v * &a;
        }
        cur = next;
    }
    cur
}

/// Powers `0..=n` of the linear form `lin[0] Y + lin[1] X`.
fn linear_powers(lin: &[BigInt; 2], n: usize) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(vec![BigInt::one()]);
    for i in 0..n {
        out.push(int_mul(&out[i], lin));
    }
    out
}

fn int_mul(x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}
