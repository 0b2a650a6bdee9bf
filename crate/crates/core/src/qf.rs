//! Integral binary quadratic forms `aX^2 + bXY + cY^2`.

use std::fmt;

use num_integer::Integer;

use crate::arith::{ceil_div, floor_div, is_square_wide, isqrt, kronecker};
use crate::error::{Error, Result};
use crate::modsym::Cusp;
use crate::poly::Mat2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQF {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQF {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQF { a, b, c }
    }

    /// `b^2 - 4ac`.
    pub fn disc(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    /// `Q(x, y)` in wide arithmetic.
    pub fn value(&self, x: i128, y: i128) -> i128 {
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Sign of `Q(p, q)` for `s = p/q`; at infinity this is the sign of `a`.
    pub fn sign_at(&self, s: &Cusp) -> i32 {
        if s.is_infinity() {
            return self.a.signum() as i32;
        }
        self.value(s.p() as i128, s.q() as i128).signum() as i32
    }

    /// `Q o A^-1`, so that `(A.Q)(A.s)` and `Q(s)` agree in sign. This is the
    /// same action as on polynomials.
    pub fn act(&self, m: &Mat2) -> Result<BinaryQF> {
        let (a, b, c, d) = m.entries();
        let det = m.det() as i128;
        // A^-1 = det [[d, -b], [-c, a]]
        let (x0, x1) = (det * d as i128, -det * b as i128);
        let (y0, y1) = (-det * c as i128, det * a as i128);
        let (qa, qb, qc) = (self.a as i128, self.b as i128, self.c as i128);
        let na = qa * x0 * x0 + qb * x0 * y0 + qc * y0 * y0;
        let nb = 2 * qa * x0 * x1 + qb * (x0 * y1 + x1 * y0) + 2 * qc * y0 * y1;
        let nc = qa * x1 * x1 + qb * x1 * y1 + qc * y1 * y1;
        let fit = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("form action"));
        Ok(BinaryQF::new(fit(na)?, fit(nb)?, fit(nc)?))
    }

    pub fn neg(&self) -> BinaryQF {
        BinaryQF::new(-self.a, -self.b, -self.c)
    }
}

impl fmt::Display for BinaryQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// Forms `[a, b, c]` with `m | a`, `a > 0`, `b ≡ r (mod 2m)`, discriminant
/// `disc`, and `Q(s) < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportQuery {
    pub m: i64,
    pub disc: i64,
    pub r: i64,
    pub s: Cusp,
}

/// Lists the (finitely many) forms selected by `query`, ordered by `(a, b)`.
///
/// With `s = p/q` and `t = 2ap + bq` one has `4a Q(p,q) = t^2 - D q^2`, so
/// `Q(s) < 0` forces `4a <= D q^2` and `|t| < sqrt(D q^2)`.
pub fn enumerate_support(query: &SupportQuery) -> Result<Vec<BinaryQF>> {
    let SupportQuery { m, disc, r, s } = *query;
    if m < 1 {
        return Err(Error::InvalidArgument(format!("level must be positive, got {m}")));
    }
    if s.is_infinity() {
        return Err(Error::InvalidArgument("support is undefined at the cusp inf".into()));
    }
    if is_square_wide(disc as i128) {
        return Err(Error::SquareDiscriminant(disc as i128));
    }
    let mut out = Vec::new();
    if disc <= 0 {
        return Ok(out);
    }
    let (p, q) = (s.p() as i128, s.q() as i128);
    let (m, d) = (m as i128, disc as i128);
    let dq2 = d.checked_mul(q * q).ok_or(Error::Overflow("support window"))?;
    let t_max = isqrt(dq2);
    let two_m = 2 * m;
    let r = (r as i128).rem_euclid(two_m);
    let mut a = m;
    while 4 * a <= dq2 {
        let lo = ceil_div(-t_max - 2 * a * p, q);
        let hi = floor_div(t_max - 2 * a * p, q);
        let mut b = lo + (r - lo).rem_euclid(two_m);
        while b <= hi {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let value = a * p * p + b * p * q + c * q * q;
                if value < 0 {
                    let fit = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("support form"));
                    out.push(BinaryQF::new(fit(a)?, fit(b)?, fit(c)?));
                }
            }
            b += two_m;
        }
        a += m;
    }
    Ok(out)
}

/// Largest box half-width tried when searching for a value of the form
/// coprime to the fundamental discriminant.
const GENUS_SEARCH_LIMIT: i128 = 1024;

/// Generalized genus character `chi_{m, d0}` of a form `[m a', b, c]`.
///
/// Zero when `gcd(a', b, c, d0) > 1`. Otherwise `(d0 / n)` for any `n`
/// coprime to `d0` represented by some `[a' N1, b, c N2]` with `N1 N2 = m`.
pub fn genus_character(m: i64, d0: i64, q: &BinaryQF) -> Result<i32> {
    if m < 1 || q.a % m != 0 {
        return Err(Error::InvalidArgument(format!("form {q} is not in level {m}")));
    }
    GenusCharacter::new(m, d0).eval(q)
}

/// `chi_{m, d0}` with the divisors of `m` precomputed.
#[derive(Debug, Clone)]
pub(crate) struct GenusCharacter {
    m: i64,
    d0: i64,
    divisors: Vec<i64>,
}

impl GenusCharacter {
    pub(crate) fn new(m: i64, d0: i64) -> Self {
        let divisors = (1..=m).filter(|n1| m % n1 == 0).collect();
        GenusCharacter { m, d0, divisors }
    }

    /// Assumes `m | q.a`.
    pub(crate) fn eval(&self, q: &BinaryQF) -> Result<i32> {
        let d0 = self.d0;
        let a_red = q.a / self.m;
        if a_red.gcd(&q.b).gcd(&q.c).gcd(&d0) > 1 {
            return Ok(0);
        }
        if d0 == 1 {
            return Ok(1);
        }
        let d0w = d0 as i128;
        let splits = self.divisors.iter().map(|&n1| {
            BinaryQF::new(a_red * n1, q.b, q.c * (self.m / n1))
        });
        // values at (1,0) and (0,1) first: they settle almost every form
        for form in splits.clone() {
            for n in [form.a as i128, form.c as i128] {
                if n != 0 && n.gcd(&d0w) == 1 {
                    return Ok(kronecker(d0, n as i64));
                }
            }
        }
        let mut bound = 1i128;
        while bound <= GENUS_SEARCH_LIMIT {
            for form in splits.clone() {
                for x in -bound..=bound {
                    for y in -bound..=bound {
                        if x.abs() < bound / 2 && y.abs() < bound / 2 {
                            // already covered by the previous box
                            continue;
                        }
                        let n = form.value(x, y);
                        if n != 0 && n.gcd(&d0w) == 1 {
                            let n = i64::try_from(n).map_err(|_| Error::Overflow("genus character"))?;
                            return Ok(kronecker(d0, n));
                        }
                    }
                }
            }
            bound *= 2;
        }
        Err(Error::Invariant(format!(
            "no value of {q} coprime to {d0} found within |x|,|y| <= {GENUS_SEARCH_LIMIT}"
        )))
    }
}
