//! Integer and rational helpers shared by every other module.
//!
//! Quantities that index the computation (levels, discriminants, form
//! coefficients) are machine integers; anything that can grow with the
//! weight is a [`BigInt`] or a [`Rat`].

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational, always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `n` or `n/d` (surrounding whitespace allowed).
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

/// Kronecker symbol `(a/n)`, defined for every pair of integers.
///
/// Conventions: `(a/-1) = sgn a` for `a != 0`, `(a/2)` from `a mod 8`, and
/// `(a/0) = 1` iff `a = ±1`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    let mut a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= twos;
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (a/n) for odd n > 0.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    n.sqrt()
}

pub fn is_square(n: i64) -> bool {
    is_square_wide(n as i128)
}

pub fn is_square_wide(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let s = isqrt(n);
    s * s == n
}

pub fn is_squarefree(n: i64) -> bool {
    let mut n = n.unsigned_abs();
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Discriminant of a quadratic field, or 1.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let e = d / 4;
            matches!(e.rem_euclid(4), 2 | 3) && is_squarefree(e)
        }
        _ => false,
    }
}

/// All `0 <= r < 2m` with `r^2 ≡ d (mod 4m)`, ascending.
pub fn sqrt_classes_mod(d: i64, m: i64) -> Vec<i64> {
    assert!(m >= 1, "level must be positive");
    let modulus = 4 * m as i128;
    let target = (d as i128).rem_euclid(modulus);
    (0..2 * m)
        .filter(|&r| (r as i128 * r as i128).rem_euclid(modulus) == target)
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

pub fn ceil_div(a: i128, b: i128) -> i128 {
    -Integer::div_floor(&(-a), &b)
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Positive gcd of the numerators over lcm of the denominators: the
/// smallest positive rational that divides every entry. `None` if all are 0.
pub fn rational_content<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Option<Rat> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        num = num.gcd(&v.numer().abs());
        den = den.lcm(v.denom());
    }
    (!num.is_zero()).then(|| Rat::new(num, den))
}
