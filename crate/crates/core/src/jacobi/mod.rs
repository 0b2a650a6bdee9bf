//! Fourier coefficients `c(Δ, r)` of the Jacobi form attached to a cuspidal
//! modular symbol, relative to an admissible pair `(Δ0, r0)`.

mod batch;
mod table;

use std::fmt;

use num_traits::Zero;

use crate::arith::{is_fundamental_discriminant, is_prime, is_square_wide, rat, sqrt_classes_mod, Rat};
use crate::error::{Error, Result};
use crate::modsym::{Epsilon, ModularSymbol};
use crate::poly::{bracket, qf_power};
use crate::qf::{enumerate_support, GenusCharacter, SupportQuery};

pub use batch::batch_table;
pub use table::{parse_pair_text, Cell, CoefficientTable, Entry, Mismatch, Provenance, VerifyReport};

/// `(Δ0, r0)` with `Δ0` a fundamental discriminant of sign `ε` and
/// `Δ0 ≡ r0^2 (mod 4m)`, `0 <= r0 < 2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissiblePair {
    m: i64,
    d0: i64,
    r0: i64,
}

impl AdmissiblePair {
    pub fn new(m: i64, eps: Epsilon, d0: i64, r0: i64) -> Result<Self> {
        let invalid = |reason| Error::InvalidPair { m, eps: eps.value(), d0, r0, reason };
        if m < 1 {
            return Err(invalid("index must be positive"));
        }
        if !is_fundamental_discriminant(d0) {
            return Err(invalid("not a fundamental discriminant"));
        }
        if d0.signum() != eps.value() {
            return Err(invalid("sign of the discriminant differs from eps"));
        }
        if !(0..2 * m).contains(&r0) {
            return Err(invalid("r0 must lie in [0, 2m)"));
        }
        if !sqrt_classes_mod(d0, m).contains(&r0) {
            return Err(invalid("d0 is not congruent to r0^2 mod 4m"));
        }
        Ok(AdmissiblePair { m, d0, r0 })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn d0(&self) -> i64 {
        self.d0
    }

    pub fn r0(&self) -> i64 {
        self.r0
    }

    pub fn eps(&self) -> Epsilon {
        if self.d0 > 0 {
            Epsilon::Plus
        } else {
            Epsilon::Minus
        }
    }

    /// Whether the formula cannot be used at `Δ` with this pair.
    pub fn is_na(&self, delta: i64) -> bool {
        is_square_wide(delta as i128 * self.d0 as i128)
    }
}

impl fmt::Display for AdmissiblePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.d0, self.r0)
    }
}

/// Admissible pairs for the `count` fundamental discriminants of sign `eps`
/// with smallest absolute value, each followed by all its `r0` classes.
/// `Δ0 = 1` is only offered when `allow_unit` is set.
pub fn find_pairs(m: i64, eps: Epsilon, count: usize, allow_unit: bool) -> Vec<AdmissiblePair> {
    assert!(m >= 1, "index must be positive");
    let mut out = Vec::new();
    let mut found = 0;
    let mut abs = 1i64;
    while found < count {
        let d0 = eps.value() * abs;
        abs += 1;
        if !is_fundamental_discriminant(d0) || (d0 == 1 && !allow_unit) {
            continue;
        }
        let classes = sqrt_classes_mod(d0, m);
        if classes.is_empty() {
            continue;
        }
        out.extend(classes.into_iter().map(|r0| AdmissiblePair { m, d0, r0 }));
        found += 1;
    }
    out
}

/// `(-1)^(k-1) ε`, the sign relating `c(Δ, -r)` and `c(Δ, r)`.
pub fn symmetry_sign(weight: i64, eps: Epsilon) -> i64 {
    let parity = if weight % 2 == 0 { -1 } else { 1 };
    parity * eps.value()
}

/// Checks `Δ ≡ r^2 (mod 4m)` and `εΔ >= 0`.
pub fn check_index(m: i64, eps: Epsilon, delta: i64, r: i64) -> Result<()> {
    if (r as i128 * r as i128 - delta as i128).rem_euclid(4 * m as i128) != 0 {
        return Err(Error::InvalidIndex { delta, r, reason: "delta is not congruent to r^2 mod 4m" });
    }
    if delta * eps.value() < 0 {
        return Err(Error::InvalidIndex { delta, r, reason: "sign of delta differs from eps" });
    }
    Ok(())
}

fn check_compatible(sigma: &ModularSymbol, pair: &AdmissiblePair) -> Result<()> {
    if sigma.level() != pair.m {
        return Err(Error::InvalidArgument(format!(
            "symbol has level {} but the pair is for index {}",
            sigma.level(),
            pair.m
        )));
    }
    if sigma.eps() != pair.eps() {
        return Err(Error::InvalidArgument(format!(
            "symbol has eps={} but the pair {} has the opposite sign",
            sigma.eps(),
            pair
        )));
    }
    Ok(())
}

/// The unsymmetrized sum `c~(Δ, r)`.
pub fn coefficient_raw(sigma: &ModularSymbol, pair: &AdmissiblePair, delta: i64, r: i64) -> Result<Rat> {
    check_compatible(sigma, pair)?;
    check_index(pair.m, pair.eps(), delta, r)?;
    if pair.is_na(delta) {
        return Err(Error::NotApplicable { delta, r, d0: pair.d0 });
    }
    let m = pair.m;
    let disc = delta.checked_mul(pair.d0).ok_or(Error::Overflow("discriminant"))?;
    let class = ((r as i128 * pair.r0 as i128).rem_euclid(2 * m as i128)) as i64;
    let chi = GenusCharacter::new(m, pair.d0);
    let e = (sigma.weight() - 2) as usize;
    let mut total = Rat::zero();
    for term in sigma.terms() {
        if term.cusp.is_infinity() || term.n == 0 {
            continue;
        }
        let query = SupportQuery { m, disc, r: class, s: term.cusp };
        for q in enumerate_support(&query)? {
            let x = chi.eval(&q)?;
            if x == 0 {
                continue;
            }
            total += bracket(&term.poly, &qf_power(&q, e))? * rat(x as i64 * term.n);
        }
    }
    Ok(total)
}

/// `c(Δ, r) = (c~(Δ, r) + (-1)^(k-1) ε c~(Δ, -r)) / 2`.
///
/// The half makes the value agree with `c~(Δ, r)` whenever the latter
/// already has the symmetry of a Jacobi coefficient.
pub fn coefficient(sigma: &ModularSymbol, pair: &AdmissiblePair, delta: i64, r: i64) -> Result<Rat> {
    let plus = coefficient_raw(sigma, pair, delta, r)?;
    let minus = coefficient_raw(sigma, pair, delta, -r)?;
    let sign = symmetry_sign(sigma.weight(), sigma.eps());
    Ok((plus + minus * rat(sign)) / rat(2))
}

/// Number of table positions tried when calibrating a fallback pair.
pub const CALIBRATION_BUDGET: usize = 200;

/// Upper limit for the prime search in [`fallback_pairs`].
const FALLBACK_PRIME_LIMIT: u64 = 1_000_000;

/// Fallback candidates tried before giving up on calibration.
const FALLBACK_CANDIDATES: usize = 4;

/// Pairs `(p Δ0, r0)` for the primes `p ∤ Δ0` that keep it admissible, in
/// increasing order. `p Δ0 Δ` is never a square when `Δ0 Δ` is one, so each
/// covers every position the primary pair cannot.
pub fn fallback_pairs(primary: &AdmissiblePair) -> impl Iterator<Item = AdmissiblePair> {
    let primary = *primary;
    (2..FALLBACK_PRIME_LIMIT)
        .filter(|&p| is_prime(p))
        .map(|p| p as i64)
        .filter(move |p| primary.d0 % p != 0)
        .map_while(move |p| primary.d0.checked_mul(p))
        .filter(|d1| is_fundamental_discriminant(*d1))
        .filter_map(move |d1| AdmissiblePair::new(primary.m, primary.eps(), d1, primary.r0).ok())
}

/// The first of [`fallback_pairs`].
pub fn fallback_pair(primary: &AdmissiblePair) -> Result<AdmissiblePair> {
    fallback_pairs(primary)
        .next()
        .ok_or_else(|| Error::Invariant(format!("no fallback pair found for {primary}")))
}

/// Positions `(Δ, r)` with `0 <= r <= m`, ordered by `|Δ|` then `r`,
/// excluding `Δ = 0`.
pub fn scan_positions(m: i64, eps: Epsilon) -> impl Iterator<Item = (i64, i64)> {
    (1i64..).flat_map(move |abs| {
        let delta = eps.value() * abs;
        (0..=m).filter(move |r| check_index(m, eps, delta, *r).is_ok()).map(move |r| (delta, r))
    })
}

/// Rescaling from a fallback pair back to the normalization of a primary one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stitch {
    pub primary: AdmissiblePair,
    pub fallback: AdmissiblePair,
    /// `c_primary / c_fallback` at the first common nonzero position, if one
    /// turned up within [`CALIBRATION_BUDGET`] positions.
    pub lambda: Option<Rat>,
}

impl Stitch {
    /// Calibrates at the first scan position where some fallback candidate
    /// is nonzero, trying candidates in order of their prime at each
    /// position. A candidate vanishing on the whole scan carries no
    /// information; if all do, the first one is kept uncalibrated.
    pub fn new(sigma: &ModularSymbol, primary: &AdmissiblePair) -> Result<Self> {
        check_compatible(sigma, primary)?;
        let candidates: Vec<AdmissiblePair> = fallback_pairs(primary).take(FALLBACK_CANDIDATES).collect();
        for (delta, r) in scan_positions(primary.m, primary.eps()).take(CALIBRATION_BUDGET) {
            if primary.is_na(delta) {
                continue;
            }
            for fallback in candidates.iter().filter(|f| !f.is_na(delta)) {
                let other = coefficient(sigma, fallback, delta, r)?;
                if !other.is_zero() {
                    let lambda = Some(coefficient(sigma, primary, delta, r)? / other);
                    return Ok(Stitch { primary: *primary, fallback: *fallback, lambda });
                }
            }
        }
        let first = candidates.first().copied();
        let fallback = first.ok_or_else(|| Error::Invariant(format!("no fallback pair found for {primary}")))?;
        Ok(Stitch { primary: *primary, fallback, lambda: None })
    }

    /// `c(Δ, r)` in the primary normalization, together with where it came from.
    pub fn coefficient(&self, sigma: &ModularSymbol, delta: i64, r: i64) -> Result<(Rat, Provenance)> {
        if !self.primary.is_na(delta) {
            return Ok((coefficient(sigma, &self.primary, delta, r)?, Provenance::Primary));
        }
        let raw = coefficient(sigma, &self.fallback, delta, r)?;
        Ok(match &self.lambda {
            Some(l) => (raw * l, Provenance::Calibrated(self.fallback)),
            None => (raw, Provenance::Uncalibrated(self.fallback)),
        })
    }
}

/// `c(Δ, r)` for any admissible position, switching to a fallback pair where
/// the primary one is not applicable.
pub fn coefficient_any_pair(
    sigma: &ModularSymbol,
    primary: &AdmissiblePair,
    delta: i64,
    r: i64,
) -> Result<(Rat, Provenance)> {
    check_compatible(sigma, primary)?;
    check_index(primary.m, primary.eps(), delta, r)?;
    if !primary.is_na(delta) {
        return Ok((coefficient(sigma, primary, delta, r)?, Provenance::Primary));
    }
    Stitch::new(sigma, primary)?.coefficient(sigma, delta, r)
}
