//! The divisor-sum lift from Jacobi coefficients to the q-expansion of an
//! elliptic modular form, and Hecke relations to test the result against.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{fmt_rat, is_prime, kronecker, parse_rat, rat, Rat};
use crate::error::{Error, ParseErrorKind, Result};
use crate::jacobi::{AdmissiblePair, CoefficientTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    pub level: i64,
    pub weight: i64,
    coeffs: BTreeMap<u64, Rat>,
}

impl QExpansion {
    pub fn new(level: i64, weight: i64) -> Self {
        QExpansion { level, weight, coeffs: BTreeMap::new() }
    }

    pub fn set(&mut self, n: u64, value: Rat) {
        self.coeffs.insert(n, value);
    }

    pub fn get(&self, n: u64) -> Option<&Rat> {
        self.coeffs.get(&n)
    }

    /// Largest `N` with every `a(1), ..., a(N)` present.
    pub fn nmax(&self) -> u64 {
        (1..).take_while(|n| self.coeffs.contains_key(n)).last().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rat)> {
        self.coeffs.iter().map(|(&n, v)| (n, v))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# level={} weight={}\n", self.level, self.weight);
        for (n, v) in &self.coeffs {
            out.push_str(&format!("{n}\t{}\n", fmt_rat(v)));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut exp: Option<QExpansion> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                if exp.is_none() && h.trim_start().starts_with("level=") {
                    exp = Some(parse_header(h).map_err(|k| Error::parse(line_no, k))?);
                }
                continue;
            }
            let e = exp.as_mut().ok_or_else(|| Error::parse(line_no, ParseErrorKind::MissingHeader))?;
            let bad = || Error::parse(line_no, ParseErrorKind::MalformedLine(format!("expected `n a(n)`, got {line:?}")));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(bad());
            }
            let n: u64 = fields[0].parse().map_err(|_| bad())?;
            let v = parse_rat(fields[1]).ok_or_else(bad)?;
            if n == 0 {
                return Err(bad());
            }
            e.set(n, v);
        }
        exp.ok_or_else(|| Error::parse(0, ParseErrorKind::MissingHeader))
    }
}

fn parse_header(text: &str) -> std::result::Result<QExpansion, ParseErrorKind> {
    let (mut level, mut weight) = (None, None);
    for tok in text.split_whitespace() {
        let bad = || ParseErrorKind::BadHeader(format!("token {tok:?}"));
        let (k, v) = tok.split_once('=').ok_or_else(bad)?;
        let v: i64 = v.parse().map_err(|_| bad())?;
        match k {
            "level" => level = Some(v),
            "weight" => weight = Some(v),
            _ => return Err(bad()),
        }
    }
    match (level, weight) {
        (Some(l), Some(w)) => Ok(QExpansion::new(l, w)),
        _ => Err(ParseErrorKind::BadHeader("expected `# level=<int> weight=<int>`".into())),
    }
}

/// `a(n) = sum_{d | n} (Δ0 / d) c(n^2 Δ0 / d^2, (n/d) r0)` for `1 <= n <= nmax`.
pub fn shimura_lift(table: &CoefficientTable, pair: &AdmissiblePair, nmax: u64) -> Result<QExpansion> {
    if pair.m() != table.m() || pair.eps() != table.eps() {
        return Err(Error::InvalidArgument(format!(
            "pair {pair} does not fit a table with m={} eps={}",
            table.m(),
            table.eps()
        )));
    }
    let (d0, r0, two_m) = (pair.d0(), pair.r0(), 2 * pair.m());
    let values: Vec<Result<(u64, Rat)>> = (1..=nmax)
        .into_par_iter()
        .map(|n| {
            let mut acc = Rat::zero();
            for d in (1..=n).filter(|d| n % d == 0) {
                let chi = kronecker(d0, d as i64);
                if chi == 0 {
                    continue;
                }
                let e = (n / d) as i64;
                let delta = e
                    .checked_mul(e)
                    .and_then(|x| x.checked_mul(d0))
                    .ok_or(Error::Overflow("lift discriminant"))?;
                let r = ((e as i128 * r0 as i128).rem_euclid(two_m as i128)) as i64;
                acc += table.get(delta, r)? * rat(chi as i64);
            }
            Ok((n, acc))
        })
        .collect();
    let mut out = QExpansion::new(table.m(), 2 * table.weight() - 2);
    for v in values {
        let (n, a) = v?;
        out.set(n, a);
    }
    Ok(out)
}

/// One failed Hecke relation, with the indices involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `a(pq) != a(p) a(q)` for coprime `p, q`.
    Multiplicative { p: u64, q: u64 },
    /// `a(p^(e+1)) != a(p) a(p^e) - p^(2k-3) a(p^(e-1))` for `p ∤ m`.
    PrimePower { p: u64, e: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Multiplicative { p, q } => write!(f, "a({}) != a({p}) a({q})", p * q),
            Violation::PrimePower { p, e } => {
                write!(f, "a({p}^{}) != a({p}) a({p}^{e}) - {p}^(2k-3) a({p}^{})", e + 1, e - 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub checked: usize,
    /// Set when `a(1) = 0`, so nothing can be normalized.
    pub inconclusive: bool,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.inconclusive && self.violations.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inconclusive {
            return write!(f, "inconclusive: a(1) = 0");
        }
        write!(f, "{} relations checked, {} violated", self.checked, self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Checks the Hecke relations of a normalized newform of level `m` among
/// `a(1), ..., a(N)`; `k` is the Jacobi weight, so the form has weight `2k-2`.
pub fn eigen_consistency(exp: &QExpansion, k: i64, m: i64) -> Report {
    let nmax = exp.nmax();
    let a1 = exp.get(1).cloned().unwrap_or_else(Rat::zero);
    if a1.is_zero() {
        return Report { checked: 0, inconclusive: nmax > 0, violations: Vec::new() };
    }
    let a = |n: u64| exp.get(n).expect("index below nmax") / &a1;
    let mut report = Report { checked: 0, inconclusive: false, violations: Vec::new() };
    for n in 2..=nmax {
        // split n = p^e * rest with p the smallest prime factor
        let p = (2..=n).find(|p| n % p == 0).expect("n >= 2");
        let mut pe = 1;
        let mut e = 0u32;
        while n % (pe * p) == 0 {
            pe *= p;
            e += 1;
        }
        let rest = n / pe;
        if rest > 1 {
            report.checked += 1;
            if a(n) != a(pe) * a(rest) {
                report.violations.push(Violation::Multiplicative { p: pe, q: rest });
            }
        } else if e >= 2 && !(m as u64).is_multiple_of(p) {
            debug_assert!(is_prime(p));
            report.checked += 1;
            let scale = Rat::from_integer(num_bigint::BigInt::from(p).pow((2 * k - 3) as u32));
            let expected = a(p) * a(pe / p) - scale * a(pe / (p * p));
            if a(n) != expected {
                report.violations.push(Violation::PrimePower { p, e: e - 1 });
            }
        }
    }
    report
}

/// The expansion scaled to `a(1) = 1`; `None` when `a(1)` is zero or absent.
pub fn normalized(exp: &QExpansion) -> Option<QExpansion> {
    let a1 = exp.get(1)?.clone();
    if a1.is_zero() {
        return None;
    }
    let mut out = QExpansion::new(exp.level, exp.weight);
    for (n, v) in exp.iter() {
        out.set(n, v / &a1);
    }
    debug_assert!(out.get(1).is_some_and(One::is_one));
    Some(out)
}
