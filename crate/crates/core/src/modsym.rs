//! Cuspidal modular symbols in the normal form `sum_i n_i {inf, s_i} (x) P_i`
//! and their intersection numbers with binary quadratic forms.
//!
//! Symbol file format:
//!
//! ```text
//! # comment
//! k=2 m=37 eps=-1
//! 1 ; -1/23 ; [1]
//! -1 ; 0/1 ; [1]
//! ```

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{is_square_wide, rat, Rat};
use crate::error::{Error, ParseErrorKind, Result};
use crate::poly::{bracket, qf_power, HomPoly, Mat2};
use crate::qf::BinaryQF;

/// Sign `ε`: `-1` for holomorphic, `+1` for skew-holomorphic forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Epsilon {
    Minus,
    Plus,
}

impl Epsilon {
    pub fn value(self) -> i64 {
        match self {
            Epsilon::Minus => -1,
            Epsilon::Plus => 1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Epsilon::Minus),
            1 => Some(Epsilon::Plus),
            _ => None,
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Minus => "-1",
            Epsilon::Plus => "+1",
        })
    }
}

impl FromStr for Epsilon {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "-1" | "-" => Ok(Epsilon::Minus),
            "+1" | "1" | "+" => Ok(Epsilon::Plus),
            other => Err(format!("eps must be +1 or -1, got {other:?}")),
        }
    }
}

/// A point of `P^1(Q)`, stored as `p/q` in lowest terms with `q > 0`,
/// or `(1, 0)` for infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    p: i64,
    q: i64,
}

impl Cusp {
    pub const INFINITY: Cusp = Cusp { p: 1, q: 0 };

    pub fn new(p: i64, q: i64) -> Result<Self> {
        Self::checked(p, q).map_err(|kind| Error::InvalidArgument(kind.to_string()))
    }

    /// Validating constructor: rejects `p/0` for `p != ±1` and fractions not
    /// in lowest terms.
    pub fn checked(p: i64, q: i64) -> std::result::Result<Self, ParseErrorKind> {
        if q == 0 {
            return if p == 1 || p == -1 {
                Ok(Cusp::INFINITY)
            } else {
                Err(ParseErrorKind::ZeroDenominator)
            };
        }
        if p.gcd(&q) != 1 {
            return Err(ParseErrorKind::NotCoprime { p, q });
        }
        Ok(if q < 0 { Cusp { p: -p, q: -q } } else { Cusp { p, q } })
    }

    /// Reduces an arbitrary pair, panicking on `(0, 0)` or on overflow of
    /// the reduced fraction.
    pub(crate) fn from_wide(num: i128, den: i128) -> Cusp {
        assert!(num != 0 || den != 0, "(0,0) is not a cusp");
        if den == 0 {
            return Cusp::INFINITY;
        }
        let g = num.gcd(&den);
        let (mut p, mut q) = (num / g, den / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        Cusp {
            p: i64::try_from(p).expect("cusp numerator overflow"),
            q: i64::try_from(q).expect("cusp denominator overflow"),
        }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    /// Some `g` in `SL(2,Z)` with `g . inf = self`.
    pub fn to_infinity_matrix(&self) -> Mat2 {
        if self.is_infinity() {
            return Mat2::IDENTITY;
        }
        // p d - b q = 1
        let ext = self.p.extended_gcd(&self.q);
        debug_assert_eq!(ext.gcd, 1);
        Mat2::new(self.p, -ext.y, self.q, ext.x).expect("determinant is 1 by construction")
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Cusp {
    type Err = ParseErrorKind;
    fn from_str(s: &str) -> std::result::Result<Self, ParseErrorKind> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Cusp::INFINITY);
        }
        let bad = || ParseErrorKind::MalformedLine(format!("bad cusp {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (
                p.trim().parse::<i64>().map_err(|_| bad())?,
                q.trim().parse::<i64>().map_err(|_| bad())?,
            ),
            None => (s.parse::<i64>().map_err(|_| bad())?, 1),
        };
        if p == 0 && q == 0 {
            return Err(bad());
        }
        Cusp::checked(p, q)
    }
}

/// One summand `n {inf, s} (x) P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub n: i64,
    pub cusp: Cusp,
    pub poly: HomPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularSymbol {
    weight: i64,
    level: i64,
    eps: Epsilon,
    terms: Vec<Term>,
}

impl ModularSymbol {
    pub fn new(weight: i64, level: i64, eps: Epsilon) -> Result<Self> {
        if weight < 2 {
            return Err(Error::InvalidArgument(format!("weight must be >= 2, got {weight}")));
        }
        if level < 1 {
            return Err(Error::InvalidArgument(format!("level must be >= 1, got {level}")));
        }
        Ok(ModularSymbol { weight, level, eps, terms: Vec::new() })
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Degree `2k - 4` of the polynomial coefficients.
    pub fn poly_degree(&self) -> usize {
        (2 * self.weight - 4) as usize
    }

    /// Appends `n {inf, s} (x) P`.
    pub fn push(&mut self, n: i64, cusp: Cusp, poly: HomPoly) -> Result<()> {
        if poly.degree() != self.poly_degree() {
            return Err(Error::DegreeMismatch(self.poly_degree(), poly.degree()));
        }
        self.terms.push(Term { n, cusp, poly });
        Ok(())
    }

    /// Appends `n {alpha, beta} (x) P = n {inf, beta} (x) P - n {inf, alpha} (x) P`.
    pub fn push_path(&mut self, n: i64, alpha: Cusp, beta: Cusp, poly: HomPoly) -> Result<()> {
        self.push(n, beta, poly.clone())?;
        self.push(-n, alpha, poly)
    }

    pub fn with_term(mut self, n: i64, cusp: Cusp, poly: HomPoly) -> Result<Self> {
        self.push(n, cusp, poly)?;
        Ok(self)
    }

    /// Formal sum; both symbols must share weight, level and sign.
    pub fn add(&self, other: &ModularSymbol) -> Result<ModularSymbol> {
        if (self.weight, self.level, self.eps) != (other.weight, other.level, other.eps) {
            return Err(Error::InvalidArgument("symbols live in different spaces".into()));
        }
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        Ok(out)
    }

    pub fn is_zero_sum(&self) -> bool {
        self.terms.iter().all(|t| t.n == 0 || t.poly.is_zero() || t.cusp.is_infinity())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut symbol: Option<ModularSymbol> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some(sym) = symbol.as_mut() else {
                symbol = Some(parse_header(line).map_err(|k| Error::parse(line_no, k))?);
                continue;
            };
            let fields: Vec<&str> = line.split(';').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::MalformedLine(format!("expected `n ; p/q ; [..]`, got {line:?}")),
                ));
            }
            let n: i64 = fields[0].parse().map_err(|_| {
                Error::parse(line_no, ParseErrorKind::MalformedLine(format!("bad multiplicity {:?}", fields[0])))
            })?;
            let cusp: Cusp = fields[1].parse().map_err(|k| Error::parse(line_no, k))?;
            let poly = HomPoly::parse(fields[2])
                .map_err(|e| Error::parse(line_no, ParseErrorKind::BadPolynomial(e)))?;
            if poly.degree() != sym.poly_degree() {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::DegreeMismatch {
                        expected: sym.poly_degree() + 1,
                        found: poly.degree() + 1,
                    },
                ));
            }
            sym.terms.push(Term { n, cusp, poly });
        }
        symbol.ok_or_else(|| Error::parse(0, ParseErrorKind::MissingHeader))
    }
}

fn parse_header(line: &str) -> std::result::Result<ModularSymbol, ParseErrorKind> {
    let (mut k, mut m, mut eps) = (None, None, None);
    for tok in line.split_whitespace() {
        let (key, value) =
            tok.split_once('=').ok_or_else(|| ParseErrorKind::BadHeader(format!("token {tok:?}")))?;
        let bad = || ParseErrorKind::BadHeader(format!("bad value in {tok:?}"));
        match key {
            "k" => k = Some(value.parse::<i64>().map_err(|_| bad())?),
            "m" => m = Some(value.parse::<i64>().map_err(|_| bad())?),
            "eps" => eps = Some(value.parse::<Epsilon>().map_err(|_| bad())?),
            _ => return Err(ParseErrorKind::BadHeader(format!("unknown key {key:?}"))),
        }
    }
    match (k, m, eps) {
        (Some(k), Some(m), Some(eps)) => {
            ModularSymbol::new(k, m, eps).map_err(|e| ParseErrorKind::BadHeader(e.to_string()))
        }
        _ => Err(ParseErrorKind::BadHeader("expected `k=<int> m=<int> eps=<+1|-1>`".into())),
    }
}

impl fmt::Display for ModularSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k={} m={} eps={}", self.weight, self.level, self.eps)?;
        for t in &self.terms {
            writeln!(f, "{} ; {} ; {}", t.n, t.cusp, t.poly)?;
        }
        Ok(())
    }
}

/// `C_Q . {alpha, beta} (x) P = 1/2 (sgn Q(alpha) - sgn Q(beta)) [P | Q^(k-2)]`.
pub fn intersection_with_line(q: &BinaryQF, alpha: &Cusp, beta: &Cusp, poly: &HomPoly) -> Result<Rat> {
    let w = poly.degree();
    if !w.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("odd polynomial degree {w}")));
    }
    let diff = q.sign_at(alpha) - q.sign_at(beta);
    if diff == 0 {
        return Ok(Rat::zero());
    }
    let pairing = bracket(poly, &qf_power(q, w / 2))?;
    Ok(pairing * rat(diff as i64) / rat(2))
}

/// `C_Q . sigma = sgn Q(inf) sum_{Q(inf) Q(s_i) < 0} n_i [P_i | Q^(k-2)]`.
pub fn intersection(q: &BinaryQF, sigma: &ModularSymbol) -> Result<Rat> {
    let disc = q.disc();
    if is_square_wide(disc) {
        return Err(Error::SquareDiscriminant(disc));
    }
    let at_inf = q.sign_at(&Cusp::INFINITY);
    let power = qf_power(q, (sigma.weight - 2) as usize);
    let mut acc = Rat::zero();
    for t in &sigma.terms {
        if at_inf * q.sign_at(&t.cusp) < 0 {
            acc += bracket(&t.poly, &power)? * rat(t.n);
        }
    }
    Ok(acc * rat(at_inf as i64))
}

/// Whether `a1/c1` and `a2/c2` are `Gamma_0(level)`-equivalent.
///
/// With `s_j a_j ≡ 1 (mod c_j)`, the cusps are equivalent iff
/// `s1 c2 ≡ s2 c1 (mod gcd(c1 c2, level))`.
pub fn cusps_equivalent(x: &Cusp, y: &Cusp, level: i64) -> bool {
    let inv = |c: &Cusp| -> i128 {
        if c.q <= 1 {
            return c.p as i128;
        }
        // s with p s ≡ 1 (mod q)
        let ext = (c.p as i128).extended_gcd(&(c.q as i128));
        ext.x
    };
    let (s1, s2) = (inv(x), inv(y));
    let (c1, c2) = (x.q as i128, y.q as i128);
    let modulus = (c1 * c2).gcd(&(level as i128));
    (s1 * c2 - s2 * c1).rem_euclid(modulus) == 0
}

/// For weight 2: whether `sum_i n_i ((s_i) - (inf))` vanishes on
/// `Gamma_0(m)`-classes of cusps.
pub fn boundary_check_weight2(sigma: &ModularSymbol) -> Result<bool> {
    if sigma.weight != 2 {
        return Err(Error::CheckUnavailable(sigma.weight));
    }
    let mut classes: Vec<(Cusp, Rat)> = Vec::new();
    let mut add = |c: Cusp, v: Rat| {
        match classes.iter_mut().find(|(rep, _)| cusps_equivalent(rep, &c, sigma.level)) {
            Some((_, total)) => *total += v,
            None => classes.push((c, v)),
        }
    };
    for t in &sigma.terms {
        // w = 0: the polynomial is a constant
        let weight = &t.poly.coeffs()[0] * rat(t.n);
        add(t.cusp, weight.clone());
        add(Cusp::INFINITY, -weight);
    }
    Ok(classes.iter().all(|(_, v)| v.is_zero()))
}
