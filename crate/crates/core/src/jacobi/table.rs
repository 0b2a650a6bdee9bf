use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::{check_index, symmetry_sign, AdmissiblePair};
use crate::arith::{fmt_rat, parse_rat, rat, Rat};
use crate::error::{Error, ParseErrorKind, Result};
use crate::modsym::Epsilon;

/// Which pair a table value was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// The table's own pair (or transcribed data).
    Primary,
    /// A fallback pair, rescaled to the table's normalization.
    Calibrated(AdmissiblePair),
    /// A fallback pair whose scale relative to the table is unknown.
    Uncalibrated(AdmissiblePair),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// `None` marks a position outside the reach of the table's pair.
    pub value: Option<Rat>,
    pub provenance: Provenance,
}

impl Entry {
    pub fn value(v: Rat) -> Self {
        Entry { value: Some(v), provenance: Provenance::Primary }
    }

    pub fn na() -> Self {
        Entry { value: None, provenance: Provenance::Primary }
    }
}

/// Table cell as seen by a lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Value(Rat),
    Na,
    Missing,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Value(v) => f.write_str(&fmt_rat(v)),
            Cell::Na => f.write_str("NA"),
            Cell::Missing => f.write_str("missing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub delta: i64,
    pub r: i64,
    pub expected: Cell,
    pub found: Cell,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c({},{}): expected {}, found {}", self.delta, self.r, self.expected, self.found)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub compared: usize,
    pub skipped: usize,
    /// Scalar with `table = lambda * fixture`, in scalar mode.
    pub lambda: Option<Rat>,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Sort key: `|Δ|`, then `Δ`, then `r`.
type Key = (i64, i64, i64);

fn key(delta: i64, r: i64) -> Key {
    (delta.abs(), delta, r)
}

/// Coefficients `c(Δ, r)` stored at `0 <= r <= m`; other classes follow from
/// periodicity mod `2m` and `c(Δ, -r) = (-1)^(k-1) ε c(Δ, r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    weight: i64,
    m: i64,
    eps: Epsilon,
    pair: Option<AdmissiblePair>,
    entries: BTreeMap<Key, Entry>,
}

impl CoefficientTable {
    pub fn new(weight: i64, m: i64, eps: Epsilon, pair: Option<AdmissiblePair>) -> Result<Self> {
        if weight < 2 || m < 1 {
            return Err(Error::InvalidArgument(format!("bad table parameters k={weight} m={m}")));
        }
        if let Some(p) = pair {
            if p.m() != m || p.eps() != eps {
                return Err(Error::InvalidArgument(format!("pair {p} does not fit m={m} eps={eps}")));
            }
        }
        Ok(CoefficientTable { weight, m, eps, pair, entries: BTreeMap::new() })
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn eps(&self) -> Epsilon {
        self.eps
    }

    pub fn pair(&self) -> Option<AdmissiblePair> {
        self.pair
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored rows in `(|Δ|, r)` order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, &Entry)> {
        self.entries.iter().map(|(&(_, d, r), e)| (d, r, e))
    }

    pub fn na_positions(&self) -> Vec<(i64, i64)> {
        self.iter().filter(|(_, _, e)| e.value.is_none()).map(|(d, r, _)| (d, r)).collect()
    }

    /// Reduces `r` to `0 <= r <= m`, returning the sign picked up on the way.
    pub fn canonical(&self, r: i64) -> (i64, i64) {
        let two_m = 2 * self.m;
        let r = r.rem_euclid(two_m);
        if r <= self.m {
            (r, 1)
        } else {
            (two_m - r, symmetry_sign(self.weight, self.eps))
        }
    }

    pub fn insert(&mut self, delta: i64, r: i64, mut entry: Entry) -> Result<()> {
        check_index(self.m, self.eps, delta, r)?;
        let (rc, sign) = self.canonical(r);
        if sign < 0 {
            entry.value = entry.value.map(|v| -v);
        }
        self.entries.insert(key(delta, rc), entry);
        Ok(())
    }

    /// The stored entry for `(Δ, r)` after reduction, with the sign to apply.
    pub fn entry(&self, delta: i64, r: i64) -> Option<(&Entry, i64)> {
        let (rc, sign) = self.canonical(r);
        self.entries.get(&key(delta, rc)).map(|e| (e, sign))
    }

    pub fn cell(&self, delta: i64, r: i64) -> Cell {
        match self.entry(delta, r) {
            None => Cell::Missing,
            Some((Entry { value: None, .. }, _)) => Cell::Na,
            Some((Entry { value: Some(v), .. }, sign)) => Cell::Value(v * rat(sign)),
        }
    }

    pub fn get(&self, delta: i64, r: i64) -> Result<Rat> {
        match self.cell(delta, r) {
            Cell::Value(v) => Ok(v),
            Cell::Na => Err(Error::NaEntry { delta, r }),
            Cell::Missing => Err(Error::MissingEntry { delta, r }),
        }
    }

    pub fn header(&self) -> String {
        let mut h = format!("# k={} m={} eps={}", self.weight, self.m, self.eps);
        if let Some(p) = self.pair {
            h.push_str(&format!(" pair={p}"));
        }
        h
    }

    pub fn to_tsv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (d, r, e) in self.iter() {
            let value = e.value.as_ref().map_or_else(|| "NA".to_string(), fmt_rat);
            out.push_str(&format!("{d}\t{r}\t{value}"));
            match e.provenance {
                Provenance::Primary => {}
                Provenance::Calibrated(p) => out.push_str(&format!("\t# via {p}")),
                Provenance::Uncalibrated(p) => out.push_str(&format!("\t# via {p} uncalibrated")),
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table: Option<CoefficientTable> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if table.is_none() && comment.trim_start().starts_with("k=") {
                    table = Some(parse_header(comment).map_err(|k| Error::parse(line_no, k))?);
                }
                continue;
            }
            let t = table.as_mut().ok_or_else(|| Error::parse(line_no, ParseErrorKind::MissingHeader))?;
            let (data, comment) = match line.split_once('#') {
                Some((d, c)) => (d, Some(c.trim())),
                None => (line, None),
            };
            let fields: Vec<&str> = data.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::MalformedLine(format!("expected `delta r value`, got {line:?}")),
                ));
            }
            let int = |s: &str| {
                s.parse::<i64>()
                    .map_err(|_| Error::parse(line_no, ParseErrorKind::BadValue(format!("not an integer: {s:?}"))))
            };
            let (delta, r) = (int(fields[0])?, int(fields[1])?);
            let value = if fields[2] == "NA" {
                None
            } else {
                Some(parse_rat(fields[2]).ok_or_else(|| {
                    Error::parse(line_no, ParseErrorKind::BadValue(format!("not a rational: {:?}", fields[2])))
                })?)
            };
            let provenance = match comment {
                Some(c) => parse_provenance(c, t.m, t.eps).map_err(|k| Error::parse(line_no, k))?,
                None => Provenance::Primary,
            };
            let (rc, _) = t.canonical(r);
            if t.entries.contains_key(&key(delta, rc)) {
                return Err(Error::parse(
                    line_no,
                    ParseErrorKind::BadValue(format!("duplicate row for ({delta},{r})")),
                ));
            }
            t.insert(delta, r, Entry { value, provenance }).map_err(|e| {
                Error::parse(line_no, ParseErrorKind::BadValue(e.to_string()))
            })?;
        }
        table.ok_or_else(|| Error::parse(0, ParseErrorKind::MissingHeader))
    }

    /// Compares every row of `fixture` with this table. In scalar mode a single
    /// rational `lambda` with `self = lambda * fixture` is solved for, and rows
    /// that are NA on either side are skipped.
    pub fn verify(&self, fixture: &CoefficientTable, up_to_scalar: bool) -> VerifyReport {
        let mut report = VerifyReport::default();
        let rows: Vec<(i64, i64, Cell, Cell)> = fixture
            .iter()
            .map(|(d, r, _)| (d, r, fixture.cell(d, r), self.cell(d, r)))
            .collect();
        if !up_to_scalar {
            for (delta, r, expected, found) in rows {
                report.compared += 1;
                if expected != found {
                    report.mismatches.push(Mismatch { delta, r, expected, found });
                }
            }
            return report;
        }
        report.lambda = rows.iter().find_map(|(_, _, e, f)| match (e, f) {
            (Cell::Value(e), Cell::Value(f)) if !e.is_zero() && !f.is_zero() => Some(f / e),
            _ => None,
        });
        for (delta, r, expected, found) in rows {
            match (&expected, &found) {
                (_, Cell::Missing) => report.mismatches.push(Mismatch { delta, r, expected, found }),
                (Cell::Value(e), Cell::Value(f)) => {
                    report.compared += 1;
                    let scaled = match &report.lambda {
                        Some(l) => e * l,
                        None => e.clone(),
                    };
                    if &scaled != f {
                        report.mismatches.push(Mismatch { delta, r, expected, found });
                    }
                }
                _ => report.skipped += 1,
            }
        }
        report
    }
}

fn parse_header(text: &str) -> std::result::Result<CoefficientTable, ParseErrorKind> {
    let (mut k, mut m, mut eps, mut pair) = (None, None, None, None);
    for tok in text.split_whitespace() {
        let (name, value) =
            tok.split_once('=').ok_or_else(|| ParseErrorKind::BadHeader(format!("token {tok:?}")))?;
        let bad = || ParseErrorKind::BadHeader(format!("bad value in {tok:?}"));
        match name {
            "k" => k = Some(value.parse::<i64>().map_err(|_| bad())?),
            "m" => m = Some(value.parse::<i64>().map_err(|_| bad())?),
            "eps" => eps = Some(value.parse::<Epsilon>().map_err(|_| bad())?),
            "pair" => pair = Some(parse_pair_text(value).ok_or_else(bad)?),
            _ => return Err(ParseErrorKind::BadHeader(format!("unknown key {name:?}"))),
        }
    }
    let (Some(k), Some(m), Some(eps)) = (k, m, eps) else {
        return Err(ParseErrorKind::BadHeader("expected `# k=<int> m=<int> eps=<+1|-1> [pair=(d0,r0)]`".into()));
    };
    let pair = match pair {
        Some((d0, r0)) => Some(
            AdmissiblePair::new(m, eps, d0, r0).map_err(|e| ParseErrorKind::BadHeader(e.to_string()))?,
        ),
        None => None,
    };
    CoefficientTable::new(k, m, eps, pair).map_err(|e| ParseErrorKind::BadHeader(e.to_string()))
}

/// Parses `(d0,r0)` or `d0,r0`.
pub fn parse_pair_text(s: &str) -> Option<(i64, i64)> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn parse_provenance(comment: &str, m: i64, eps: Epsilon) -> std::result::Result<Provenance, ParseErrorKind> {
    let bad = || ParseErrorKind::BadValue(format!("unrecognized row comment {comment:?}"));
    let rest = comment.strip_prefix("via").ok_or_else(bad)?.trim();
    let (pair_text, calibrated) = match rest.strip_suffix("uncalibrated") {
        Some(p) => (p.trim(), false),
        None => (rest, true),
    };
    let (d0, r0) = parse_pair_text(pair_text).ok_or_else(bad)?;
    let pair = AdmissiblePair::new(m, eps, d0, r0).map_err(|e| ParseErrorKind::BadValue(e.to_string()))?;
    Ok(if calibrated { Provenance::Calibrated(pair) } else { Provenance::Uncalibrated(pair) })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# k=2 m=37 eps=-1 pair=(-4,12)\n-3\t21\t1\n-4\t12\tNA\n-7\t17\t-1\n";

    #[test]
    fn tsv_round_trip() {
        let t = CoefficientTable::parse(SAMPLE).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.to_tsv(), SAMPLE);
        assert_eq!(t.na_positions(), vec![(-4, 12)]);
    }

    #[test]
    fn lookups_use_symmetry() {
        let t = CoefficientTable::parse(SAMPLE).unwrap();
        assert_eq!(t.get(-3, 21).unwrap(), rat(1));
        assert_eq!(t.get(-3, 21 + 74).unwrap(), rat(1));
        // k = 2, eps = -1: c(Δ, -r) = c(Δ, r)
        assert_eq!(t.get(-3, 74 - 21).unwrap(), rat(1));
        assert!(matches!(t.get(-4, 12), Err(Error::NaEntry { .. })));
        assert!(matches!(t.get(-11, 7), Err(Error::MissingEntry { .. })));
    }

    #[test]
    fn odd_sign_symmetry() {
        let mut t = CoefficientTable::new(2, 11, Epsilon::Plus, None).unwrap();
        t.insert(5, 15, Entry::value(rat(5))).unwrap();
        assert_eq!(t.get(5, 7).unwrap(), rat(-5));
        assert_eq!(t.iter().next().unwrap().1, 7);
    }

    #[test]
    fn stitched_rows_round_trip() {
        let text = "# k=2 m=37 eps=-1 pair=(-4,12)\n-4\t12\t1\t# via (-596,12)\n-16\t24\t2\t# via (-596,12) uncalibrated\n";
        let t = CoefficientTable::parse(text).unwrap();
        assert_eq!(t.to_tsv(), text);
        assert!(matches!(t.entry(-4, 12).unwrap().0.provenance, Provenance::Calibrated(_)));
    }

    #[test]
    fn parse_errors() {
        assert!(CoefficientTable::parse("-3\t21\t1\n").is_err());
        assert!(CoefficientTable::parse("# k=2 m=37 eps=-1\n-3\t20\t1\n").is_err());
        assert!(CoefficientTable::parse("# k=2 m=37 eps=-1\n-3\t21\tx\n").is_err());
        assert!(CoefficientTable::parse("# k=2 m=37 eps=-1\n-3\t21\t1\n-3\t53\t1\n").is_err());
        assert!(CoefficientTable::parse("# k=2 m=37 eps=-1 pair=(-4,11)\n").is_err());
    }

    #[test]
    fn verify_modes() {
        let t = CoefficientTable::parse(SAMPLE).unwrap();
        assert!(t.verify(&t, false).passed());
        let doubled = "# k=2 m=37 eps=-1\n-3\t21\t2\n-4\t12\t5\n-7\t17\t-2\n";
        let d = CoefficientTable::parse(doubled).unwrap();
        let exact = t.verify(&d, false);
        assert_eq!(exact.mismatches.len(), 3);
        let scaled = t.verify(&d, true);
        assert!(scaled.passed());
        assert_eq!(scaled.lambda, Some(Rat::new(1.into(), 2.into())));
        assert_eq!(scaled.skipped, 1);
    }
}
