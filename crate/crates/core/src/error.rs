use std::fmt;

/// What went wrong on a given line of a symbol or table file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    BadHeader(String),
    MalformedLine(String),
    BadPolynomial(String),
    DegreeMismatch { expected: usize, found: usize },
    /// `p/0` with `p` other than ±1.
    ZeroDenominator,
    NotCoprime { p: i64, q: i64 },
    BadValue(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::MissingHeader => write!(f, "missing header line"),
            ParseErrorKind::BadHeader(s) => write!(f, "bad header: {s}"),
            ParseErrorKind::MalformedLine(s) => write!(f, "malformed line: {s}"),
            ParseErrorKind::BadPolynomial(s) => write!(f, "bad polynomial: {s}"),
            ParseErrorKind::DegreeMismatch { expected, found } => write!(
                f,
                "polynomial has {found} coefficients, weight requires {expected}"
            ),
            ParseErrorKind::ZeroDenominator => {
                write!(f, "cusp with zero denominator must be inf (or 1/0)")
            }
            ParseErrorKind::NotCoprime { p, q } => write!(f, "cusp {p}/{q} is not in lowest terms"),
            ParseErrorKind::BadValue(s) => write!(f, "bad value: {s}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("matrix [[{a},{b}],[{c},{d}]] is not unimodular")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64 },

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(i128),

    #[error("formula not applicable at ({delta},{r}): {delta}*{d0} is a square")]
    NotApplicable { delta: i64, r: i64, d0: i64 },

    #[error("invalid index ({delta},{r}): {reason}")]
    InvalidIndex { delta: i64, r: i64, reason: &'static str },

    #[error("({d0},{r0}) is not an admissible pair for m={m}, eps={eps}: {reason}")]
    InvalidPair { m: i64, eps: i64, d0: i64, r0: i64, reason: &'static str },

    #[error("boundary check unavailable for weight {0} (only weight 2 is supported)")]
    CheckUnavailable(i64),

    #[error("table has no entry for ({delta},{r})")]
    MissingEntry { delta: i64, r: i64 },

    #[error("table entry ({delta},{r}) is NA")]
    NaEntry { delta: i64, r: i64 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, kind: ParseErrorKind) -> Self {
        Error::Parse { line, kind }
    }
}
