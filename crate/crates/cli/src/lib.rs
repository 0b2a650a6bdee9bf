//! Command-line front end: `compute`, `pairs`, `lift` and `verify`.
//!
//! Every failure is reported as one line `error[<kind>]: <message>` on
//! stderr, and the process exits with
//!
//! | code | meaning                                  |
//! |------|------------------------------------------|
//! | 0    | success                                  |
//! | 1    | verification mismatch or failed lift check |
//! | 2    | usage, parse or invalid pair             |
//! | 3    | I/O                                      |
//! | 4    | internal invariant or overflow           |

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use jacobi_core::jacobi::{parse_pair_text, Entry, Stitch};
use jacobi_core::lift::normalized;
use jacobi_core::modsym::boundary_check_weight2;
use jacobi_core::{
    batch_table, eigen_consistency, find_pairs, shimura_lift, AdmissiblePair, CoefficientTable, Epsilon,
    Error, ModularSymbol, QExpansion,
};

#[derive(Debug, Parser)]
#[command(name = "jacobi", version, about = "Fourier coefficients of Jacobi cusp forms from modular symbols")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the table of c(Δ, r) for 0 < |Δ| <= dmax.
    Compute(ComputeArgs),
    /// List admissible pairs (Δ0, r0) for an index.
    Pairs(PairsArgs),
    /// Lift a coefficient table to a q-expansion and check its Hecke relations.
    Lift(LiftArgs),
    /// Compare a table with a reference fixture.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Modular symbol file.
    #[arg(long)]
    pub symbol: PathBuf,
    /// Pair `d0,r0`; defaults to the first admissible pair.
    #[arg(long, allow_hyphen_values = true)]
    pub pair: Option<String>,
    #[arg(long, default_value_t = 48)]
    pub dmax: i64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Allow Δ0 = 1 when picking the default pair.
    #[arg(long)]
    pub allow_unit_discriminant: bool,
    /// Fill NA rows from a fallback pair.
    #[arg(long)]
    pub fill_na: bool,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[arg(long)]
    pub m: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Epsilon,
    /// Number of fundamental discriminants to list.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    #[arg(long)]
    pub allow_unit_discriminant: bool,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// Pair `d0,r0` for the lift; defaults to the first one the table covers.
    #[arg(long, allow_hyphen_values = true)]
    pub pair: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub nmax: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub fixture: PathBuf,
    /// Accept `table = λ · fixture` for one rational λ.
    #[arg(long)]
    pub up_to_scalar: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep it to one line
        let msg = self.message.replace('\n', " ");
        write!(f, "error[{}]: {msg}", self.kind)
    }
}

impl Failure {
    fn new(kind: &'static str, code: i32, message: impl Into<String>) -> Self {
        Failure { kind, code, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::new("io", 3, format!("{}: {e}", path.display()))
    }

    fn from_core(e: Error, context: Option<&Path>) -> Self {
        let (kind, code) = match &e {
            Error::Parse { .. } => ("parse", 2),
            Error::InvalidPair { .. } => ("pair", 2),
            Error::MissingEntry { .. } | Error::NaEntry { .. } => ("coverage", 2),
            Error::Overflow(_) => ("overflow", 4),
            Error::Invariant(_) => ("invariant", 4),
            _ => ("usage", 2),
        };
        let message = match context {
            Some(p) => format!("{}: {e}", p.display()),
            None => e.to_string(),
        };
        Failure::new(kind, code, message)
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(err, "{}", Failure::new("usage", 2, first));
            return 2;
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(&a, out, err),
        Command::Pairs(a) => pairs(&a, out),
        Command::Lift(a) => lift(&a, out, err),
        Command::Verify(a) => verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{f}");
            f.code
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn parse_pair(text: &str, m: i64, eps: Epsilon) -> std::result::Result<AdmissiblePair, Failure> {
    let (d0, r0) = parse_pair_text(text)
        .ok_or_else(|| Failure::new("usage", 2, format!("pair must look like `d0,r0`, got {text:?}")))?;
    AdmissiblePair::new(m, eps, d0, r0).map_err(|e| Failure::from_core(e, None))
}

fn compute(a: &ComputeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let sigma = ModularSymbol::parse(&read(&a.symbol)?).map_err(|e| Failure::from_core(e, Some(&a.symbol)))?;
    let (m, eps) = (sigma.level(), sigma.eps());
    let pair = match &a.pair {
        Some(text) => parse_pair(text, m, eps)?,
        None => *find_pairs(m, eps, 1, a.allow_unit_discriminant)
            .first()
            .ok_or_else(|| Failure::new("invariant", 4, "no admissible pair found"))?,
    };
    if sigma.weight() == 2 {
        if !boundary_check_weight2(&sigma).map_err(|e| Failure::from_core(e, None))? {
            return Err(Failure::new(
                "symbol",
                2,
                format!("{}: boundary does not vanish on cusps of level {m}", a.symbol.display()),
            ));
        }
    } else {
        let _ = writeln!(err, "warning: cuspidality is not checked for weight {}", sigma.weight());
    }
    let mut table = batch_table(&sigma, &pair, a.dmax, a.workers).map_err(|e| Failure::from_core(e, None))?;
    if a.fill_na {
        fill_na(&sigma, &pair, &mut table, err)?;
    }
    emit(a.out.as_deref(), &table.to_tsv(), out)?;
    Ok(0)
}

fn fill_na(
    sigma: &ModularSymbol,
    pair: &AdmissiblePair,
    table: &mut CoefficientTable,
    err: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let na = table.na_positions();
    if na.is_empty() {
        return Ok(());
    }
    let stitch = Stitch::new(sigma, pair).map_err(|e| Failure::from_core(e, None))?;
    if stitch.lambda.is_none() {
        let _ = writeln!(err, "warning: fallback pair {} could not be calibrated", stitch.fallback);
    }
    for (delta, r) in na {
        let (value, provenance) = stitch.coefficient(sigma, delta, r).map_err(|e| Failure::from_core(e, None))?;
        table
            .insert(delta, r, Entry { value: Some(value), provenance })
            .map_err(|e| Failure::from_core(e, None))?;
    }
    Ok(())
}

fn pairs(a: &PairsArgs, out: &mut dyn Write) -> Outcome {
    if a.m < 1 {
        return Err(Failure::new("usage", 2, format!("index must be positive, got {}", a.m)));
    }
    let text: String = find_pairs(a.m, a.eps, a.count, a.allow_unit_discriminant)
        .iter()
        .map(|p| format!("{p}\n"))
        .collect();
    emit(None, &text, out)?;
    Ok(0)
}

fn lift(a: &LiftArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let table = CoefficientTable::parse(&read(&a.table)?).map_err(|e| Failure::from_core(e, Some(&a.table)))?;
    let (m, eps) = (table.m(), table.eps());
    let exp = match &a.pair {
        Some(text) => {
            let pair = parse_pair(text, m, eps)?;
            shimura_lift(&table, &pair, a.nmax).map_err(|e| Failure::from_core(e, None))?
        }
        None => default_lift(&table, a.nmax)?,
    };
    emit(a.out.as_deref(), &exp.to_tsv(), out)?;
    let report = eigen_consistency(&exp, table.weight(), m);
    if let Some(n) = normalized(&exp) {
        let head: Vec<String> = n.iter().take(10).map(|(i, v)| format!("a({i})={v}")).collect();
        let _ = writeln!(err, "normalized: {}", head.join(" "));
    }
    let _ = writeln!(err, "hecke: {report}");
    Ok(if report.passed() { 0 } else { 1 })
}

/// Lift with the first pair of the right sign that the table covers.
fn default_lift(table: &CoefficientTable, nmax: u64) -> std::result::Result<QExpansion, Failure> {
    let mut first_error = None;
    for pair in find_pairs(table.m(), table.eps(), 8, false) {
        if table.pair().is_some_and(|p| p.d0() == pair.d0()) {
            continue;
        }
        match shimura_lift(table, &pair, nmax) {
            Ok(exp) => return Ok(exp),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    Err(match first_error {
        Some(e) => Failure::from_core(e, None),
        None => Failure::new("coverage", 2, "no admissible pair available for the lift"),
    })
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let table = CoefficientTable::parse(&read(&a.table)?).map_err(|e| Failure::from_core(e, Some(&a.table)))?;
    let fixture =
        CoefficientTable::parse(&read(&a.fixture)?).map_err(|e| Failure::from_core(e, Some(&a.fixture)))?;
    if (table.weight(), table.m(), table.eps()) != (fixture.weight(), fixture.m(), fixture.eps()) {
        return Err(Failure::new(
            "usage",
            2,
            format!("headers differ: `{}` vs `{}`", table.header(), fixture.header()),
        ));
    }
    let report = table.verify(&fixture, a.up_to_scalar);
    let mut text = format!(
        "compared={} skipped={} mismatches={}",
        report.compared,
        report.skipped,
        report.mismatches.len()
    );
    if a.up_to_scalar {
        match &report.lambda {
            Some(l) => text.push_str(&format!(" lambda={l}")),
            None => text.push_str(" lambda=none"),
        }
    }
    text.push('\n');
    if let Some(m) = report.mismatches.first() {
        text.push_str(&format!("first mismatch: {m}\n"));
    }
    emit(None, &text, out)?;
    Ok(if report.passed() { 0 } else { 1 })
}
