//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a congruence failed, 2 usage error,
//! 3 insufficient precision or uncertified convergence.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::{parse_rational, valuation_rat, RBig};
use crate::chars::{enumerate_characters, parse_character_id, twist, DirichletCharacter};
use crate::error::Error;
use crate::lfunc::{interpolation_rhs, l_value, LSeriesQuery, LValue, SArg, DEFAULT_RHO_MAX, DEFAULT_TARGET};
use crate::padic::{PadicContext, DEFAULT_PRECISION};
use crate::qnum::{check_disc, q_euler_numbers, EulerCache};
use crate::verify::{run_grid, write_csv, write_json_lines, CongruenceReport, GridItem, GridSpec, Verdict, Verifier};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qeuler", version, about = "q-Euler numbers, p-adic q-L-values and their congruences")]
pub struct Cli {
    /// Working p-adic precision N (digits).
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print E_{n,q} for n = 0..=n_max.
    Numbers {
        /// q as an exact rational "a/b".
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Also print p-adic valuations.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Check a congruence over a parameter range.
    Verify(VerifyArgs),
    /// Evaluate L(s, chi) with certified precision.
    Lvalue(LvalueArgs),
    /// List the Dirichlet characters of modulus d.
    Chars {
        #[arg(long)]
        d: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Claim {
    Theorem1,
    Integrality,
    Stability,
    Witt,
    Kummer,
    Eq26,
    Interpolation,
    Eq4,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub claim: Claim,
    #[arg(long)]
    pub p: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// A single n (for kummer: the modulus exponent, default 1; stability
    /// and witt treat it as an upper bound).
    #[arg(long)]
    pub n: Option<usize>,
    /// Run n = 0..=n_max when --n is absent.
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Level k (stability, witt), or the exponent k (kummer, interpolation).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k_prime: Option<usize>,
    /// Run k up to this when --k is absent.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Character "d:index".
    #[arg(long)]
    pub chi: Option<String>,
    /// Power m of f(x) = [x]_q^m (eq4).
    #[arg(long)]
    pub m: Option<u32>,
    /// Riemann-sum level (eq4).
    #[arg(long)]
    pub level: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_RHO_MAX)]
    pub rho_max: u32,
    /// Run exact checks for q outside the disc, labeled informational.
    #[arg(long)]
    pub allow_out_of_hypothesis: bool,
}

#[derive(Debug, Args)]
pub struct LvalueArgs {
    /// Integer or p-integral rational argument.
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, default_value = "1:0")]
    pub chi: String,
    #[arg(long)]
    pub p: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Evaluate at chi omega^twist; defaults to -s for integers s <= 0, else 0.
    #[arg(long, allow_hyphen_values = true)]
    pub twist: Option<i64>,
    #[arg(long, default_value_t = DEFAULT_TARGET)]
    pub target: u32,
    #[arg(long, default_value_t = DEFAULT_RHO_MAX)]
    pub rho_max: u32,
    #[arg(long)]
    pub allow_uncertified: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let code = match execute(&cli, &mut out) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    if let Err(e) = out.flush() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    code
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Numbers { q, n_max, p } => numbers(cli, out, q, *n_max, *p),
        Command::Verify(args) => verify(cli, out, args),
        Command::Lvalue(args) => lvalue(cli, out, args),
        Command::Chars { d } => chars(cli, out, *d),
    }
}

fn parse_q(text: &str) -> Result<RBig, CliError> {
    Ok(parse_rational(text)?)
}

fn write_table(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(header.to_vec()))?;
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(|s| s.as_str()).collect()))?;
    }
    Ok(())
}

fn write_rows(cli: &Cli, out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    match cli.format {
        Format::Table => write_table(out, header, rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            for row in rows {
                let obj: serde_json::Map<String, serde_json::Value> = header
                    .iter()
                    .zip(row)
                    .map(|(h, v)| (h.to_string(), serde_json::Value::String(v.clone())))
                    .collect();
                writeln!(out, "{}", serde_json::Value::Object(obj))?;
            }
        }
    }
    Ok(())
}

fn numbers(cli: &Cli, out: &mut dyn Write, q: &str, n_max: usize, p: Option<u64>) -> Result<i32, CliError> {
    let q = parse_q(q)?;
    if let Some(p) = p {
        PadicContext::new(p, cli.precision)?;
    }
    let table = q_euler_numbers(n_max, &q)?;
    let mut header = vec!["n", "value"];
    if p.is_some() {
        header.push("v_p");
    }
    let rows: Vec<Vec<String>> = table
        .values()
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let mut row = vec![n.to_string(), e.to_string()];
            if let Some(p) = p {
                row.push(valuation_rat(e, p).map_or("inf".to_string(), |v| v.to_string()));
            }
            row
        })
        .collect();
    write_rows(cli, out, &header, &rows)?;
    Ok(EXIT_OK)
}

fn character(id: &str) -> Result<DirichletCharacter, CliError> {
    Ok(parse_character_id(id)?)
}

fn verify_grid(args: &VerifyArgs) -> Result<GridSpec, CliError> {
    let p = args.p;
    let q = match (&args.q, args.claim) {
        (Some(q), _) => parse_q(q)?,
        (None, _) => return Err(CliError::Usage("--q is required".into())),
    };
    if q == -RBig::ONE {
        return Err(CliError::Usage("q = -1 is excluded".into()));
    }
    if !args.allow_out_of_hypothesis {
        check_disc(&q, p)?;
    }
    let ns: Vec<usize> = match args.n {
        Some(n) => vec![n],
        None => (0..=args.n_max).collect(),
    };
    let ks = |default_max: usize, start: usize| -> Vec<usize> {
        match args.k {
            Some(k) => vec![k],
            None => (start..=args.k_max.unwrap_or(default_max)).collect(),
        }
    };
    let mut grid = GridSpec::new();
    match args.claim {
        Claim::Theorem1 => ns.iter().for_each(|&n| grid.push(GridItem::Theorem1 { p, q: q.clone(), n })),
        Claim::Integrality => ns.iter().for_each(|&n| grid.push(GridItem::Integrality { p, q: q.clone(), n })),
        Claim::Stability | Claim::Witt => {
            let n_max = ns.iter().copied().max().unwrap_or(0);
            for k in ks(4, 1) {
                let k = k as u32;
                grid.push(match args.claim {
                    Claim::Stability => GridItem::Stability { p, q: q.clone(), n_max, k },
                    _ => GridItem::Witt { p, q: q.clone(), n_max, k },
                });
            }
        }
        Claim::Kummer => {
            let chi = character(args.chi.as_deref().unwrap_or("1:0"))?;
            let n = args.n.unwrap_or(1) as u32;
            let k = args.k.ok_or_else(|| CliError::Usage("kummer needs --k".into()))?;
            let period = crate::arith::pow_u64(p, n) as usize * (p as usize).saturating_sub(1);
            let k_prime = args.k_prime.unwrap_or(k + period);
            grid.push(GridItem::Kummer { p, q, chi, k, k_prime, n });
        }
        Claim::Eq26 => {
            let chi = character(args.chi.as_deref().ok_or_else(|| CliError::Usage("eq26 needs --chi".into()))?)?;
            for &n in &ns {
                if q == RBig::ONE {
                    grid.push(GridItem::Eq26Classical { p, chi: chi.clone(), n });
                } else {
                    grid.push(GridItem::Eq26 { p, q: q.clone(), chi: chi.clone(), n });
                }
            }
        }
        Claim::Interpolation => {
            let chi = character(args.chi.as_deref().unwrap_or("1:0"))?;
            for k in ks(2, 0) {
                grid.push(GridItem::Interpolation { p, q: q.clone(), chi: chi.clone(), k });
            }
        }
        Claim::Eq4 => {
            let ms: Vec<u32> = args.m.map_or((0..=4).collect(), |m| vec![m]);
            let levels: Vec<u32> = args.level.map_or((1..=4).collect(), |l| vec![l]);
            for &m in &ms {
                for &level in &levels {
                    grid.push(GridItem::FunctionalEquation { p, q: q.clone(), m, level });
                }
            }
        }
    }
    Ok(grid)
}

fn verify(cli: &Cli, out: &mut dyn Write, args: &VerifyArgs) -> Result<i32, CliError> {
    PadicContext::new(args.p, cli.precision)?;
    let grid = verify_grid(args)?;
    let verifier = Verifier::new(cli.precision)
        .with_rho_max(args.rho_max)
        .allow_out_of_hypothesis(args.allow_out_of_hypothesis);
    let reports = run_grid(&verifier, &grid);
    write_reports(cli, out, &reports, args.rho_max)?;
    let errors: BTreeSet<String> = reports
        .iter()
        .filter(|r| r.verdict == Verdict::UsageError)
        .filter_map(|r| r.params.get("error").map(|e| e.to_string()))
        .collect();
    for e in errors {
        eprintln!("error: {e}");
    }
    Ok(exit_code(&reports))
}

/// 1 on any FAIL, else 2 on any usage error, else 3 on any insufficient
/// precision, else 0.
pub fn exit_code(reports: &[CongruenceReport]) -> i32 {
    let has = |v: Verdict| reports.iter().any(|r| r.verdict == v);
    if has(Verdict::Fail) {
        EXIT_FAIL
    } else if has(Verdict::UsageError) {
        EXIT_USAGE
    } else if has(Verdict::InsufficientPrecision) {
        EXIT_UNCERTIFIED
    } else {
        EXIT_OK
    }
}

fn write_reports(cli: &Cli, out: &mut dyn Write, reports: &[CongruenceReport], rho_max: u32) -> Result<(), CliError> {
    match cli.format {
        Format::Json => write_json_lines(out, reports)?,
        Format::Csv => write_csv(out, reports)?,
        Format::Table => {
            writeln!(out, "# precision={} rho_max={}", cli.precision, rho_max)?;
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.claim.to_string(),
                        r.params.to_string(),
                        r.required_val.to_string(),
                        r.achieved_val.to_string(),
                        r.verdict.to_string(),
                        r.prec.to_string(),
                    ]
                })
                .collect();
            write_table(out, &["claim", "params", "required", "achieved", "verdict", "prec"], &rows)?;
            let passed = reports.iter().filter(|r| r.passed()).count();
            writeln!(out, "# {passed}/{} PASS", reports.len())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LvalueOutput {
    #[serde(flatten)]
    value: LValue,
    base_chi: String,
    twist: String,
    precision: String,
    rho_max: String,
    /// The closed form of `L(-k, chi omega^k)`, when `s = -k` and the twist is `k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<String>,
}

fn lvalue(cli: &Cli, out: &mut dyn Write, args: &LvalueArgs) -> Result<i32, CliError> {
    let ctx = PadicContext::new(args.p, cli.precision)?;
    let q = parse_q(&args.q)?;
    let s = SArg::parse(&args.s, ctx)?;
    let base = character(&args.chi)?;
    let k = args.twist.unwrap_or(match s {
        SArg::Integer(s) if s <= 0 => -s,
        _ => 0,
    });
    let chi = twist(&base, k, ctx)?;
    let mut query = LSeriesQuery::new(s.clone(), chi, q.clone(), ctx);
    query.target = args.target;
    query.rho_max = args.rho_max;
    let lv = l_value(&query)?;
    let closed_form = match s {
        SArg::Integer(s) if s <= 0 && -s == k => {
            Some(interpolation_rhs(&EulerCache::new(), k as usize, &base, &q, ctx)?.to_string())
        }
        _ => None,
    };
    let mut lv = lv;
    lv.s = args.s.clone();
    let certified = lv.certified;
    let output = LvalueOutput {
        value: lv,
        base_chi: base.id(),
        twist: k.to_string(),
        precision: cli.precision.to_string(),
        rho_max: args.rho_max.to_string(),
        closed_form,
    };
    match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&output).expect("serializable"))?,
        Format::Csv | Format::Table => {
            let mut rows = vec![
                vec!["s".into(), output.value.s.clone()],
                vec!["chi".into(), output.value.chi.clone()],
                vec!["base_chi".into(), output.base_chi.clone()],
                vec!["twist".into(), output.twist.clone()],
                vec!["q".into(), output.value.q.clone()],
                vec!["p".into(), output.value.p.clone()],
                vec!["precision".into(), output.precision.clone()],
                vec!["rho_used".into(), output.value.rho_used.clone()],
                vec!["certified_abs_precision".into(), output.value.certified_abs_precision.clone()],
                vec!["certified".into(), output.value.certified.to_string()],
                vec!["value".into(), output.value.value.to_string()],
            ];
            if let Some(c) = &output.closed_form {
                rows.push(vec!["closed_form".into(), c.clone()]);
            }
            write_rows(cli, out, &["field", "value"], &rows)?;
        }
    }
    if !certified {
        eprintln!(
            "warning: convergence not certified ({} digits agree at rho = {})",
            output.value.certified_abs_precision, output.value.rho_used
        );
        if !args.allow_uncertified {
            return Ok(EXIT_UNCERTIFIED);
        }
    }
    Ok(EXIT_OK)
}

fn chars(cli: &Cli, out: &mut dyn Write, d: u64) -> Result<i32, CliError> {
    let rows: Vec<Vec<String>> = enumerate_characters(d)?
        .iter()
        .map(|c| {
            vec![
                c.id(),
                c.modulus().to_string(),
                c.order().to_string(),
                c.conductor().to_string(),
                c.parity().to_string(),
                c.is_primitive().to_string(),
            ]
        })
        .collect();
    write_rows(cli, out, &["id", "modulus", "order", "conductor", "parity", "primitive"], &rows)?;
    Ok(EXIT_OK)
}
