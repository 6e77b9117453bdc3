//! The `ringrep` command-line driver.
//!
//! Exit codes: 0 when everything checked out, 1 when the computation
//! succeeded but a reference claim or a cached table disagreed with it
//! (the disagreement goes to stderr as JSON), 2 for invalid input or an
//! exceeded size budget, 3 for I/O failures and internal errors.

pub mod cache;
mod text;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ringrep::charkit::SlTable;
use ringrep::dims::{compare_dimensions, DimensionReport};
use ringrep::dlgeom::{
    degree_counts, flag_positions, gram_check, span_check, DecompositionReport, DlContext, ItemizationRow, Variety,
};
use ringrep::gfield::ambient_tower;
use ringrep::matgrp::{exhaustive_uniqueness, run_lemma_suite, LemmaSuiteReport};
use serde::Serialize;
use serde_json::{json, Value};
use text::{aligned, list, status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ringrep::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ringrep::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::InvalidInput(_) | E::Budget(_) | E::Precondition(_)) => EXIT_INVALID,
            CliError::Core(_) | CliError::Io { .. } => EXIT_INTERNAL,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "ringrep", version, about = "Representations of SL_n over F_q[eps]/(eps^r)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of the report on stdout; csv is available for dimension tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Recompute the character table and compare it with the cached copy
    /// instead of loading it. Nothing is written to the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Cache directory; overrides RINGREP_CACHE_DIR.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Character table of SL_n(F_q[eps]/eps^r).
    Table(GroupArgs),
    /// Compare the computed degrees at level two with the reference table.
    VerifyDims {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        /// Report the known odd-q (q^2-1)/2 row discrepancy as a warning.
        #[arg(long)]
        expect_table_erratum: bool,
    },
    /// Decompose the isotypic pieces of a covering's cohomology.
    Dl {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        /// xtil, xtil-prime or xtil-pp; all three when omitted.
        #[arg(long, value_parser = parse_variety)]
        variety: Option<Variety>,
        /// Index of a single character of the covering group.
        #[arg(long)]
        omega: Option<usize>,
    },
    /// Gram matrix of R(theta) over both tori, against the orbit count.
    Gram {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        /// Largest n searched for norm-orbit witnesses.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=6))]
        n_max: u32,
    },
    /// Rank of the family of R's and what its span reaches.
    Span {
        #[arg(long, value_parser = parse_q)]
        q: u64,
    },
    /// Seeded checks of the commutator decompositions and level partition.
    Lemmas {
        #[arg(long, default_value_t = 3, value_parser = parse_n)]
        n: usize,
        #[arg(long, default_value_t = 2, value_parser = parse_q)]
        q: u64,
        #[arg(long, default_value_t = 3, value_parser = parse_r)]
        r: usize,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..=1_000_000))]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Relative position of (L, F(L)) for lines over F_{q^m}[eps]/eps^2.
    Flags {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=4))]
        m: u32,
    },
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    #[arg(long, default_value_t = 2, value_parser = parse_n)]
    pub n: usize,
    #[arg(long, value_parser = parse_q)]
    pub q: u64,
    #[arg(long, default_value_t = 2, value_parser = parse_r)]
    pub r: usize,
}

fn parse_in<T: std::str::FromStr + PartialEq + Copy + std::fmt::Display>(
    s: &str,
    allowed: &[T],
) -> std::result::Result<T, String> {
    let shown: Vec<String> = allowed.iter().map(ToString::to_string).collect();
    s.parse::<T>().ok().filter(|v| allowed.contains(v)).ok_or_else(|| format!("expected one of {}", shown.join(", ")))
}

fn parse_q(s: &str) -> std::result::Result<u64, String> {
    parse_in(s, &[2, 3, 5])
}

fn parse_r(s: &str) -> std::result::Result<usize, String> {
    parse_in(s, &[1, 2, 3])
}

fn parse_n(s: &str) -> std::result::Result<usize, String> {
    parse_in(s, &[2, 3])
}

fn parse_variety(s: &str) -> std::result::Result<Variety, String> {
    Variety::parse(s).map_err(|e| e.to_string())
}

/// What a command produced.
struct Report {
    json: Value,
    text: String,
    csv: Option<String>,
    /// Failing items; nonempty means exit 1.
    mismatches: Vec<Value>,
    warnings: Vec<String>,
}

impl Report {
    fn new<T: Serialize>(json: &T, text: String) -> Self {
        Report {
            json: serde_json::to_value(json).expect("reports serialize"),
            text,
            csv: None,
            mismatches: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

struct Session<'a> {
    cache_dir: PathBuf,
    no_cache: bool,
    stderr: &'a mut dyn Write,
    cache_mismatches: Vec<Value>,
}

impl Session<'_> {
    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.stderr, "{msg}");
    }

    /// Loads the table from the cache or computes it. Under `--no-cache`,
    /// computes it and diffs against any cached copy.
    fn table(&mut self, n: usize, q: u64, r: usize) -> Result<SlTable> {
        let tower = ambient_tower(q)?;
        let path = cache::cache_file(&self.cache_dir, n, q, r);
        if self.no_cache {
            let fresh = SlTable::compute(tower, n, q, r)?;
            match cache::read(&path) {
                Ok(Some(stored)) => {
                    let a = serde_json::to_value(&stored).expect("table serializes");
                    let b = serde_json::to_value(fresh.json()).expect("table serializes");
                    let diff = cache::json_diff(&a, &b, 20);
                    if diff.is_empty() {
                        self.note(&format!("cache: {} matches the recomputed table", path.display()));
                    } else {
                        self.cache_mismatches.push(json!({ "cache_file": path, "differences": diff }));
                    }
                }
                Ok(None) => self.note(&format!("cache: no copy at {} to compare", path.display())),
                Err(e) => self.cache_mismatches.push(json!({ "cache_file": path, "unreadable": e })),
            }
            return Ok(fresh);
        }
        match cache::read(&path) {
            Ok(Some(stored)) => match SlTable::with_table(tower.clone(), n, q, r, &stored) {
                Ok(t) => return Ok(t),
                Err(e) => self.note(&format!("cache: ignoring {}: {e}", path.display())),
            },
            Ok(None) => {}
            Err(e) => self.note(&format!("cache: ignoring {e}")),
        }
        let fresh = SlTable::compute(tower, n, q, r)?;
        if let Err(e) = cache::write_atomic(&path, &cache::to_pretty(&fresh.json())) {
            self.note(&format!("cache: could not write {}: {e}", path.display()));
        }
        Ok(fresh)
    }

    fn context(&mut self, q: u64) -> Result<DlContext> {
        let table = self.table(2, q, 2)?;
        Ok(DlContext::with_table(table)?)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let mut session = Session {
        cache_dir: cache::cache_dir(cli.cache_dir.as_deref()),
        no_cache: cli.no_cache,
        stderr,
        cache_mismatches: Vec::new(),
    };
    let report = match execute(&cli, &mut session) {
        Ok(r) => r,
        Err(e) => {
            session.note(&format!("error: {e}"));
            return e.exit_code();
        }
    };
    match emit(&cli, &report, stdout) {
        Ok(()) => {}
        Err(e) => {
            session.note(&format!("error: {e}"));
            return e.exit_code();
        }
    }
    for w in &report.warnings {
        session.note(&format!("warning: {w}"));
    }
    let mut mismatches = report.mismatches.clone();
    mismatches.extend(session.cache_mismatches.iter().cloned());
    if mismatches.is_empty() {
        EXIT_OK
    } else {
        let diff = serde_json::to_string_pretty(&json!({ "mismatches": mismatches })).expect("diff serializes");
        session.note(&diff);
        EXIT_MISMATCH
    }
}

fn emit(cli: &Cli, report: &Report, stdout: &mut dyn Write) -> Result<()> {
    if let Some(path) = &cli.out {
        cache::write_atomic(path, &cache::to_pretty(&report.json))
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    let body = match cli.format {
        Format::Text => report.text.clone().into_bytes(),
        Format::Json => cache::to_pretty(&report.json),
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| CliError::Usage("csv output is only available for table and verify-dims".into()))?
            .into_bytes(),
    };
    stdout.write_all(&body).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

fn execute(cli: &Cli, s: &mut Session) -> Result<Report> {
    match &cli.command {
        Command::Table(g) => table_cmd(s, g.n, g.q, g.r),
        Command::VerifyDims { q, expect_table_erratum } => verify_dims(s, *q, *expect_table_erratum),
        Command::Dl { q, variety, omega } => dl(s, *q, *variety, *omega),
        Command::Gram { q, n_max } => gram_cmd(s, *q, *n_max),
        Command::Span { q } => span_cmd(s, *q),
        Command::Lemmas { n, q, r, trials, seed } => lemmas(*n, *q, *r, *trials as usize, *seed),
        Command::Flags { q, m } => flags(*q, *m),
    }
}

fn table_cmd(s: &mut Session, n: usize, q: u64, r: usize) -> Result<Report> {
    let t = s.table(n, q, r)?;
    let counts = degree_counts(&t);
    let order = t.group.order() as u64;
    let squares: u64 = t.table.degrees().iter().map(|d| d * d).sum();
    let rows: Vec<Vec<String>> = counts.iter().map(|(d, c)| vec![d.to_string(), c.to_string()]).collect();
    let mut text = format!(
        "SL_{n}(F_{q}[eps]/eps^{r}): |G| = {order}, {} classes, {} irreducibles\n",
        t.classes.len(),
        t.table.num_classes()
    );
    text += &aligned(&["degree", "count"], &rows);
    text += &format!("sum of squared degrees = {squares}\n");
    let mut report = Report::new(&t.json(), text);
    let mut csv = String::from("degree,count\n");
    for (d, c) in &counts {
        csv += &format!("{d},{c}\n");
    }
    report.csv = Some(csv);
    if squares != order {
        return Err(ringrep::Error::Consistency(format!("sum of squares {squares} != |G| = {order}")).into());
    }
    Ok(report)
}

fn verify_dims(s: &mut Session, q: u64, expect_erratum: bool) -> Result<Report> {
    let t = s.table(2, q, 2)?;
    let rep: DimensionReport = compare_dimensions(q, &t.table.degrees())?;
    if !rep.squares_match_order() {
        return Err(ringrep::Error::Consistency("computed degrees do not square-sum to |G|".into()).into());
    }
    let mut report = Report::new(&rep, rep.to_text());
    report.csv = Some(rep.to_csv());
    let bad: Vec<Value> = rep.mismatches().map(|r| serde_json::to_value(r).expect("row serializes")).collect();
    if !bad.is_empty() {
        if expect_erratum && rep.only_erratum() {
            for r in rep.mismatches() {
                report.warnings.push(format!(
                    "row {} (degree {}): printed count {}, computed {}; expected erratum",
                    r.label, r.degree, r.expected, r.computed
                ));
            }
        } else {
            report.mismatches = bad;
        }
    }
    Ok(report)
}

#[derive(Serialize)]
struct VarietyReport {
    variety: Variety,
    pieces: Vec<DecompositionReport>,
    checks: Vec<ItemizationRow>,
}

fn constituents(rep: &DecompositionReport) -> String {
    let parts: Vec<String> = rep
        .terms
        .iter()
        .map(|t| {
            let sign = if t.multiplicity < 0 { "-" } else { "+" };
            let m = t.multiplicity.unsigned_abs();
            let mult = if m > 1 { format!("{m}*") } else { String::new() };
            format!("{sign}{mult}{}#{}", t.degree, t.index)
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

fn dl(s: &mut Session, q: u64, variety: Option<Variety>, omega: Option<usize>) -> Result<Report> {
    let ctx = s.context(q)?;
    let varieties = variety.map_or(Variety::ALL.to_vec(), |v| vec![v]);
    let mut out = Vec::new();
    let mut text = String::new();
    let mut mismatches = Vec::new();
    for v in varieties {
        let pieces = ctx.assemble_all(v)?;
        let mut checks = match v {
            Variety::Xtil => ctx.xtil_itemization()?,
            Variety::XtilPrime => ctx.xtil_prime_itemization()?,
            Variety::XtilPp => ctx.xtilpp_itemization()?,
        };
        let mut reports: Vec<DecompositionReport> = pieces.iter().map(|vc| ctx.report(vc)).collect();
        if let Some(i) = omega {
            if i >= reports.len() {
                return Err(CliError::Usage(format!("{} has {} characters, no index {i}", v.name(), reports.len())));
            }
            reports = vec![reports.swap_remove(i)];
            checks = vec![checks.swap_remove(i)];
        }
        text += &format!("{} over q = {}\n", v.name(), q);
        let rows: Vec<Vec<String>> = reports
            .iter()
            .zip(&checks)
            .map(|(r, c)| {
                vec![
                    list(&r.character),
                    r.virtual_degree.to_string(),
                    constituents(r),
                    c.case.clone(),
                    list(&c.expected),
                    status(c.pass),
                ]
            })
            .collect();
        text += &aligned(&["omega", "degree", "constituents", "case", "expected", "check"], &rows);
        if checks.iter().any(|c| c.literal_match == Some(false)) {
            text += "note: the H^2(X~') part is compared by degree; the literal sum over omega'^2 = 1 \
                     contains the trivial representation and never fits\n";
        }
        text += "\n";
        for c in checks.iter().filter(|c| !c.pass) {
            mismatches.push(json!({ "variety": v, "row": c }));
        }
        out.push(VarietyReport { variety: v, pieces: reports, checks });
    }
    let mut report = Report::new(&json!({ "q": q, "varieties": out }), text);
    report.mismatches = mismatches;
    Ok(report)
}

fn gram_cmd(s: &mut Session, q: u64, n_max: u32) -> Result<Report> {
    let ctx = s.context(q)?;
    let rep = gram_check(&ctx, n_max)?;
    let members: Vec<Vec<String>> = rep
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            vec![
                i.to_string(),
                format!("{:?}", m.torus).to_lowercase(),
                list(&m.character),
                m.regular.to_string(),
                m.degree.to_string(),
            ]
        })
        .collect();
    let mut text = format!("R(theta) over q = {q}\n");
    text += &aligned(&["#", "torus", "theta", "regular", "degree"], &members);
    text += "\ngram matrix\n";
    for row in &rep.matrix {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>2}")).collect();
        text += &(cells.join(" ") + "\n");
    }
    text += &format!(
        "\nregular pairs against the orbit count: {}\npairs with no norm-orbit witness up to n = {}: {}, nonorthogonal: {}\n",
        status(rep.predicted_mismatches.is_empty()),
        n_max,
        rep.nonequivalent_pairs,
        rep.nonorthogonal.len()
    );
    let mut report = Report::new(&rep, text);
    for e in rep.predicted_mismatches.iter().chain(&rep.nonorthogonal) {
        report.mismatches.push(serde_json::to_value(e).expect("entry serializes"));
    }
    Ok(report)
}

fn span_cmd(s: &mut Session, q: u64) -> Result<Report> {
    let ctx = s.context(q)?;
    let rep = span_check(&ctx)?;
    let mut text = format!(
        "family of {} characters over q = {}, {} irreducibles\nrank {}\n",
        rep.family_size, q, rep.num_irreducibles, rep.rank
    );
    text += &format!("orthogonal to the whole family: {}\n", list(&rep.outside));
    text += &format!("not in the rational span: {}\n", list(&rep.not_in_span));
    text += &match &rep.regular_solution {
        Some(c) => format!("regular character = combination with coefficients {}\n", list(c)),
        None => "regular character is not in the span\n".to_string(),
    };
    Ok(Report::new(&rep, text))
}

#[derive(Serialize)]
struct LemmasJson {
    suite: LemmaSuiteReport,
    uniqueness: Value,
}

fn lemmas(n: usize, q: u64, r: usize, trials: usize, seed: u64) -> Result<Report> {
    let suite = run_lemma_suite(n, q, r, trials, seed)?;
    let uniqueness = match exhaustive_uniqueness(q, r) {
        Ok(cases) => json!({ "n": 2, "q": q, "r": r, "cases": cases, "pass": true }),
        Err(ringrep::Error::Consistency(msg)) => json!({ "n": 2, "q": q, "r": r, "pass": false, "failure": msg }),
        Err(e) => return Err(e.into()),
    };
    let rows: Vec<Vec<String>> = suite
        .checks
        .iter()
        .map(|c| vec![c.name.clone(), c.trials.to_string(), c.passed.to_string(), status(c.ok())])
        .collect();
    let mut text = format!("SL_{n}(F_{q}[eps]/eps^{r}), seed {seed}\n");
    text += &aligned(&["check", "trials", "passed", "status"], &rows);
    let p = &suite.partition;
    text += &format!(
        "level partition: {} cells cover {} of {} non-identity kernel elements, disjoint {}, order-free {}: {}\n",
        p.cells,
        p.covered,
        p.kernel_size - 1,
        p.disjoint,
        p.order_free,
        status(p.ok())
    );
    let unique_pass = uniqueness["pass"] == json!(true);
    text += &format!(
        "exhaustive uniqueness on SL_2(F_{q}[eps]/eps^{r}): {} cases, {}\n",
        uniqueness.get("cases").map_or("-".to_string(), ToString::to_string),
        status(unique_pass)
    );
    let mut report = Report::new(&LemmasJson { suite: suite.clone(), uniqueness: uniqueness.clone() }, text);
    for c in suite.checks.iter().filter(|c| !c.ok()) {
        report.mismatches.push(serde_json::to_value(c).expect("check serializes"));
    }
    if !p.ok() {
        report.mismatches.push(serde_json::to_value(p).expect("partition serializes"));
    }
    if !unique_pass {
        report.mismatches.push(uniqueness);
    }
    Ok(report)
}

fn flags(q: u64, m: u32) -> Result<Report> {
    let rep = flag_positions(q, m)?;
    let rows = vec![
        vec!["same".into(), rep.same.to_string()],
        vec!["close".into(), rep.close.to_string()],
        vec!["transverse".into(), rep.transverse.to_string()],
    ];
    let mut text = format!("{} lines over F_{{{q}^{m}}}[eps]/eps^2\n", rep.lines);
    text += &aligned(&["position of (L, F(L))", "lines"], &rows);
    Ok(Report::new(&rep, text))
}

/// Entry point used by the binary.
pub fn main_with_env() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run(std::env::args_os(), &mut out, &mut err)
}
