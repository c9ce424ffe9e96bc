//! Batch driver behind the `qcong` binary.
//!
//! Records go to stdout (or `--out`), one per verdict, followed by a summary
//! line; diagnostics go to stderr. Exit codes: 0 when nothing failed, 1 when
//! any instance failed, 2 for usage or configuration errors.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::congruence::{
    default_samples, lemma_sample_bound, parametric_sample_bound, verify_lemma21,
    verify_parametric, verify_series_identity, verify_t3_both_ranges, verify_theorem,
    EngineError, SeriesIdentity, TheoremFamily, Verdict,
};
use crate::cyclotomic::{cyclotomic, CyclotomicCache};
use crate::modform::{eta_coefficients, verify_modform, EtaCoefficients};
use crate::padic::{is_prime, verify_classical, ClassicalFamily, PadicError};
use crate::polyring::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write output: {0}")]
    Io(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Inclusive integer range, written `a..b` or as a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InclusiveRange {
    pub lo: u64,
    pub hi: u64,
}

impl InclusiveRange {
    pub fn single(v: u64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn is_single(&self) -> bool {
        self.lo == self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

impl FromStr for InclusiveRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad bound {t:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum FamilyTag {
    T1,
    T2,
    T3,
    E05,
    Conj413,
    ModPhi,
    Param,
    L21,
    B2,
    H2,
    LR,
    Cor13,
    Side,
    MP,
    Hamme0,
    RF34,
    Modform,
}

impl FamilyTag {
    fn theorem(self) -> Option<TheoremFamily> {
        Some(match self {
            FamilyTag::T1 => TheoremFamily::T1,
            FamilyTag::T2 => TheoremFamily::T2,
            FamilyTag::T3 => TheoremFamily::T3,
            FamilyTag::E05 => TheoremFamily::E05,
            FamilyTag::Conj413 => TheoremFamily::Conj413,
            FamilyTag::ModPhi => TheoremFamily::ModPhi,
            _ => return None,
        })
    }

    fn classical(self) -> Option<ClassicalFamily> {
        Some(match self {
            FamilyTag::B2 => ClassicalFamily::B2,
            FamilyTag::H2 => ClassicalFamily::H2,
            FamilyTag::LR => ClassicalFamily::LR,
            FamilyTag::Cor13 => ClassicalFamily::Cor13,
            FamilyTag::Side => ClassicalFamily::Side,
            FamilyTag::MP => ClassicalFamily::MP,
            FamilyTag::Hamme0 => ClassicalFamily::Hamme0,
            FamilyTag::RF34 => ClassicalFamily::RF34,
            _ => return None,
        })
    }

    /// Families indexed by a prime `p` rather than an odd `n`.
    pub fn is_prime_indexed(self) -> bool {
        self.classical().is_some() || self == FamilyTag::Modform
    }

    pub fn tag(self) -> &'static str {
        if let Some(t) = self.theorem() {
            return t.tag();
        }
        if let Some(c) = self.classical() {
            return c.tag();
        }
        match self {
            FamilyTag::Param => "PARAM",
            FamilyTag::L21 => "L21",
            _ => "MODFORM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    #[value(name = "json-lines", alias = "json")]
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum SeriesTag {
    Origin,
    QDixon,
    Watson,
}

/// Which values of `ell` to sweep for families that take one.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EllPolicy {
    /// Every `0 <= ell <= (n-1)/2`.
    #[default]
    All,
    List(Vec<u64>),
}

impl FromStr for EllPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(EllPolicy::All);
        }
        s.split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad ell {t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(EllPolicy::List)
    }
}

impl EllPolicy {
    fn values(&self, n: u64) -> Vec<u64> {
        let max = (n.max(1) - 1) / 2;
        match self {
            EllPolicy::All => (0..=max).collect(),
            EllPolicy::List(v) => v.iter().copied().filter(|&l| l <= max).collect(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qcong", version, about = "Exact checks of q-congruences, q-series identities and p-adic supercongruences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Shorthand for `--format json-lines`.
    #[arg(long)]
    pub json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

impl OutputArgs {
    fn format(&self) -> OutputFormat {
        if self.json {
            OutputFormat::JsonLines
        } else {
            self.format
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check one or more congruence families over a range.
    Verify {
        /// Family tags, repeatable or comma separated.
        #[arg(long = "family", value_enum, value_delimiter = ',', required = true)]
        families: Vec<FamilyTag>,
        /// Odd n, as `a..b` or a single value.
        #[arg(long)]
        n: Option<InclusiveRange>,
        /// Odd primes p, as `a..b` or a single value.
        #[arg(long)]
        p: Option<InclusiveRange>,
        /// `all` or a comma-separated list, for T3 and PARAM.
        #[arg(long, default_value = "all")]
        ell: EllPolicy,
        /// Rational sample count for PARAM and L21 (default: the minimum needed).
        #[arg(long)]
        samples: Option<usize>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare both sides of a q-series identity through a given order.
    Series {
        #[arg(value_enum)]
        identity: SeriesTag,
        #[arg(long, default_value_t = 100)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        ell: u64,
        #[arg(long, default_value = "2")]
        a: Rational,
        #[arg(long, default_value = "2")]
        b: Rational,
        #[arg(long, default_value = "3")]
        c: Rational,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the n-th cyclotomic polynomial.
    Cyclotomic { n: u64 },
    /// Print the nonzero coefficients a(n), n <= order, of q∏(1-q^{4j})^6.
    ExpandEta {
        #[arg(long)]
        order: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// A validated `verify` request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub families: Vec<FamilyTag>,
    pub n_range: Option<InclusiveRange>,
    pub p_range: Option<InclusiveRange>,
    pub ell_policy: EllPolicy,
    pub sample_count: Option<usize>,
    pub output: OutputFormat,
    pub jobs: usize,
}

/// One unit of work in a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Theorem { family: TheoremFamily, n: u64 },
    T3 { n: u64, ell: u64 },
    Param { n: u64, ell: u64, samples: usize },
    Lemma { n: u64, k: u64, samples: usize },
    Classical { family: ClassicalFamily, p: u64 },
    Modform { p: u64 },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl RunConfig {
    /// Expands the configuration into its instances, in report order.
    pub fn instances(&self) -> Result<Vec<Instance>, ConfigError> {
        if self.jobs == 0 {
            return Err(invalid("--jobs must be at least 1"));
        }
        let mut out = Vec::new();
        for &f in &self.families {
            if f.is_prime_indexed() {
                let range = self
                    .p_range
                    .ok_or_else(|| invalid(format!("family {} needs --p", f.tag())))?;
                let primes = prime_values(range)?;
                for p in primes {
                    out.push(match f.classical() {
                        Some(family) => Instance::Classical { family, p },
                        None => Instance::Modform { p },
                    });
                }
                continue;
            }
            let range = self
                .n_range
                .ok_or_else(|| invalid(format!("family {} needs --n", f.tag())))?;
            for n in odd_values(range)? {
                match f {
                    FamilyTag::T3 => {
                        for ell in self.ell_policy.values(n) {
                            out.push(Instance::T3 { n, ell });
                        }
                    }
                    FamilyTag::Param => {
                        let samples = self.samples_for(n, parametric_sample_bound(n))?;
                        for ell in self.ell_policy.values(n) {
                            out.push(Instance::Param { n, ell, samples });
                        }
                    }
                    FamilyTag::L21 => {
                        let samples = self.samples_for(n, lemma_sample_bound(n))?;
                        for k in 0..=(n - 1) / 2 {
                            out.push(Instance::Lemma { n, k, samples });
                        }
                    }
                    _ => out.push(Instance::Theorem {
                        family: f.theorem().expect("remaining tags are theorem families"),
                        n,
                    }),
                }
            }
        }
        if out.is_empty() {
            return Err(invalid("the requested ranges contain no instances"));
        }
        Ok(out)
    }

    fn samples_for(&self, n: u64, needed: usize) -> Result<usize, ConfigError> {
        match self.sample_count {
            None => Ok(needed),
            Some(s) if s >= needed => Ok(s),
            Some(s) => Err(invalid(format!("--samples {s} is below the {needed} needed at n = {n}"))),
        }
    }

    fn max_n(&self) -> u64 {
        self.n_range.map_or(1, |r| r.hi)
    }
}

fn odd_values(range: InclusiveRange) -> Result<Vec<u64>, ConfigError> {
    if range.is_single() && (range.lo == 0 || range.lo.is_multiple_of(2)) {
        return Err(invalid(format!("n = {} must be a positive odd integer", range.lo)));
    }
    Ok(range.iter().filter(|n| n % 2 == 1).collect())
}

fn prime_values(range: InclusiveRange) -> Result<Vec<u64>, ConfigError> {
    if range.is_single() && (range.lo == 2 || !is_prime(range.lo)) {
        return Err(invalid(format!("p = {} must be an odd prime", range.lo)));
    }
    Ok(range.iter().filter(|&p| p > 2 && is_prime(p)).collect())
}

fn skipped(family: &str, why: String) -> Verdict {
    Verdict::new(family).skipped(why)
}

fn engine_verdict(
    tag: &str,
    result: Result<Verdict, EngineError>,
    fill: impl FnOnce(Verdict) -> Verdict,
) -> Verdict {
    match result {
        Ok(v) => v,
        Err(e @ (EngineError::WrongResidueClass(_) | EngineError::OutOfRange(_))) => {
            fill(skipped(tag, e.to_string()))
        }
        Err(e) => {
            let mut v = fill(Verdict::new(tag));
            v.details = format!("error: {e}");
            v
        }
    }
}

/// Runs one instance; inapplicable instances come back skipped.
pub fn run_instance(inst: &Instance, cache: &CyclotomicCache, eta: Option<&EtaCoefficients>) -> Verdict {
    match *inst {
        Instance::Theorem { family, n } => {
            engine_verdict(family.tag(), verify_theorem(family, n, 0, cache), |v| v.with_n(n))
        }
        Instance::T3 { n, ell } => {
            let result = verify_t3_both_ranges(n, ell, cache).map(|(full, short)| {
                let mut v = full.clone();
                v.passed = full.passed && short.passed;
                v.millis += short.millis;
                v.details = format!(
                    "k <= {}: {} ({}); k <= {}: {} ({})",
                    n - 1,
                    verdict_word(&full),
                    full.details,
                    (n - 1) / 2 + ell,
                    verdict_word(&short),
                    short.details
                );
                v
            });
            engine_verdict("T3", result, |v| v.with_n(n).with_ell(ell))
        }
        Instance::Param { n, ell, samples } => engine_verdict(
            "PARAM",
            verify_parametric(n, ell, &default_samples(samples), cache),
            |v| v.with_n(n).with_ell(ell),
        ),
        Instance::Lemma { n, k, samples } => engine_verdict(
            "L21",
            verify_lemma21(n, k, &default_samples(samples), cache),
            |v| v.with_n(n).with_ell(k),
        ),
        Instance::Classical { family, p } => match verify_classical(family, p) {
            Ok(v) => v,
            Err(e @ PadicError::WrongResidueClass(_)) => skipped(family.tag(), e.to_string()).with_p(p),
            Err(e) => {
                let mut v = Verdict::new(family.tag()).with_p(p);
                v.details = format!("error: {e}");
                v
            }
        },
        Instance::Modform { p } => {
            let eta = eta.expect("expansion prepared for MODFORM");
            verify_modform(p, eta).unwrap_or_else(|e| {
                let mut v = Verdict::new("MODFORM").with_p(p);
                v.details = format!("error: {e}");
                v
            })
        }
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    if v.skipped {
        "skip"
    } else if v.passed {
        "pass"
    } else {
        "FAIL"
    }
}

/// Runs every instance of the configuration on `jobs` threads, preserving order.
pub fn execute(config: &RunConfig) -> Result<Vec<Verdict>, ConfigError> {
    let instances = config.instances()?;
    let cache = CyclotomicCache::for_odd_up_to(config.max_n());
    let eta = config
        .families
        .contains(&FamilyTag::Modform)
        .then(|| eta_coefficients(config.p_range.map_or(1, |r| r.hi).max(1)));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        instances
            .par_iter()
            .map(|inst| run_instance(inst, &cache, eta.as_ref()))
            .collect()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(verdicts: &[Verdict]) -> Self {
        Self {
            total: verdicts.len(),
            passed: verdicts.iter().filter(|v| v.passed).count(),
            failed: verdicts.iter().filter(|v| v.failed()).count(),
            skipped: verdicts.iter().filter(|v| v.skipped).count(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            EXIT_OK
        } else {
            EXIT_FAILURE
        }
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "total {} passed {} failed {} skipped {}",
            self.total, self.passed, self.failed, self.skipped
        )
    }
}

fn modulus_text(v: &Verdict) -> String {
    if v.modulus.is_empty() {
        let exact = v.n == Some(1) && !v.skipped;
        return if exact { "=" } else { "-" }.into();
    }
    v.modulus
        .iter()
        .map(|&(i, e)| if e == 1 { format!("Φ{i}") } else { format!("Φ{i}^{e}") })
        .collect::<Vec<_>>()
        .join("·")
}

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

/// The report for `verdicts`: one line per record plus the summary line.
pub fn render(verdicts: &[Verdict], format: OutputFormat) -> String {
    let mut s = String::new();
    match format {
        OutputFormat::JsonLines => {
            for v in verdicts {
                s.push_str(&serde_json::to_string(v).expect("verdicts serialize"));
                s.push('\n');
            }
            let sum = Summary::of(verdicts);
            let line = serde_json::json!({
                "summary": {"total": sum.total, "passed": sum.passed, "failed": sum.failed, "skipped": sum.skipped}
            });
            writeln!(s, "{line}").unwrap();
        }
        OutputFormat::Table => {
            writeln!(s, "{:<8} {:>5} {:>4} {:>5} {:<16} {:<6} {:>8}", "family", "n", "ell", "p", "modulus", "result", "ms").unwrap();
            for v in verdicts {
                writeln!(
                    s,
                    "{:<8} {:>5} {:>4} {:>5} {:<16} {:<6} {:>8}",
                    v.family,
                    opt(v.n),
                    opt(v.ell),
                    opt(v.p),
                    modulus_text(v),
                    verdict_word(v),
                    v.millis
                )
                .unwrap();
            }
            writeln!(s, "{}", Summary::of(verdicts)).unwrap();
        }
    }
    s
}

fn emit(report: &str, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), ConfigError> {
    match &output.out {
        Some(path) => File::create(path)
            .and_then(|mut f| f.write_all(report.as_bytes()))
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(report.as_bytes()).map_err(|e| ConfigError::Io(e.to_string())),
    }
}

fn run_command(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, ConfigError> {
    match cmd {
        Command::Verify { families, n, p, ell, samples, jobs, output } => {
            let config = RunConfig {
                families,
                n_range: n,
                p_range: p,
                ell_policy: ell,
                sample_count: samples,
                output: output.format(),
                jobs: jobs.unwrap_or_else(default_jobs),
            };
            let verdicts = execute(&config)?;
            for v in verdicts.iter().filter(|v| v.failed()) {
                let _ = writeln!(stderr, "FAIL {} n={} ell={} p={}: {}", v.family, opt(v.n), opt(v.ell), opt(v.p), v.details);
            }
            emit(&render(&verdicts, config.output), &output, stdout)?;
            Ok(Summary::of(&verdicts).exit_code())
        }
        Command::Series { identity, order, ell, a, b, c, output } => {
            let id = match identity {
                SeriesTag::Origin => SeriesIdentity::Origin,
                SeriesTag::QDixon => SeriesIdentity::QDixon { ell, b, c },
                SeriesTag::Watson => SeriesIdentity::Watson { a },
            };
            if order == 0 {
                return Err(invalid("--order must be at least 1"));
            }
            let v = verify_series_identity(&id, order).map_err(|e| invalid(e.to_string()))?;
            let _ = writeln!(stderr, "{}: {}", v.family, v.details);
            let verdicts = [v];
            emit(&render(&verdicts, output.format()), &output, stdout)?;
            Ok(Summary::of(&verdicts).exit_code())
        }
        Command::Cyclotomic { n } => {
            if n == 0 {
                return Err(invalid("cyclotomic index must be positive"));
            }
            let phi = cyclotomic(n, &mut CyclotomicCache::new());
            writeln!(stdout, "{phi}").map_err(|e| ConfigError::Io(e.to_string()))?;
            Ok(EXIT_OK)
        }
        Command::ExpandEta { order, output } => {
            if order == 0 {
                return Err(invalid("--order must be at least 1"));
            }
            let eta = eta_coefficients(order);
            let mut s = String::new();
            for (n, a) in eta.nonzero() {
                match output.format() {
                    OutputFormat::Table => writeln!(s, "{n}\t{a}").unwrap(),
                    OutputFormat::JsonLines => writeln!(s, "{}", serde_json::json!({"n": n, "a": a})).unwrap(),
                }
            }
            emit(&s, &output, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run_command(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_env() -> i32 {
    run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qcong").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges_parse() {
        assert_eq!("1..45".parse::<InclusiveRange>(), Ok(InclusiveRange { lo: 1, hi: 45 }));
        assert_eq!("7".parse::<InclusiveRange>(), Ok(InclusiveRange::single(7)));
        assert_eq!("3..=9".parse::<InclusiveRange>(), Ok(InclusiveRange { lo: 3, hi: 9 }));
        assert!("9..3".parse::<InclusiveRange>().is_err());
        assert_eq!("0,2".parse::<EllPolicy>(), Ok(EllPolicy::List(vec![0, 2])));
    }

    #[test]
    fn even_n_is_a_config_error() {
        let (code, _, err) = run_str(&["verify", "--family", "T1", "--n", "4"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("odd"));
        assert_eq!(run_str(&["verify", "--family", "B2", "--p", "9"]).0, EXIT_CONFIG);
        assert_eq!(run_str(&["verify", "--family", "T1"]).0, EXIT_CONFIG);
        assert_eq!(run_str(&["verify", "--family", "NOPE", "--n", "3"]).0, EXIT_CONFIG);
        assert_eq!(run_str(&["verify", "--family", "PARAM", "--n", "5", "--samples", "3"]).0, EXIT_CONFIG);
    }

    #[test]
    fn small_sweep_json() {
        let (code, out, _) = run_str(&["verify", "--family", "T1,T2", "--n", "1..7", "--json", "--jobs", "2"]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines.len(), 9);
        assert!(lines[0].starts_with(r#"{"family":"T1","n":1,"ell":null,"p":null,"modulus":[]"#));
        assert!(lines[4].contains(r#""family":"T2","n":1"#) && lines[4].contains(r#""skipped":true"#));
        assert!(lines[8].contains(r#""failed":0"#) && lines[8].contains(r#""skipped":1"#));
    }

    #[test]
    fn residue_skips_are_not_counted_as_passes() {
        let verdicts = execute(&RunConfig {
            families: vec![FamilyTag::MP, FamilyTag::RF34],
            n_range: None,
            p_range: Some(InclusiveRange { lo: 3, hi: 13 }),
            ell_policy: EllPolicy::All,
            sample_count: None,
            output: OutputFormat::Table,
            jobs: 1,
        })
        .unwrap();
        let s = Summary::of(&verdicts);
        assert_eq!((s.total, s.passed, s.failed, s.skipped), (10, 5, 0, 5));
    }

    #[test]
    fn cyclotomic_command() {
        let (code, out, _) = run_str(&["cyclotomic", "6"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.trim(), "q^2 - q + 1");
        assert_eq!(run_str(&["cyclotomic", "0"]).0, EXIT_CONFIG);
    }

    #[test]
    fn expand_eta_command() {
        let (code, out, _) = run_str(&["expand-eta", "--order", "13"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "1\t1\n5\t-6\n9\t9\n13\t10\n");
    }

    #[test]
    fn table_render() {
        let v = Verdict::new("T1").with_n(3);
        let mut v = v.with_modulus(&crate::congruence::ModulusSpec::phi_pair(3, 3, 3));
        v.passed = true;
        let text = render(&[v], OutputFormat::Table);
        assert!(text.contains("Φ3^3·Φ6^3"));
        assert!(text.ends_with("total 1 passed 1 failed 0 skipped 0\n"));
    }
}
