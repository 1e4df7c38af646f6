//! Command-line front end: compute commands, verification suites and JSON reports.

mod compute;
mod verify;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ecfun::{parse_curve, CurveRef};
use crate::error::Error;
use crate::ffield::Gf;
use crate::ratfun::text::{parse_divisor, parse_field};
use crate::ratfun::{RatDivisor, RatPlace};

pub use compute::ComputeKind;
pub use verify::Suite;

pub const SCHEMA_VERSION: u32 = 1;
const MAX_SAMPLES: usize = 100_000;
const MAX_DEGREE_BOUND: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "cftlab", version, about = "Executable class field theory over F_q(x) and elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a single object and print it.
    Compute {
        #[arg(value_enum)]
        kind: ComputeKind,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Flags shared by every command; unset flags fall back to the config file, then to defaults.
#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Opts {
    /// Base field, e.g. GF(5) or GF(9).
    #[arg(long)]
    pub field: Option<String>,
    /// Elliptic curve, e.g. "y^2=x^3+2*x+3 over GF(13)".
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Effective divisor, e.g. "[(x):1, (x-1):1]".
    #[arg(long)]
    pub modulus: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(alias = "degree_bound")]
    pub degree_bound: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat key-value JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Function argument of pair-tau, e.g. "x/(x-1)".
    #[arg(long)]
    pub f: Option<String>,
    /// Divisor argument of pair-tau.
    #[arg(long)]
    pub divisor: Option<String>,
    /// First point of pair-tate / pair-ate, e.g. "(1,2)@GF(13)".
    #[arg(long)]
    pub p: Option<String>,
    /// Second point of pair-tate / pair-ate.
    #[arg(long)]
    pub q: Option<String>,
    /// Suite name (config file only; the flag lives on `verify`).
    #[arg(skip)]
    pub suite: Option<Suite>,
}

impl Opts {
    fn or(self, o: Opts) -> Opts {
        Opts {
            field: self.field.or(o.field),
            curve: self.curve.or(o.curve),
            n: self.n.or(o.n),
            modulus: self.modulus.or(o.modulus),
            samples: self.samples.or(o.samples),
            seed: self.seed.or(o.seed),
            degree_bound: self.degree_bound.or(o.degree_bound),
            out: self.out.or(o.out),
            format: self.format.or(o.format),
            config: self.config.or(o.config),
            f: self.f.or(o.f),
            divisor: self.divisor.or(o.divisor),
            p: self.p.or(o.p),
            q: self.q.or(o.q),
            suite: self.suite.or(o.suite),
        }
    }
}

/// Validated configuration of one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub field: String,
    pub curve: Option<String>,
    pub n: u64,
    pub modulus: String,
    pub samples: usize,
    pub seed: u64,
    pub degree_bound: usize,
    pub f: Option<String>,
    pub divisor: Option<String>,
    pub p: Option<String>,
    pub q: Option<String>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

/// Parsed objects of a RunConfig.
pub struct Context {
    pub cfg: RunConfig,
    pub k: Gf,
    pub m: RatDivisor,
    pub s: BTreeSet<RatPlace>,
    pub curve: Option<CurveRef>,
}

/// Error of the command line layer; every variant maps to exit code 2.
#[derive(Debug)]
pub struct UsageError {
    pub kind: &'static str,
    pub message: String,
}

impl UsageError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        UsageError { kind, message: message.into() }
    }
}

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Parse(_) => "parse",
            _ => "validation",
        };
        UsageError::new(kind, e.to_string())
    }
}

fn load_config(path: &PathBuf) -> Result<Opts, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError::new("config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| UsageError::new("config", format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: Opts) -> Result<RunConfig, UsageError> {
        let opts = match &flags.config {
            Some(path) => {
                let file = load_config(path)?;
                flags.or(file)
            }
            None => flags,
        };
        let cfg = RunConfig {
            field: opts.field.unwrap_or_else(|| "GF(5)".into()),
            curve: opts.curve,
            n: opts.n.unwrap_or(4),
            modulus: opts.modulus.unwrap_or_else(|| "[(x):1, (x-1):1]".into()),
            samples: opts.samples.unwrap_or(100),
            seed: opts.seed.unwrap_or(1),
            degree_bound: opts.degree_bound.unwrap_or(3),
            f: opts.f,
            divisor: opts.divisor,
            p: opts.p,
            q: opts.q,
            out: opts.out,
            format: opts.format.unwrap_or(Format::Json),
        };
        if cfg.samples > MAX_SAMPLES {
            return Err(UsageError::new("validation", format!("samples must be at most {MAX_SAMPLES}")));
        }
        if cfg.degree_bound == 0 || cfg.degree_bound > MAX_DEGREE_BOUND {
            return Err(UsageError::new("validation", format!("degree-bound must lie in 1..={MAX_DEGREE_BOUND}")));
        }
        if cfg.n == 0 {
            return Err(UsageError::new("validation", "n must be positive"));
        }
        Ok(cfg)
    }

    /// Parses the config; `rational` requires mu_n inside F_q (every command on F_q(x)).
    pub fn context(self, rational: bool) -> Result<Context, UsageError> {
        let k = parse_field(&self.field)?;
        if rational && self.n % k.characteristic() as u64 == 0 {
            return Err(UsageError::new("validation", format!("n = {} must be coprime to q", self.n)));
        }
        if rational && self.n > 1 && (k.order() as u64 - 1) % self.n != 0 {
            return Err(UsageError::new(
                "validation",
                format!("n = {} must divide q - 1 = {}", self.n, k.order() - 1),
            ));
        }
        let m = parse_divisor(&k, &self.modulus)?;
        if !m.is_effective() {
            return Err(UsageError::new("validation", "the modulus must be effective"));
        }
        let s = m.support().cloned().collect();
        let curve = self.curve.as_deref().map(parse_curve).transpose()?;
        Ok(Context { cfg: self, k, m, s, curve })
    }

    /// Command line that reproduces this run.
    pub fn reproduce(&self, command: &str) -> String {
        let mut s = format!("cftlab {}", command.replacen("verify ", "verify --suite ", 1));
        let _ = write!(s, " --field '{}' --n {} --modulus '{}'", self.field, self.n, self.modulus);
        let _ = write!(s, " --samples {} --seed {} --degree-bound {}", self.samples, self.seed, self.degree_bound);
        for (flag, v) in [("curve", &self.curve), ("f", &self.f), ("divisor", &self.divisor), ("p", &self.p), ("q", &self.q)] {
            if let Some(v) = v {
                let _ = write!(s, " --{flag} '{v}'");
            }
        }
        s
    }
}

/// One verified statement inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Label of the statement being verified, e.g. "thm:weilrec".
    pub verifies: String,
    pub pass: bool,
    pub vacuous: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(name: &str, verifies: &str, pass: bool, vacuous: bool, detail: impl Serialize) -> Check {
        Check {
            name: name.into(),
            verifies: verifies.into(),
            pass,
            vacuous,
            detail: serde_json::to_value(detail).expect("reports serialize"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduce: Option<String>,
}

impl Report {
    pub fn new(command: String, config: RunConfig, result: Option<Value>, checks: Vec<Check>) -> Report {
        let pass = checks.iter().all(|c| c.pass);
        let vacuous = checks.iter().any(|c| c.vacuous);
        let reproduce = (!pass).then(|| config.reproduce(&command));
        Report { schema_version: SCHEMA_VERSION, command, config, result, checks, pass, vacuous, reproduce }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports serialize") + "\n",
            Format::Text => {
                let mut s = format!("{} (schema {})\n", self.command, self.schema_version);
                if let Some(Value::Object(r)) = &self.result {
                    for (k, v) in r {
                        let _ = writeln!(s, "  {k}: {v}");
                    }
                }
                for c in &self.checks {
                    let flag = if c.pass { "PASS" } else { "FAIL" };
                    let vac = if c.vacuous { " (vacuous)" } else { "" };
                    let _ = writeln!(s, "[{flag}] {} {}{vac}", c.verifies, c.name);
                }
                let _ = writeln!(s, "overall: {}", if self.pass { "PASS" } else { "FAIL" });
                if let Some(r) = &self.reproduce {
                    let _ = writeln!(s, "reproduce: {r}");
                }
                s
            }
        }
    }
}

pub fn error_object(e: &UsageError) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": e.kind, "message": e.message },
    })
}

/// Runs a parsed command line; returns the rendered output, the output path and the exit code.
pub fn execute(cli: Cli) -> Result<(Report, RunConfig), UsageError> {
    match cli.command {
        Command::Compute { kind, opts } => {
            let cfg = RunConfig::resolve(opts)?;
            let rational = !matches!(kind, ComputeKind::PairTate | ComputeKind::PairAte);
            let ctx = cfg.clone().context(rational)?;
            let (result, checks) = compute::run(kind, &ctx)?;
            let name = format!("compute {}", kind.name());
            Ok((Report::new(name, cfg.clone(), Some(result), checks), cfg))
        }
        Command::Verify { suite, mut opts } => {
            let file_suite = match &opts.config {
                Some(p) => load_config(p)?.suite,
                None => None,
            };
            let suite = suite.or(file_suite).unwrap_or(Suite::All);
            opts.suite = Some(suite);
            let cfg = RunConfig::resolve(opts)?;
            let ctx = cfg.clone().context(true)?;
            let checks = verify::run(suite, &ctx)?;
            let name = format!("verify {}", suite.name());
            Ok((Report::new(name, cfg.clone(), None, checks), cfg))
        }
    }
}

/// Entry point of the binary: parses `args`, runs, writes output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            println!("{}", error_object(&UsageError::new("usage", e.to_string().trim())));
            return 2;
        }
    };
    match execute(cli) {
        Ok((report, cfg)) => {
            let text = report.render(cfg.format);
            match &cfg.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        let err = UsageError::new("io", format!("{}: {e}", path.display()));
                        println!("{}", error_object(&err));
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            report.exit_code()
        }
        Err(e) => {
            println!("{}", error_object(&e));
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let flags = Opts { n: Some(2), ..Default::default() };
        let file = Opts { n: Some(4), field: Some("GF(9)".into()), ..Default::default() };
        let cfg = RunConfig::resolve(flags.or(file)).unwrap();
        assert_eq!((cfg.n, cfg.field.as_str(), cfg.samples), (2, "GF(9)", 100));
    }

    #[test]
    fn failing_check_exits_one_with_reproduction() {
        let cfg = RunConfig::resolve(Opts::default()).unwrap();
        let checks = vec![
            Check::new("a", "thm:weilrec", true, false, json!({})),
            Check::new("b", "thm:weilrec", false, false, json!({ "witness": "f" })),
        ];
        let r = Report::new("verify weil".into(), cfg, None, checks);
        assert_eq!(r.exit_code(), 1);
        assert!(r.reproduce.as_deref().unwrap().starts_with("cftlab verify --suite weil --field 'GF(5)'"));
        assert!(r.render(Format::Text).contains("[FAIL] thm:weilrec b"));
    }

    #[test]
    fn bounds_are_validated() {
        let bad = Opts { degree_bound: Some(0), ..Default::default() };
        assert_eq!(RunConfig::resolve(bad).unwrap_err().kind, "validation");
        let bad = Opts { samples: Some(MAX_SAMPLES + 1), ..Default::default() };
        assert!(RunConfig::resolve(bad).is_err());
    }
}
