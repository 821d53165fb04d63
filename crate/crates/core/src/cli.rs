//! The `whilecf` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bigstep::{eval_big, valid_big};
use crate::error::{Error, Result};
use crate::fuzz::{run_suite, FuzzConfig, Suite};
use crate::lang::{Caps, Command, Footprint};
use crate::smallstep::{enumerate_continuations, run_small, trace, valid_cont, valid_wp, Config, Step};
use crate::verify::{parse_annotated, parse_certificate, parse_spec, source_hash, verify_file, Options, Toggle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "whilecf", version, about = "Semantics, validity oracles and proof certificates for While-CF")]
pub struct Cli {
    /// Largest enumeration (states, environments, continuations) allowed.
    #[arg(long, global = true, default_value_t = Caps::default().enumeration)]
    pub cap: u64,

    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Run a program from one initial state.
    Run(RunArgs),
    /// Verify an annotated program against a spec and emit a certificate.
    Verify(VerifyArgs),
    /// Re-check a certificate.
    Check(CheckArgs),
    /// Decide a triple with one of the validity oracles.
    Oracle(OracleArgs),
    /// Run a seeded property suite.
    Fuzz(FuzzArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Semantics {
    Big,
    Small,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Embedding {
    Big,
    Wp,
    Cont,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ToggleArg {
    Auto,
    On,
    Off,
}

impl From<ToggleArg> for Toggle {
    fn from(t: ToggleArg) -> Toggle {
        match t {
            ToggleArg::Auto => Toggle::Auto,
            ToggleArg::On => Toggle::On,
            ToggleArg::Off => Toggle::Off,
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Semantics::Big)]
    pub semantics: Semantics,
    /// Initial values such as `x=1,y=2`; unnamed variables start at 0.
    #[arg(long, default_value = "")]
    pub state: String,
    /// Program variables; defaults to those of the program and the state.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub vars: Vec<String>,
    #[arg(long, default_value_t = 8)]
    pub modulus: u32,
    #[arg(long, default_value_t = 10_000)]
    pub fuel: u64,
    /// Print every machine configuration (small-step only).
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub program: PathBuf,
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value_t = ToggleArg::Auto)]
    pub if_seq: ToggleArg,
    #[arg(long, value_enum, default_value_t = ToggleArg::Auto)]
    pub loop_nocontinue: ToggleArg,
    /// Certificate path; defaults to the program path with a `.cert` extension.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub certificate: PathBuf,
    /// With `--spec`, also confirm the certificate was produced from these sources.
    #[arg(long, requires = "spec")]
    pub program: Option<PathBuf>,
    #[arg(long, requires = "program")]
    pub spec: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub program: PathBuf,
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value_t = Embedding::Big)]
    pub embedding: Embedding,
    #[arg(long, default_value_t = 10_000)]
    pub fuel: u64,
    /// Most frames in a generated continuation.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Largest total frame weight in a generated continuation.
    #[arg(long, default_value_t = 3)]
    pub size: usize,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    /// Suite to run; every suite when omitted.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest generated command.
    #[arg(long, default_value_t = 12)]
    pub size: usize,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = ["x".to_string(), "y".to_string(), "z".to_string()])]
    pub vars: Vec<String>,
    #[arg(long, default_value_t = 8)]
    pub modulus: u32,
    #[arg(long, default_value_t = 10_000)]
    pub fuel: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

/// Exit status for an error that escaped a subcommand.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Syntax { .. } | Error::Footprint(_) | Error::Format(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` and runs the subcommand, returning the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let caps = Caps { enumeration: cli.cap };
    match &cli.command {
        Cmd::Run(a) => cmd_run(a, out),
        Cmd::Verify(a) => cmd_verify(a, &caps, out),
        Cmd::Check(a) => cmd_check(a, &caps, out),
        Cmd::Oracle(a) => cmd_oracle(a, &caps, out),
        Cmd::Fuzz(a) => cmd_fuzz(a, &caps, out),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Error {
    Error::Format(format!("write failed: {e}"))
}

/// A program file, annotated or not, as a plain command.
fn read_program(path: &Path) -> Result<Command> {
    Ok(parse_annotated(&read(path)?)?.erase())
}

/// `x=1,y=2` or `x=1 y=2`.
fn parse_bindings(text: &str) -> Result<Vec<(String, u32)>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected `name=value`, got `{item}`")))?;
            let v = value.trim().parse().map_err(|_| Error::Format(format!("bad value in `{item}`")))?;
            Ok((name.trim().to_string(), v))
        })
        .collect()
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<i32> {
    let c = read_program(&a.file)?;
    let bindings = parse_bindings(&a.state)?;
    let vars = if a.vars.is_empty() {
        let mut vs = c.vars();
        for (n, _) in &bindings {
            if !vs.contains(n) {
                vs.push(n.clone());
            }
        }
        if vs.is_empty() {
            vs.push("x".into());
        }
        vs
    } else {
        a.vars.clone()
    };
    let fp = Footprint::new(&vars, a.modulus)?;
    if let Some(x) = c.vars().into_iter().find(|x| !fp.contains(x)) {
        return Err(Error::Format(format!("variable `{x}` is not declared")));
    }
    let mut s = fp.zero_state();
    for (n, v) in bindings {
        if v >= fp.modulus() {
            return Err(Error::Format(format!("value {v} for `{n}` is not below the modulus {}", fp.modulus())));
        }
        if !s.set(&n, v) {
            return Err(Error::Format(format!("variable `{n}` is not declared")));
        }
    }
    if a.trace && a.semantics == Semantics::Big {
        return Err(Error::Format("--trace needs --semantics small".into()));
    }
    let outcome = match a.semantics {
        Semantics::Big => eval_big(&c, &s, a.fuel),
        Semantics::Small => {
            let cfg = Config::initial(&c, &s);
            if a.trace {
                print_trace(&cfg, a.fuel, out)?;
            }
            run_small(&cfg, a.fuel)
        }
    };
    writeln!(out, "{outcome}").map_err(io)?;
    Ok(EXIT_OK)
}

fn print_trace(cfg: &Config, fuel: u64, out: &mut dyn Write) -> Result<()> {
    let (configs, last) = trace(cfg, fuel);
    for (i, c) in configs.iter().enumerate() {
        writeln!(out, "{i:>4}  {c}").map_err(io)?;
    }
    match last {
        Some(Step::Terminal(ek, s)) => writeln!(out, "      => {ek} {s}"),
        Some(Step::Stuck) => writeln!(out, "      => stuck"),
        _ => writeln!(out, "      => step budget spent"),
    }
    .map_err(io)
}

fn cmd_verify(a: &VerifyArgs, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    let program = read(&a.program)?;
    let spec = read(&a.spec)?;
    let opts = Options { if_seq: a.if_seq.into(), loop_nocontinue: a.loop_nocontinue.into() };
    let report = verify_file(&program, &spec, opts, caps)?;
    for (vc, v) in &report.vcs {
        writeln!(out, "{vc}\n    {v}").map_err(io)?;
    }
    let Some(cert) = report.certificate else {
        let failed = report.failed().count();
        if failed > 0 {
            writeln!(out, "FAILED: {failed} of {} conditions do not hold", report.vcs.len()).map_err(io)?;
        }
        for f in report.check.iter().flat_map(|c| &c.failures) {
            writeln!(out, "FAILED at {f}").map_err(io)?;
        }
        return Ok(EXIT_FAILURE);
    };
    let path = a.output.clone().unwrap_or_else(|| a.program.with_extension("cert"));
    fs::write(&path, cert.to_text()).map_err(io)?;
    writeln!(out, "verified: {}", cert.conclusion()?).map_err(io)?;
    writeln!(out, "certificate written to {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    let cert = parse_certificate(&read(&a.certificate)?)?;
    if let (Some(p), Some(s)) = (&a.program, &a.spec) {
        if source_hash(&read(p)?, &read(s)?) != cert.source_hash {
            writeln!(out, "FAILED: certificate was not produced from these sources").map_err(io)?;
            return Ok(EXIT_FAILURE);
        }
    }
    let report = cert.check(caps)?;
    if report.ok {
        let t = report.conclusion.expect("a checking tree has a conclusion");
        writeln!(out, "ok: {t}").map_err(io)?;
        writeln!(out, "{} nodes, {} entailments discharged", cert.tree.node_count(), report.entailments).map_err(io)?;
        Ok(EXIT_OK)
    } else {
        for f in &report.failures {
            writeln!(out, "FAILED at {f}").map_err(io)?;
        }
        Ok(EXIT_FAILURE)
    }
}

fn cmd_oracle(a: &OracleArgs, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    let c = read_program(&a.program)?;
    let spec = parse_spec(&read(&a.spec)?)?;
    let fp = spec.footprint.clone();
    let t = spec.triple(c);
    writeln!(out, "triple: {t}").map_err(io)?;
    let verdict = match a.embedding {
        Embedding::Big => valid_big(&t, &fp, a.fuel, caps)?,
        Embedding::Wp => valid_wp(&t, &fp, a.fuel, caps)?,
        Embedding::Cont => {
            let family = enumerate_continuations(&fp, a.depth, a.size, caps)?;
            if a.depth == 0 || a.size == 0 {
                writeln!(out, "bounded: family [ε] plus the probe continuations").map_err(io)?;
            } else {
                writeln!(
                    out,
                    "bounded: {} continuations of depth <= {} and size <= {}, plus the probe continuations",
                    family.len(),
                    a.depth,
                    a.size
                )
                .map_err(io)?;
            }
            valid_cont(&t, &fp, a.fuel, &family, caps)?
        }
    };
    writeln!(out, "{verdict}").map_err(io)?;
    Ok(if verdict.is_counterexample() { EXIT_FAILURE } else { EXIT_OK })
}

fn cmd_fuzz(a: &FuzzArgs, caps: &Caps, out: &mut dyn Write) -> Result<i32> {
    let suites = match &a.suite {
        None => Suite::ALL.to_vec(),
        Some(name) if name == "all" => Suite::ALL.to_vec(),
        Some(name) => vec![name.parse::<Suite>()?],
    };
    let cfg = FuzzConfig {
        fuel: a.fuel,
        seed: a.seed,
        count: a.count,
        size: a.size.max(1),
        caps: *caps,
        workers: a.workers,
        ..FuzzConfig::new(Footprint::new(&a.vars, a.modulus)?)
    };
    let mut code = EXIT_OK;
    for suite in suites {
        let report = run_suite(suite, &cfg)?;
        write!(out, "{report}").map_err(io)?;
        if !report.ok() {
            code = EXIT_FAILURE;
        }
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(std::iter::once("whilecf").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bindings() {
        assert_eq!(parse_bindings("x=1, y=2").unwrap(), vec![("x".into(), 1), ("y".into(), 2)]);
        assert_eq!(parse_bindings("").unwrap(), vec![]);
        assert!(parse_bindings("x").is_err());
        assert!(parse_bindings("x=a").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(&[]).0, EXIT_USAGE);
        assert_eq!(run(&["run"]).0, EXIT_USAGE);
        assert_eq!(run(&["fuzz", "--suite", "nope", "--count", "1"]).0, EXIT_USAGE);
        assert_eq!(run(&["run", "/nonexistent/file"]).0, EXIT_USAGE);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::CapExceeded { needed: 2, cap: 1 }), EXIT_CAP);
        assert_eq!(exit_code(&Error::Format("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Shape("x".into())), EXIT_FAILURE);
    }

    #[test]
    fn fuzz_is_deterministic_in_its_seed() {
        let args = ["fuzz", "--suite", "semantics", "--count", "5", "--seed", "3", "--modulus", "4", "--size", "6"];
        let (code, a, _) = run(&args);
        assert_eq!(code, EXIT_OK, "{a}");
        assert_eq!(a, run(&args).1);
    }
}
