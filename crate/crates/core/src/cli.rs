//! Command-line driver: `translate`, `run`, `verify` and `list-qplp`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::backend::lower_program;
use crate::diag::{Diagnostic, Diagnostics, Severity, SourceModule};
use crate::frontend::analyze;
use crate::mapping::{default_rules, load_mapping, MappingRuleSet};
use crate::optimizer::{optimize, OptimizeMode};
use crate::qasm::{emit_qasm, parse_qasm};
use crate::qplp::Catalog;
use crate::verifier::{check_typed, interpret_qasm, CheckOptions, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cliq", version, about = "Translate CliqLang to OpenQASM 3.0, run it, and check the translation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate a .cliq file to OpenQASM 3.0.
    Translate {
        input: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        opt: OptimizeArgs,
        /// Mapping file replacing the built-in rules.
        #[arg(long)]
        mapping: Option<PathBuf>,
        /// Write the optimization report here.
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Run a .qasm program.
    Run {
        input: PathBuf,
        /// Enumerate every measurement outcome (the default).
        #[arg(long, conflicts_with = "shots")]
        exact: bool,
        /// Sample this many executions.
        #[arg(long, requires = "seed", value_parser = clap::value_parser!(u64).range(1..))]
        shots: Option<u64>,
        #[arg(long, requires = "shots")]
        seed: Option<u64>,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check a .cliq file against its translation.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        opt: OptimizeArgs,
        #[arg(long)]
        mapping: Option<PathBuf>,
    },
    /// List the pattern catalog.
    ListQplp,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Apply every executable pattern site.
    #[arg(long, conflicts_with = "optimize_only")]
    pub optimize: bool,
    /// Apply only the given pattern or site ids (repeatable).
    #[arg(long, value_name = "ID")]
    pub optimize_only: Vec<String>,
}

impl OptimizeArgs {
    pub fn mode(&self) -> OptimizeMode {
        if self.optimize {
            OptimizeMode::ApplyAll
        } else if !self.optimize_only.is_empty() {
            OptimizeMode::ApplySelected(self.optimize_only.clone())
        } else {
            OptimizeMode::ReportOnly
        }
    }
}

/// Failure that ends a command with exit code 1.
struct Failed;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn diags(&mut self, src: &SourceModule, d: &Diagnostics) {
        for x in &d.0 {
            let _ = writeln!(self.err, "{}", src.render(x));
        }
    }

    fn warn(&mut self, src: &SourceModule, ws: &[Diagnostic]) {
        for w in ws.iter().filter(|w| w.severity == Severity::Warning) {
            let _ = writeln!(self.err, "{}", src.render(w));
        }
    }
}

fn read_source(io: &mut Io, path: &Path) -> Result<SourceModule, Failed> {
    let name = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| {
        let _ = writeln!(io.err, "{name}: cannot read: {e}");
        Failed
    })?;
    SourceModule::from_bytes(name.clone(), &bytes).map_err(|d| {
        let _ = writeln!(io.err, "{}", SourceModule::new(name, "").render(&d));
        Failed
    })
}

fn write_file(io: &mut Io, path: &Path, text: &str) -> Result<(), Failed> {
    std::fs::write(path, text).map_err(|e| {
        let _ = writeln!(io.err, "{}: cannot write: {e}", path.display());
        Failed
    })
}

fn rules(io: &mut Io, mapping: &Option<PathBuf>) -> Result<MappingRuleSet, Failed> {
    let Some(path) = mapping else { return Ok(default_rules()) };
    let src = read_source(io, path)?;
    load_mapping(&src.text).map_err(|d| {
        io.diags(&src, &Diagnostics(d));
        Failed
    })
}

fn translate(
    io: &mut Io,
    input: &Path,
    output: &Option<PathBuf>,
    opt: &OptimizeArgs,
    mapping: &Option<PathBuf>,
    report_out: &Option<PathBuf>,
) -> Result<(), Failed> {
    let rules = rules(io, mapping)?;
    let src = read_source(io, input)?;
    let fail = |io: &mut Io, d: Diagnostics| {
        io.diags(&src, &d);
        Failed
    };
    let tp = analyze(&src).map_err(|d| fail(io, d))?;
    let (tp, report) = optimize(&tp, &Catalog::default(), &opt.mode()).map_err(|d| fail(io, d))?;
    io.warn(&src, &report.warnings);
    let qp = lower_program(&tp, &rules).map_err(|d| fail(io, d))?;
    let text = emit_qasm(&qp);
    match output {
        Some(path) => write_file(io, path, &text)?,
        None => {
            let _ = io.out.write_all(text.as_bytes());
        }
    }
    match report_out {
        Some(path) => write_file(io, path, &report.to_json())?,
        None if output.is_some() => {
            let _ = io.out.write_all(report.to_json().as_bytes());
        }
        None => {}
    }
    Ok(())
}

fn run(io: &mut Io, input: &Path, shots: Option<u64>, seed: Option<u64>, json: bool) -> Result<(), Failed> {
    let src = read_source(io, input)?;
    let qp = parse_qasm(&src.text).map_err(|d| {
        io.diags(&src, &Diagnostics(d));
        Failed
    })?;
    let mode = match (shots, seed) {
        (Some(shots), Some(seed)) => Mode::Sampled { shots, seed },
        _ => Mode::Exact,
    };
    let result = interpret_qasm(&qp, mode).map_err(|d| {
        io.diags(&src, &Diagnostics::single(d));
        Failed
    })?;
    let text = if json {
        let mut s = serde_json::to_string_pretty(&result).expect("result serializes");
        s.push('\n');
        s
    } else {
        result.render()
    };
    let _ = io.out.write_all(text.as_bytes());
    Ok(())
}

fn verify(io: &mut Io, input: &Path, opt: &OptimizeArgs, mapping: &Option<PathBuf>) -> Result<(), Failed> {
    let rules = rules(io, mapping)?;
    let src = read_source(io, input)?;
    let fail = |io: &mut Io, d: Diagnostics| {
        io.diags(&src, &d);
        Failed
    };
    let tp = analyze(&src).map_err(|d| fail(io, d))?;
    let run = check_typed(&tp, &CheckOptions { mode: opt.mode(), rules }).map_err(|d| fail(io, d))?;
    io.warn(&src, &run.optimization.warnings);
    let verdict = if run.report.passed() { "PASS" } else { "FAIL" };
    let _ = writeln!(io.out, "{verdict}");
    let _ = io.out.write_all(run.report.to_json().as_bytes());
    if run.report.passed() {
        Ok(())
    } else {
        Err(Failed)
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Result<(), Failed> {
    match &cli.command {
        Command::Translate { input, output, opt, mapping, report_out } => translate(io, input, output, opt, mapping, report_out),
        Command::Run { input, shots, seed, json, .. } => run(io, input, *shots, *seed, *json),
        Command::Verify { input, opt, mapping } => verify(io, input, opt, mapping),
        Command::ListQplp => {
            let _ = io.out.write_all(Catalog::default().listing().as_bytes());
            Ok(())
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FAIL } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli, &mut io)));
    match r {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(Failed)) => EXIT_FAIL,
        Err(_) => {
            let _ = writeln!(io.err, "internal error: invariant violated");
            EXIT_INTERNAL
        }
    }
}
