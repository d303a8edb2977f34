//! `actionforge list | describe | run | verify | verify-all`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use super::{builtin_configs, find_config, run_case, verify_all, verify_case, Case, CaseConfig, CaseReport, CheckConfig};
use crate::error::{Error, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "actionforge", version, about = "Causal linear evolution cases and their action-density checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the builtin cases.
    List,
    /// Print a case's config as JSON.
    Describe { case: String },
    /// Solve a case and write traces, fields and report.json.
    Run {
        case: String,
        /// JSON merge patch over the builtin config, or a full config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run a case's checks; exit 0 iff all pass.
    Verify {
        case: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replace every check tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Verify every builtin case.
    VerifyAll {
        #[arg(long, default_value_t = 4)]
        jobs: usize,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::UnknownCase(_) | Error::Parse { .. } | Error::Density(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn load(case: &str, config: Option<&Path>) -> Result<CaseConfig> {
    let base = find_config(case);
    let Some(path) = config else { return base };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let patch: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    match base {
        Ok(b) => b.patched(&patch),
        Err(Error::UnknownCase(_)) => {
            let c: CaseConfig = serde_json::from_value(patch).map_err(|e| Error::Config(e.to_string()))?;
            if c.name != case {
                return Err(Error::UnknownCase(case.to_string()));
            }
            Ok(c)
        }
        Err(e) => Err(e),
    }
}

fn print_report(out: &mut impl Write, r: &CaseReport) -> std::io::Result<()> {
    for c in &r.checks {
        writeln!(out, "{:<18} {c}", r.case)?;
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<i32> {
    match command {
        Command::List => {
            for c in builtin_configs() {
                writeln!(out, "{:<18} {}", c.name, c.description)?;
            }
            Ok(EXIT_PASS)
        }
        Command::Describe { case } => {
            let c = find_config(&case)?;
            writeln!(out, "{}", c.to_json())?;
            Ok(EXIT_PASS)
        }
        Command::Run { case, config, out: dir, grid, tmax, samples } => {
            let mut c = load(&case, config.as_deref())?;
            if let Some(n) = grid {
                c.grid.n = n;
            }
            if let Some(t) = tmax {
                c.time.t_max = t;
            }
            if let Some(s) = samples {
                c.time.samples = s;
            }
            let r = run_case(c, &dir)?;
            print_report(out, &r)?;
            writeln!(out, "wrote {}", dir.join(&r.case).display())?;
            Ok(EXIT_PASS)
        }
        Command::Verify { case, config, tolerance } => {
            let mut c = load(&case, config.as_deref())?;
            if let Some(t) = tolerance {
                c.checks = c.checks.iter().map(|k| k.with_tolerance(t)).collect::<Vec<CheckConfig>>();
            }
            Case::from_config(c.clone())?;
            let r = verify_case(c)?;
            print_report(out, &r)?;
            Ok(if r.pass() { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::VerifyAll { jobs } => {
            let start = Instant::now();
            let results = verify_all(builtin_configs(), jobs)?;
            let mut passed = 0;
            let mut rows = Vec::new();
            for (name, res) in &results {
                match res {
                    Ok(r) => {
                        print_report(out, r)?;
                        let ok = r.checks.iter().filter(|c| c.pass).count();
                        if r.pass() {
                            passed += 1;
                        }
                        let verdict = if r.pass() { "PASS" } else { "FAIL" };
                        rows.push(format!("{name:<18} {ok:>3}/{:<3} {:>9.2}s  {verdict}", r.checks.len(), r.wall.as_secs_f64()));
                    }
                    Err(e) => rows.push(format!("{name:<18}   error          ERROR  {e}")),
                }
            }
            writeln!(out)?;
            writeln!(out, "{:<18} {:>7} {:>10}  verdict", "case", "checks", "wall")?;
            for row in rows {
                writeln!(out, "{row}")?;
            }
            writeln!(out, "{passed}/{} cases passed in {:.1}s", results.len(), start.elapsed().as_secs_f64())?;
            Ok(if passed == results.len() { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}
