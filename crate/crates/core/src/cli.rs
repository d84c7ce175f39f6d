//! Command-line front end.
//!
//! Exit codes: `0` success, `1` usage, input or resource errors, `2` when
//! `verify` finds a bound that does not hold.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::counterexample::{
    assemble_expansion, choose_sequences, verify_theorem, ConstructionConfig, KPolicy,
    DEFAULT_GRID_CHECK_LEVEL,
};
use crate::dirichlet::{block_max_search, dirichlet_step};
use crate::dyadic::{level_cap, set_level_cap};
use crate::error::Error;
use crate::greedy::{
    coeff_value, greedy_approximant, greedy_order, Coefficient, Expansion, DEFAULT_PRECISION_BITS,
};
use crate::rational::Rational;
use crate::report::{report_csv, report_json, rows_csv, rows_json, LebesgueRow};

/// Overrides the grid memory guard (a level, default 28).
pub const LEVEL_CAP_ENV: &str = "WALSH_GREEDY_LEVEL_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BOUND_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "walsh-greedy", version)]
#[command(about = "Exact Walsh-Paley kernels, greedy approximants and divergence certificates")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file (atomically) instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    /// `index<TAB>coeff` expansion file (build only).
    Expansion,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Block maximizers of ||D_m||_1 for k = 1..=K.
    Lebesgue {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=32))]
        max_k: u32,
    },
    /// Cell values of the Dirichlet kernel D_M.
    Kernel {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        level: u32,
    },
    /// The truncated construction: one row per expansion term.
    Build {
        #[arg(long)]
        blocks: usize,
        /// Explicit k sequence instead of the minimal one.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<u32>>,
    },
    /// Certifies the greedy divergence bound for blocks 2..=V.
    Verify {
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        level_cap: Option<u32>,
        /// Largest grid level used for the exact cross-check.
        #[arg(long, default_value_t = DEFAULT_GRID_CHECK_LEVEL)]
        grid_level: u32,
    },
    /// Greedy approximant G_m of an expansion file.
    GreedyRun {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        level: Option<u32>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            code: EXIT_OK,
        }
    }
}

/// Runs the CLI with process stdio.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    if let Err(msg) = apply_env_cap() {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_ERROR;
    }
    match execute(&cli) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => write_atomic(path, &outcome.text),
                None => out
                    .write_all(outcome.text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(err, "error: {msg}");
                return EXIT_ERROR;
            }
            if outcome.code == EXIT_BOUND_FAILED {
                let _ = writeln!(err, "error: a divergence bound failed to certify");
            }
            outcome.code
        }
        Err(Failure::Usage(msg)) | Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
        Err(Failure::Compute(e)) => {
            let kind = if e.is_resource() {
                "resource error"
            } else {
                "error"
            };
            let _ = writeln!(err, "{kind}: {e}");
            EXIT_ERROR
        }
    }
}

fn apply_env_cap() -> Result<(), String> {
    if let Ok(raw) = std::env::var(LEVEL_CAP_ENV) {
        let cap: u32 = raw
            .trim()
            .parse()
            .map_err(|_| format!("{LEVEL_CAP_ENV} must be a level, got {raw:?}"))?;
        set_level_cap(cap);
    }
    Ok(())
}

fn write_atomic(path: &Path, text: &str) -> Result<(), String> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    tmp.write_all(text.as_bytes())
        .map_err(|e| format!("{}: {e}", path.display()))?;
    tmp.persist(path)
        .map_err(|e| format!("{}: {}", path.display(), e.error))?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let format = |default| cli.format.unwrap_or(default);
    let reject_expansion = |f: Format| {
        if f == Format::Expansion {
            Err(Failure::Usage(
                "--format expansion is only valid for build".into(),
            ))
        } else {
            Ok(f)
        }
    };
    match &cli.command {
        Command::Lebesgue { max_k } => {
            let fmt = reject_expansion(format(Format::Csv))?;
            let rows = (1..=*max_k)
                .map(|k| block_max_search(k).map(|r| LebesgueRow::from(&r)))
                .collect::<Result<Vec<_>, _>>()?;
            emit(fmt, &rows)
        }
        Command::Kernel { m, level } => {
            let fmt = reject_expansion(format(Format::Csv))?;
            if *m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            let d = dirichlet_step(*m, *level)?;
            emit(fmt, &cell_rows(d.values(), *level))
        }
        Command::Build { blocks, k } => {
            let cfg = ConstructionConfig {
                k_policy: k.clone().map_or(KPolicy::Minimal, KPolicy::Explicit),
                ..ConstructionConfig::minimal(*blocks)
            };
            let specs = choose_sequences(&cfg)?;
            let e = assemble_expansion(&specs)?;
            match format(Format::Csv) {
                Format::Expansion => Ok(Outcome::ok(e.to_text())),
                fmt => emit(fmt, &term_rows(&e)),
            }
        }
        Command::Verify {
            blocks,
            level_cap: cap,
            grid_level,
        } => {
            if *blocks < 2 {
                return Err(Failure::Usage(format!(
                    "need V >= 2 (got --blocks {blocks})"
                )));
            }
            let cfg = ConstructionConfig {
                level_cap: cap.unwrap_or_else(level_cap),
                grid_check_level: *grid_level,
                ..ConstructionConfig::minimal(*blocks)
            };
            let report = verify_theorem(&cfg)?;
            let text = match reject_expansion(format(Format::Json))? {
                Format::Csv => report_csv(&report)?,
                _ => report_json(&report),
            };
            Ok(Outcome {
                text,
                code: if report.all_passed {
                    EXIT_OK
                } else {
                    EXIT_BOUND_FAILED
                },
            })
        }
        Command::GreedyRun { input, m, level } => {
            let fmt = reject_expansion(format(Format::Json))?;
            let text = std::fs::read_to_string(input)
                .map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
            let e = Expansion::parse_text(&text)?;
            let level = level.unwrap_or_else(|| e.min_level());
            greedy_run(&e, *m, level, fmt)
        }
    }
}

fn emit<T: Serialize>(fmt: Format, rows: &[T]) -> Result<Outcome, Failure> {
    Ok(Outcome::ok(match fmt {
        Format::Json => rows_json(rows),
        _ => rows_csv(rows)?,
    }))
}

#[derive(Serialize)]
struct CellRow {
    cell: u64,
    x_left: Rational,
    value: Rational,
    value_f64: f64,
}

fn cell_rows(values: &[Rational], level: u32) -> Vec<CellRow> {
    let width = Rational::pow2(-(level as i64));
    values
        .iter()
        .enumerate()
        .map(|(t, v)| CellRow {
            cell: t as u64,
            x_left: Rational::from(t as u64) * &width,
            value: v.clone(),
            value_f64: v.to_f64(),
        })
        .collect()
}

#[derive(Serialize)]
struct TermRow {
    index: u64,
    nu: Option<u64>,
    coefficient: String,
    coefficient_f64: f64,
}

fn term_rows(e: &Expansion) -> Vec<TermRow> {
    e.terms()
        .iter()
        .map(|t| TermRow {
            index: t.index.0,
            nu: match t.coeff {
                Coefficient::Symbolic { nu, .. } => Some(nu),
                Coefficient::Explicit(_) => None,
            },
            coefficient: t.coeff.to_string(),
            coefficient_f64: coeff_value(&t.coeff, DEFAULT_PRECISION_BITS).value.to_f64(),
        })
        .collect()
}

#[derive(Serialize)]
struct GreedyRunView {
    m: usize,
    level: u32,
    terms: usize,
    selected: Vec<u64>,
    gm_l1_norm: Rational,
    gm_l1_norm_f64: f64,
    f_l1_norm: Rational,
    f_l1_norm_f64: f64,
    residual_l1_norm: Rational,
    residual_l1_norm_f64: f64,
    /// Dropped symbolic tail mass; each norm is exact up to this.
    remainder: Rational,
    samples: Vec<f64>,
}

fn greedy_run(e: &Expansion, m: usize, level: u32, fmt: Format) -> Result<Outcome, Failure> {
    let gm = greedy_approximant(e, m, level)?;
    if fmt == Format::Csv {
        return emit(fmt, &cell_rows(gm.step.values(), level));
    }
    let full = greedy_approximant(e, e.len(), level)?;
    let order = greedy_order(e)?;
    let gm_norm = gm.step.l1_norm();
    let f_norm = full.step.l1_norm();
    let residual = (&full.step - &gm.step).l1_norm();
    let view = GreedyRunView {
        m,
        level,
        terms: e.len(),
        selected: order[..m].iter().map(|&p| e.terms()[p].index.0).collect(),
        gm_l1_norm_f64: gm_norm.to_f64(),
        gm_l1_norm: gm_norm,
        f_l1_norm_f64: f_norm.to_f64(),
        f_l1_norm: f_norm,
        residual_l1_norm_f64: residual.to_f64(),
        residual_l1_norm: residual,
        remainder: full.remainder,
        samples: gm.step.to_float_samples(),
    };
    let mut text = serde_json::to_string_pretty(&view).expect("serializable");
    text.push('\n');
    Ok(Outcome::ok(text))
}
