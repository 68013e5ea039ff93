//! The `hclab` command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code: 0 on success, 1 when a check reports FAIL, 2 on usage,
//! configuration or computation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use thiserror::Error;

use hclab_core::criterion::{
    check_hc_criterion, check_prop4, doubling_search, fan_error, orbit_hitting_report, rolewicz_instance,
    theorem2_witness, Prop4Bounds,
};
use hclab_core::numeric::fmt_g17;
use hclab_core::operator::{build_dense_matrix, operator_norm_l1, ExpansionTable};
use hclab_core::report;
use hclab_core::schedule::{build_schedule, layoff_coefficient, IntervalSchedule};
use hclab_core::{LabError, Polynomial, SparseVector};

pub mod config;

pub use config::Config;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Lab(#[from] LabError),
    #[error("I/O error: {0}")]
    Io(String),
}

#[derive(Debug, Parser)]
#[command(name = "hclab", about = "Finite-scale experiments with Read-type operators")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: standard output)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON instead of CSV / text
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the interval schedule
    Schedule,
    /// f-expansion of e_j
    Expand {
        #[arg(long)]
        j: BigUint,
    },
    /// Coefficient of e_j on the lay-off [nu+1, nu+l]
    LayoffNorm {
        #[arg(long)]
        l: BigUint,
        #[arg(long)]
        nu: BigUint,
        #[arg(long)]
        j: BigUint,
    },
    /// ||e_{c_n} - p(T) e_0||
    FanError {
        #[arg(long)]
        n: usize,
        /// Polynomial; defaults to the fan's own p_n
        #[arg(long)]
        p: Option<String>,
    },
    /// Doubling chain approximating p(T) e_0 within eps
    Doubling {
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Witness sequences (w_k, q_k) for k = 1..K
    Witness {
        #[arg(long = "K", default_value_t = 3)]
        k: u32,
    },
    /// Rate check of the witness sequences
    Criterion {
        #[arg(long = "K", default_value_t = 3)]
        k: u32,
    },
    /// Hypercyclicity Criterion check on the Rolewicz operator 2B
    RolewiczDemo {
        #[arg(long, default_value_t = 12)]
        dim: usize,
        /// Number of indices n_k = 1..n
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Drop the 2^-k scaling of S_k
        #[arg(long)]
        broken: bool,
    },
    /// First hit times of T^n e_0 near e_j
    Orbit {
        #[arg(long, default_value_t = 64)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        /// Target orbit indices
        #[arg(long, value_delimiter = ',', default_value = "5")]
        j: Vec<u64>,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Dense truncation of T on span(f_0, ..., f_{dim-1})
    Matrix {
        #[arg(long, default_value_t = 16)]
        dim: usize,
    },
}

struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

fn parse_poly(s: &str) -> Result<Polynomial, CliError> {
    Polynomial::parse(s).map_err(|e| CliError::Usage(format!("--p: {e}")))
}

fn table(cfg: &Config) -> Result<ExpansionTable, CliError> {
    Ok(ExpansionTable::new(build_schedule(&cfg.params)?))
}

fn schedule_text(s: &IntervalSchedule, json: bool) -> String {
    if json {
        report::render_json(&report::schedule_json(s))
    } else {
        s.dump()
    }
}

fn vector_text(v: &SparseVector) -> String {
    v.iter().map(|(i, c)| format!("{i}\t{}\n", fmt_g17(c))).collect()
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = match &cli.common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let json = cli.common.json;
    let space = cfg.params.space;
    let out = match &cli.command {
        Command::Schedule => Outcome::ok(schedule_text(&build_schedule(&cfg.params)?, json)),
        Command::Expand { j } => {
            let v = table(&cfg)?.expand_e(j)?;
            Outcome::ok(if json { report::render_json(&report::vector_json(&v)) } else { vector_text(&v) })
        }
        Command::LayoffNorm { l, nu, j } => Outcome::ok(format!("{:?}\n", layoff_coefficient(l, nu, j)?)),
        Command::FanError { n, p } => {
            let t = table(&cfg)?;
            let p = match p {
                Some(p) => parse_poly(p)?,
                None => t
                    .schedule()
                    .fan(*n)
                    .ok_or_else(|| LabError::ScheduleExhausted(format!("no fan {n}")))?
                    .p
                    .clone(),
            };
            Outcome::ok(format!("{:?}\n", fan_error(&t, *n, &p, space)?))
        }
        Command::Doubling { p, eps } => {
            let chain = doubling_search(&table(&cfg)?, &parse_poly(p)?, *eps, space)?;
            Outcome::ok(if json { report::render_json(&report::chain_json(&chain)) } else { report::chain_csv(&chain) })
        }
        Command::Witness { k } => {
            let w = theorem2_witness(&table(&cfg)?, *k, space)?;
            let failed = !check_prop4(&w, &Prop4Bounds::default()).passed();
            let text = if json { report::render_json(&report::witness_json(&w)) } else { report::witness_csv(&w) };
            Outcome { text, failed }
        }
        Command::Criterion { k } => {
            let w = theorem2_witness(&table(&cfg)?, *k, space)?;
            check_outcome(check_prop4(&w, &Prop4Bounds::default()), json)
        }
        Command::RolewiczDemo { dim, n, broken } => {
            let mut inst = rolewicz_instance(*dim, *n, *broken)?;
            inst.space = space;
            check_outcome(check_hc_criterion(&inst, cfg.tol)?, json)
        }
        Command::Orbit { dim, horizon, j, eps } => {
            let sched = build_schedule(&cfg.params)?;
            let t = table(&cfg)?;
            let targets = j.iter().map(|&j| t.expand_e_u64(j)).collect::<Result<Vec<_>, _>>()?;
            let m = build_dense_matrix(sched, *dim)?;
            let start = SparseVector::single(0u8, 1.0);
            let rep = orbit_hitting_report(&m, &[start], &targets, *eps, *horizon, space)?;
            Outcome::ok(if json { report::render_json(&report::hit_json(&rep)) } else { report::hit_csv(&rep) })
        }
        Command::Matrix { dim } => {
            let m = build_dense_matrix(build_schedule(&cfg.params)?, *dim)?;
            let text = if json {
                report::render_json(&report::matrix_json(&m, operator_norm_l1(&m)))
            } else {
                report::matrix_csv(&m)
            };
            Outcome::ok(text)
        }
    };
    Ok(out)
}

fn check_outcome(rep: hclab_core::criterion::CheckReport, json: bool) -> Outcome {
    let text = if json { report::render_json(&report::check_report_json(&rep)) } else { report::check_report_csv(&rep) };
    Outcome { text, failed: !rep.passed() }
}

fn emit(common: &Common, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = execute(&cli).and_then(|o| emit(&cli.common, &o.text, stdout).map(|_| o.failed));
    match result {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
