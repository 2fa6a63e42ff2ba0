//! The `bergman-lab` command line.
//!
//! Exit status: 0 when every check passed, 1 when a check failed, 2 on
//! usage or I/O errors.

mod output;

use std::io::Write;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

pub use output::{Cell, Table};

use crate::distance::{distance_curve, theorem11_residual, Cache, Precision, CACHE_ENV};
use crate::error::Error;
use crate::operators::{commutant_experiment, finite_section, Section};
use crate::scalar::Mode;
use crate::verify::{run_suite, Suite, VerifyConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Version of the CSV column layout and JSON schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "bergman-lab", version, about = "A^2_1 coefficient numerics, T_k operators and Nyman-Beurling distances")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Run identity-check suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        k_max: u64,
        #[arg(long, default_value_t = 400)]
        order: usize,
        /// `rational` (exact) or `float`.
        #[arg(long, default_value = "rational")]
        mode: Mode,
        /// Largest `v` and `n2` in the moments suite.
        #[arg(long, default_value_t = 8)]
        max_index: u64,
        /// Largest `m` in the lemma13 suite.
        #[arg(long, default_value_t = 10)]
        m_max: u64,
        /// Random series per randomized check.
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Squared distance from beta to span{s_2..s_N}.
    Distance {
        /// Report every N in 2..=n_max.
        #[arg(long, default_value_t = 20)]
        n_max: u64,
        /// Report only these N (comma separated, strictly increasing).
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<u64>>,
        /// `digamma`, `direct` or `direct:<truncation>`.
        #[arg(long, default_value = "digamma")]
        precision: Precision,
        #[arg(long, env = CACHE_ENV)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
        /// Add a wall-time column to the CSV rows.
        #[arg(long)]
        timing: bool,
    },
    /// Residual of the Möbius-weighted combination approximating z^m.
    Approx {
        #[arg(long)]
        m: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<u64>,
        #[arg(long, default_value_t = 100_000)]
        trunc: u64,
    },
    /// Dump a finite section of T_k (or T_k^* with --adjoint).
    Section {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        adjoint: bool,
    },
    /// Dimension of the commutant of the sections of T_k, T_k^*, k <= k_max.
    Commutant {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        k_max: u64,
    },
}

struct Outcome {
    table: Table,
    passed: bool,
    notes: Vec<String>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn execute(command: &Command) -> Result<Outcome, Error> {
    match command {
        Command::Verify { suite, k_max, order, mode, max_index, m_max, trials } => {
            if *order == 0 {
                return Err(usage("--order must be >= 1"));
            }
            let cfg = VerifyConfig {
                k_max: *k_max,
                order: *order,
                mode: *mode,
                max_index: *max_index,
                m_max: *m_max,
                trials: *trials,
            };
            let rows = run_suite(*suite, &cfg)?;
            let mut table = Table::new(&["check", "k", "m", "mode", "deviation", "tolerance", "pass"]);
            let passed = rows.iter().all(|r| r.pass);
            for r in rows {
                let mode = if r.mode == Mode::Exact { "exact" } else { "float" };
                table.push(vec![
                    r.check.into(),
                    r.k.into(),
                    r.m.into(),
                    mode.into(),
                    r.deviation.into(),
                    r.tolerance.into(),
                    r.pass.into(),
                ]);
            }
            Ok(Outcome { table, passed, notes: Vec::new() })
        }
        Command::Distance { n_max, n_list, precision, cache_dir, no_cache, timing } => {
            let ns: Vec<u64> = match n_list {
                Some(v) => v.clone(),
                None => (2..=*n_max).collect(),
            };
            if ns.is_empty() {
                return Err(usage("--n-max must be >= 2"));
            }
            let cache = match (no_cache, cache_dir) {
                (false, Some(d)) => Some(Cache::open(d)?),
                _ => None,
            };
            let start = Instant::now();
            let reports = distance_curve(&ns, *precision, cache.as_ref())?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let mut cols = vec!["N", "distance_sq", "solver", "error_budget"];
            if *timing {
                cols.push("wall_ms");
            }
            let mut table = Table::new(&cols);
            for r in &reports {
                let mut row: Vec<Cell> =
                    vec![r.n_max.into(), r.distance_sq.into(), r.solver.to_string().into(), r.error_budget.into()];
                if *timing {
                    row.push(wall_ms.into());
                }
                table.push(row);
            }
            table.extra.insert("wall_ms".into(), json!(wall_ms));
            table.extra.insert("precision".into(), json!(precision.to_string()));
            let coeffs: Vec<_> = reports.iter().map(|r| json!({"N": r.n_max, "coefficients": r.coefficients})).collect();
            table.extra.insert("coefficients".into(), json!(coeffs));
            Ok(Outcome { table, passed: true, notes: Vec::new() })
        }
        Command::Approx { m, k_list, trunc } => {
            let mut table = Table::new(&[
                "m",
                "K",
                "trunc",
                "mertens",
                "residual_h2",
                "residual_a21",
                "tail_h2",
                "residual_h2_upper",
                "bound",
                "lemma_ok",
            ]);
            let mut passed = true;
            for &k in k_list {
                let r = theorem11_residual(*m, k, *trunc)?;
                let ok = r.residual_a21 <= 2f64.sqrt() * r.residual_h2;
                passed &= ok;
                table.push(vec![
                    r.m.into(),
                    r.k_max.into(),
                    r.trunc.into(),
                    r.mertens.into(),
                    r.residual_h2.into(),
                    r.residual_a21.into(),
                    r.tail_h2.into(),
                    r.residual_h2_upper.into(),
                    r.bound.into(),
                    ok.into(),
                ]);
            }
            Ok(Outcome { table, passed, notes: Vec::new() })
        }
        Command::Section { k, dim, adjoint } => {
            if *k == 0 || *dim == 0 {
                return Err(usage("--k and --dim must be >= 1"));
            }
            let which = if *adjoint { Section::TStar } else { Section::T };
            let s = finite_section(*k, *dim, which);
            let mut cols: Vec<String> = vec!["row".into()];
            cols.extend((0..*dim).map(|n| n.to_string()));
            let mut table = Table { columns: cols, ..Default::default() };
            for m in 0..*dim {
                let mut row: Vec<Cell> = vec![m.into()];
                row.extend((0..*dim).map(|n| Cell::Float(s.entries[(m, n)])));
                table.push(row);
            }
            let counts = s.column_counts();
            table.extra.insert("k".into(), json!(k));
            table.extra.insert("dim".into(), json!(dim));
            table.extra.insert("which".into(), json!(which));
            table.extra.insert("nonzeros".into(), json!(s.nonzeros()));
            table.extra.insert("column_counts".into(), json!(counts));
            let notes = vec![format!("nonzeros={} column_counts={:?}", s.nonzeros(), counts)];
            Ok(Outcome { table, passed: true, notes })
        }
        Command::Commutant { dim, k_max } => {
            let r = commutant_experiment(*dim, *k_max)?;
            let mut table = Table::new(&[
                "dim",
                "k_max",
                "solution_dimension",
                "rank",
                "tolerance",
                "sigma_max",
                "residual",
                "smallest_retained",
                "identity_residual",
            ]);
            let passed = r.identity_residual == 0.0 && r.solution_dimension >= 1;
            table.push(vec![
                r.dim.into(),
                r.k_max.into(),
                r.solution_dimension.into(),
                r.rank.into(),
                r.tolerance.into(),
                r.sigma_max.into(),
                r.residual.into(),
                r.smallest_retained.into(),
                r.identity_residual.into(),
            ]);
            Ok(Outcome { table, passed, notes: Vec::new() })
        }
    }
}

fn header(cli: &Cli) -> serde_json::Value {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "tool": "bergman-lab",
        "version": SCHEMA_VERSION,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "timestamp": timestamp,
        "config": cli.command,
    })
}

/// Parses `args` (including the program name) and runs the command, writing
/// data to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_PASS { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be >= 1");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return EXIT_USAGE;
        }
    };

    let outcome = match pool.install(|| execute(&cli.command)) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };

    let written = match cli.format {
        Format::Csv => outcome.table.write_csv(out),
        Format::Json => outcome.table.write_json(header(&cli), out),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    for note in &outcome.notes {
        let _ = writeln!(err, "{note}");
    }
    if outcome.passed {
        EXIT_PASS
    } else {
        let _ = writeln!(err, "one or more checks failed");
        EXIT_CHECK_FAILED
    }
}
