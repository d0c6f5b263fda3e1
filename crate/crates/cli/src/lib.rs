//! Command-line driver for the STL tableau: single checks, benchmark sweeps,
//! SMT-LIB export and the brute-force oracle.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use stl_tableau::formula::ParseError;
use stl_tableau::oracle::{brute_force_check, OracleError, DEFAULT_CAP};
use stl_tableau::smt_export::emit_smtlib;
use stl_tableau::tableau::TOGGLES;
use stl_tableau::witness::{reconstruct, write_signal_file, WitnessError};
use stl_tableau::{parse_requirements, solve, Dialect, Formula, Options, Stats, Status};

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

/// Columns of the `bench` CSV.
pub const BENCH_HEADER: [&str; 9] = [
    "name", "result", "time_s", "nodes", "poised", "jumps", "memo_hits", "lra_calls", "options",
];

#[derive(Debug, Parser)]
#[command(name = "stltab", version, about = "Satisfiability checking for bounded discrete-time STL")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a formula or the conjunction of a requirement set.
    Check {
        file: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write a satisfying signal here (CSV, or JSON for `.json`).
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Write the explored tableau as a DOT graph.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Print search counters to stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Check every `.stl` and `.mltl` file in a directory and print a CSV.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Also run each file with every single optimization turned off.
        #[arg(long)]
        ablate: bool,
        /// Write the CSV here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Number of instances solved in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the bounded SMT-LIB2 encoding.
    EmitSmt {
        file: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Decide by exhaustive search over the grounded formula.
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Largest horizon accepted.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        oracle_cap: u64,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Stl,
    Mltl,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input dialect; inferred from the extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Per-instance time limit in seconds.
    #[arg(long, default_value_t = 120.0)]
    pub timeout: f64,
    #[arg(long)]
    pub no_jump: bool,
    #[arg(long)]
    pub no_gf_rules: bool,
    #[arg(long)]
    pub no_implication_rule: bool,
    #[arg(long)]
    pub no_gf_unroll: bool,
    #[arg(long)]
    pub no_merge: bool,
    #[arg(long)]
    pub no_shift: bool,
    #[arg(long)]
    pub no_early_check: bool,
    #[arg(long)]
    pub no_memo: bool,
    #[arg(long)]
    pub no_easy_first: bool,
}

impl SolverArgs {
    pub fn options(&self) -> Options {
        let disabled = [
            self.no_jump,
            self.no_gf_rules,
            self.no_implication_rule,
            self.no_gf_unroll,
            self.no_merge,
            self.no_shift,
            self.no_early_check,
            self.no_memo,
            self.no_easy_first,
        ];
        let mut opts = Options {
            timeout: (self.timeout > 0.0).then(|| Duration::from_secs_f64(self.timeout)),
            ..Options::default()
        };
        for (name, off) in TOGGLES.iter().zip(disabled) {
            if off {
                *opts.toggle_mut(name).expect("known toggle") = false;
            }
        }
        opts
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One row of a benchmark sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub name: String,
    pub formula_count: usize,
    /// `sat`, `unsat`, `timeout` or `error`.
    pub verdict: String,
    pub seconds: f64,
    pub stats: Stats,
    pub options: String,
}

impl BenchmarkRecord {
    fn fields(&self) -> [String; 9] {
        [
            self.name.clone(),
            self.verdict.clone(),
            format!("{:.3}", self.seconds),
            self.stats.nodes.to_string(),
            self.stats.poised.to_string(),
            self.stats.jumps.to_string(),
            self.stats.memo_hits.to_string(),
            self.stats.lra_calls.to_string(),
            self.options.clone(),
        ]
    }
}

pub fn dialect_for(path: &Path, format: Option<Format>) -> Dialect {
    match format {
        Some(Format::Stl) => Dialect::Stl,
        Some(Format::Mltl) => Dialect::Mltl,
        None if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mltl")) => Dialect::Mltl,
        None => Dialect::Stl,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Reads a requirement file as the conjunction of its lines.
pub fn load(path: &Path, format: Option<Format>) -> Result<(Formula, usize), CliError> {
    let text = read(path)?;
    let count = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .count();
    let f = parse_requirements(&text, dialect_for(path, format)).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })?;
    Ok((f, count))
}

fn exit_code(status: Status) -> i32 {
    match status {
        Status::Sat => EXIT_SAT,
        Status::Unsat => EXIT_UNSAT,
        Status::Timeout => EXIT_TIMEOUT,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let stdout = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match cli.command {
        Command::Check {
            file,
            input,
            solver,
            witness,
            trace,
            stats,
        } => {
            let (f, _) = load(&file, input.format)?;
            let mut opts = solver.options();
            opts.trace = trace.is_some();
            let v = solve(&f, &opts);
            writeln!(out, "{}", v.status).map_err(stdout)?;
            if stats {
                let _ = writeln!(err, "{:?}", v.stats);
            }
            if let (Some(path), Some(t)) = (&trace, &v.trace) {
                write_file(path, &t.to_dot())?;
            }
            if let (Some(path), Some(branch)) = (&witness, &v.branch) {
                write_signal_file(&reconstruct(branch)?, path)?;
            }
            Ok(exit_code(v.status))
        }
        Command::Bench {
            dir,
            solver,
            ablate,
            output,
            jobs,
        } => {
            let mut configs = vec![solver.options()];
            if ablate {
                for name in TOGGLES {
                    let mut o = solver.options();
                    *o.toggle_mut(name).expect("known toggle") = false;
                    if !configs.contains(&o) {
                        configs.push(o);
                    }
                }
            }
            let records = bench(&dir, &configs, jobs)?;
            match output {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|source| CliError::Io { path, source })?;
                    write_csv(&records, file)?;
                }
                None => write_csv(&records, &mut *out)?,
            }
            Ok(EXIT_SAT)
        }
        Command::EmitSmt { file, input, output } => {
            let (f, _) = load(&file, input.format)?;
            let script = emit_smtlib(&f);
            match output {
                Some(path) => write_file(&path, &script)?,
                None => out.write_all(script.as_bytes()).map_err(stdout)?,
            }
            Ok(EXIT_SAT)
        }
        Command::Oracle {
            file,
            input,
            oracle_cap,
            witness,
        } => {
            let (f, _) = load(&file, input.format)?;
            let v = brute_force_check(&f, oracle_cap)?;
            writeln!(out, "{}", if v.satisfiable { "sat" } else { "unsat" }).map_err(stdout)?;
            if let (Some(path), Some(w)) = (&witness, &v.witness) {
                write_signal_file(w, path)?;
            }
            Ok(if v.satisfiable { EXIT_SAT } else { EXIT_UNSAT })
        }
    }
}

/// Requirement files of a directory, sorted by name.
pub fn benchmark_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| CliError::Io {
                path: dir.to_owned(),
                source,
            })?
            .path();
        let known = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("stl") || e.eq_ignore_ascii_case("mltl"));
        if known && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn run_one(path: &Path, opts: &Options) -> BenchmarkRecord {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut record = BenchmarkRecord {
        name,
        formula_count: 0,
        verdict: "error".into(),
        seconds: 0.0,
        stats: Stats::default(),
        options: opts.fingerprint(),
    };
    if let Ok((f, count)) = load(path, None) {
        let start = Instant::now();
        let v = solve(&f, opts);
        record.seconds = start.elapsed().as_secs_f64();
        record.formula_count = count;
        record.verdict = v.status.to_string();
        record.stats = v.stats;
    }
    record
}

/// Solves every file under every configuration; rows come out file by file,
/// configurations in the given order, regardless of `jobs`.
pub fn bench(dir: &Path, configs: &[Options], jobs: usize) -> Result<Vec<BenchmarkRecord>, CliError> {
    let files = benchmark_files(dir)?;
    let tasks: Vec<(&Path, &Options)> = files
        .iter()
        .flat_map(|f| configs.iter().map(move |o| (f.as_path(), o)))
        .collect();
    let results: Mutex<Vec<Option<BenchmarkRecord>>> = Mutex::new(vec![None; tasks.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, tasks.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((path, opts)) = tasks.get(i) else { break };
                let record = run_one(path, opts);
                results.lock().expect("no panics while holding the lock")[i] = Some(record);
            });
        }
    });
    Ok(results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect())
}

pub fn write_csv<W: Write>(records: &[BenchmarkRecord], sink: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(BENCH_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: PathBuf::from("<csv>"),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toggles_map_onto_options() {
        let cli = Cli::try_parse_from(["stltab", "check", "x.stl", "--no-jump", "--no-memo", "--timeout", "5"]).unwrap();
        let Command::Check { solver, .. } = cli.command else { panic!("check expected") };
        let o = solver.options();
        assert_eq!(o.fingerprint(), "no-jump+no-memo");
        assert_eq!(o.timeout, Some(Duration::from_secs(5)));
    }

    #[test]
    fn dialect_follows_extension_unless_forced() {
        assert_eq!(dialect_for(Path::new("a.mltl"), None), Dialect::Mltl);
        assert_eq!(dialect_for(Path::new("a.stl"), None), Dialect::Stl);
        assert_eq!(dialect_for(Path::new("a.txt"), Some(Format::Mltl)), Dialect::Mltl);
    }

    #[test]
    fn csv_header_only_for_no_records() {
        let mut out = Vec::new();
        write_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "name,result,time_s,nodes,poised,jumps,memo_hits,lra_calls,options\n");
    }
}
