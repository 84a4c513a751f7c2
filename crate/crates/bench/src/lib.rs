//! Benchmark studies for the Bézier B̄ library: configuration, parallel
//! study execution, CSV output and an invariant suite.

pub mod config;
pub mod study;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{StudyConfig, StudyKind};
pub use study::{run_study, StudyResult};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Io(_) => 1,
            BenchError::Numerical(_) => 2,
            BenchError::Verify(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bbar-bench", version, about = "Bézier B̄ locking studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Study configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for CSV and pattern files.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Run the invariant suite after the study.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bézier versus global L² projection.
    Project(RunArgs),
    /// Timoshenko beam convergence and slenderness studies.
    BeamStudy(RunArgs),
    /// Cook's membrane and plate with a hole.
    ElasticityStudy(RunArgs),
    /// Numerical inf-sup constants on the quarter annulus.
    Infsup(RunArgs),
    /// Stiffness sparsity patterns of the beam formulations.
    Spy(RunArgs),
}

impl Command {
    fn parts(&self) -> (StudyKind, &RunArgs) {
        match self {
            Command::Project(a) => (StudyKind::Project, a),
            Command::BeamStudy(a) => (StudyKind::BeamStudy, a),
            Command::ElasticityStudy(a) => (StudyKind::ElasticityStudy, a),
            Command::Infsup(a) => (StudyKind::Infsup, a),
            Command::Spy(a) => (StudyKind::Spy, a),
        }
    }
}

/// Execute one CLI invocation; returns the path of the written CSV.
pub fn execute(cli: &Cli) -> Result<PathBuf, BenchError> {
    let (kind, args) = cli.command.parts();
    let cfg = StudyConfig::load(&args.config)?;
    if cfg.study != kind {
        return Err(BenchError::Config(format!(
            "{} declares study `{}` but subcommand `{}` was given",
            args.config.display(),
            cfg.study.name(),
            kind.name()
        )));
    }
    std::fs::create_dir_all(&args.out).map_err(|e| BenchError::Io(format!("{}: {e}", args.out.display())))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(BenchError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| BenchError::Config(e.to_string()))?;
    let result = pool.install(|| run_study(&cfg, &args.out))?;

    let path = args.out.join(cfg.output_name());
    result.write_csv(&path)?;
    for row in result.rows.iter().filter(|r| r.status != "ok") {
        eprintln!("{} p={} n={}: {}", row.method, row.degree, row.mesh, row.status);
    }

    if args.verify {
        let checks = verify::run_checks(cfg.seed);
        for c in &checks {
            eprintln!("verify {:<34} {} {}", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail);
        }
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if !failed.is_empty() {
            return Err(BenchError::Verify(failed.join(", ")));
        }
    }
    match result.failures() {
        0 => Ok(path),
        n => Err(BenchError::Numerical(format!("{n} of {} rows failed", result.rows.len()))),
    }
}

/// Parse arguments, run, and map the outcome to a process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(path) => {
            println!("{}", path.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    const BEAM: &str = "study = \"beam-study\"\ndegrees = [1, 2, 3]\nmeshes = [4, 8, 16, 32, 64]\n";

    fn run_in(dir: &Path, sub: &str, config: &str) -> i32 {
        let cfg = dir.join("study.toml");
        std::fs::write(&cfg, config).unwrap();
        run(["bbar-bench", sub, "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--threads", "3"])
    }

    fn without_wall_time(csv: &str) -> Vec<String> {
        csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    }

    #[test]
    fn beam_study_has_sixty_rows_and_is_deterministic() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(run_in(a.path(), "beam-study", BEAM), 0);
        assert_eq!(run_in(b.path(), "beam-study", BEAM), 0);
        let read = |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join("beam-study.csv")).unwrap();
        let (ca, cb) = (read(&a), read(&b));
        assert_eq!(ca.lines().count(), 61);
        assert_eq!(without_wall_time(&ca), without_wall_time(&cb));
    }

    #[test]
    fn rates_only_on_finest_row_of_each_group() {
        let cfg = StudyConfig::parse(BEAM).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let res = run_study(&cfg, dir.path()).unwrap();
        for r in &res.rows {
            assert_eq!(r.rates.iter().any(Option::is_some), r.mesh == 64, "{} p={} n={}", r.method, r.degree, r.mesh);
        }
        let short = StudyConfig::parse("study = \"beam-study\"\ndegrees = [2]\nmeshes = [4, 8]\n").unwrap();
        let res = run_study(&short, dir.path()).unwrap();
        assert!(res.rows.iter().all(|r| r.rates.iter().all(Option::is_none)));
    }

    #[test]
    fn csv_round_trips() {
        let cfg = StudyConfig::parse("study = \"project\"\ndegrees = [2]\nmeshes = [4, 8, 16]\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let res = run_study(&cfg, dir.path()).unwrap();
        let path = dir.path().join("out.csv");
        res.write_csv(&path).unwrap();
        let mut rd = csv::Reader::from_path(&path).unwrap();
        let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, res.header());
        let col = |name: &str| header.iter().position(|h| h == name).unwrap();
        for (rec, row) in rd.records().zip(&res.rows) {
            let rec = rec.unwrap();
            for (k, c) in res.columns.iter().enumerate() {
                let v: f64 = rec[col(c.name)].parse().unwrap();
                assert_eq!(v.to_bits(), row.values[k].to_bits());
            }
            assert_eq!(rec[col("n_elem")].parse::<usize>().unwrap(), row.mesh);
        }
    }

    #[test]
    fn spy_nonsymmetric_is_sparser() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = "study = \"spy\"\nmethods = [\"S-TP\", \"NS-TP\"]\ndegrees = [2, 3]\nmeshes = [16]\n";
        assert_eq!(run_in(dir.path(), "spy", cfg), 0);
        for p in [2, 3] {
            let count = |m: &str| {
                let text = std::fs::read_to_string(dir.path().join(format!("spy_{m}_p{p}_n16.txt"))).unwrap();
                text.lines().count()
            };
            assert!(count("NS-TP") <= count("S-TP"));
        }
    }

    #[test]
    fn config_errors_exit_with_one() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), "beam-study", "study = \"beam-study\"\ndegrees = [2]\nmesh = [4]\n"), 1);
        assert_eq!(run_in(dir.path(), "infsup", BEAM), 1);
        assert_eq!(run(["bbar-bench", "spy", "--config", "/nonexistent/x.toml"]), 1);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(BenchError::Config(String::new()).exit_code(), 1);
        assert_eq!(BenchError::Numerical(String::new()).exit_code(), 2);
        assert_eq!(BenchError::Verify(String::new()).exit_code(), 3);
    }
}
