use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvand::emit::{emit, Format};
use cvand::{sweep, verify, CliError, CliResult, Config, Experiment};

#[derive(Parser)]
#[command(name = "cvand", version, about = "Clustered Vandermonde experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment description.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Principal angles between two cluster subspaces.
    Angles(Common),
    /// Singular values of V_N / sqrt(N) over random N and cluster size.
    Spectrum(Common),
    /// Componentwise least-squares error amplification.
    Leastsq(Common),
    /// Randomized invariant suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn run_experiment(kind: Experiment, c: &Common) -> CliResult<()> {
    let path = c.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = Config::from_path(path)?;
    if cfg.experiment != kind {
        return Err(CliError::Config(format!("{}: config declares {}, not {kind}", path.display(), cfg.experiment)));
    }
    let records = sweep::run(&cfg, c.seed, c.jobs)?;
    let valid = records.iter().filter(|r| r.valid).count();
    for p in emit(&records, &cfg, c.seed, &c.out, c.format)? {
        println!("wrote {}", p.display());
    }
    println!("{} records, {valid} in regime", records.len());
    Ok(())
}

fn run_verify(c: &Common, suite: &str) -> CliResult<()> {
    if c.config.is_some() {
        return Err(CliError::Config("verify takes no --config".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", c.jobs)))?;
    let reports = pool.install(|| verify::run_verify(suite, c.seed))?;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{status} {:<22} instances {:>6} checked {:>6} violations {}", r.suite, r.instances, r.checked, r.violations);
    }
    let failed = verify::write_failures(&reports, &c.out)?;
    for p in &failed {
        eprintln!("failing instance written to {}", p.display());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Suite(format!("{} suite(s) failed", failed.len())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Angles(c) => run_experiment(Experiment::Angles, c),
        Command::Spectrum(c) => run_experiment(Experiment::Spectrum, c),
        Command::Leastsq(c) => run_experiment(Experiment::Leastsq, c),
        Command::Verify { common, suite } => run_verify(common, suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
