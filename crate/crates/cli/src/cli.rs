//! Argument parsing and dispatch for the `bloch-tsp` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bloch_tsp_core::noise::NoiseMode;

use crate::benchmark::{run_benchmark, BenchmarkConfig};
use crate::commands::{cmd_brute, cmd_encode, cmd_solve, cmd_worked_example, Outcome};
use crate::error::{CliError, Result};
use crate::io::{load_hyper, load_instance, resolve_out_dir, to_csv, to_json, OUT_DIR_ENV};
use crate::noise_study::{run_noise_study, NoiseStudyConfig};

#[derive(Debug, Parser)]
#[command(name = "bloch-tsp", version, about = "Travelling salesman solvers on a single-qubit Bloch sphere")]
pub struct Cli {
    /// Directory for report files.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    pub out_dir: Option<PathBuf>,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Format of the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Symmetric,
    Asymmetric,
    Both,
}

impl Kind {
    fn flags(self) -> Vec<bool> {
        match self {
            Kind::Symmetric => vec![true],
            Kind::Asymmetric => vec![false],
            Kind::Both => vec![true, false],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseModeArg {
    PerRun,
    PerApplication,
}

impl From<NoiseModeArg> for NoiseMode {
    fn from(m: NoiseModeArg) -> Self {
        match m {
            NoiseModeArg::PerRun => NoiseMode::PerRun,
            NoiseModeArg::PerApplication => NoiseMode::PerApplication,
        }
    }
}

#[derive(Debug, Args)]
pub struct InstanceArg {
    /// Cost matrix file (JSON or CSV), or `fixture:NAME` for a bundled one.
    #[arg(long)]
    pub instance: String,
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    /// Solver settings as JSON; omitted fields take defaults.
    #[arg(long)]
    pub hyper: Option<PathBuf>,

    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize the superposition protocol on one instance.
    Solve {
        #[command(flatten)]
        instance: InstanceArg,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Tabulate cost and traversal time of every tour.
    Brute {
        #[command(flatten)]
        instance: InstanceArg,
    },
    /// Dump encoded states and the operator catalog.
    Encode {
        #[command(flatten)]
        instance: InstanceArg,
        /// 1-based start city.
        #[arg(long, default_value_t = 1)]
        start_city: usize,
    },
    /// Solve batches of seeded random instances.
    Benchmark {
        /// City counts, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [4, 5, 6])]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Kind::Symmetric)]
        kind: Kind,
        /// Instances per bucket.
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Approximation error under angle noise.
    NoiseStudy {
        #[arg(long, value_delimiter = ',', default_values_t = [4, 5, 6, 7])]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Kind::Both)]
        kind: Kind,
        #[arg(long, default_value_t = 10)]
        matrices: usize,
        /// Noise draws per matrix.
        #[arg(long, default_value_t = 10)]
        noise_seeds: usize,
        /// Largest relative angle error.
        #[arg(long, default_value_t = 0.001)]
        level: f64,
        #[arg(long, value_enum, default_value_t = NoiseModeArg::PerApplication)]
        noise_mode: NoiseModeArg,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Solve the bundled 4-city instance and compare with the optimum.
    WorkedExample {
        #[command(flatten)]
        hyper: HyperArgs,
    },
}

/// Hyper file plus seed. Batch commands keep the seed as the instance master
/// seed instead of overriding the solver seed.
fn batch_hyper(args: &HyperArgs) -> Result<(crate::Hyper, u64)> {
    Ok((load_hyper(args.hyper.as_deref(), None)?, args.seed.unwrap_or(0)))
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Solve { instance, hyper } => {
            let m = load_instance(&instance.instance)?;
            cmd_solve(&m, &load_hyper(hyper.hyper.as_deref(), hyper.seed)?)
        }
        Command::Brute { instance } => cmd_brute(&load_instance(&instance.instance)?),
        Command::Encode {
            instance,
            start_city,
        } => cmd_encode(&load_instance(&instance.instance)?, *start_city),
        Command::Benchmark {
            sizes,
            kind,
            instances,
            hyper,
        } => {
            let (hyper, master_seed) = batch_hyper(hyper)?;
            let cfg = BenchmarkConfig {
                sizes: sizes.clone(),
                kinds: kind.flags(),
                instances: *instances,
                master_seed,
                hyper,
            };
            let (report, timing) = run_benchmark(&cfg)?;
            Ok(Outcome {
                artifacts: report.artifacts()?,
                summary_json: to_json(&report.buckets),
                summary_csv: report
                    .artifacts()?
                    .get("benchmark_buckets.csv")
                    .unwrap_or_default()
                    .to_string(),
                timing,
            })
        }
        Command::NoiseStudy {
            sizes,
            kind,
            matrices,
            noise_seeds,
            level,
            noise_mode,
            hyper,
        } => {
            let (hyper, master_seed) = batch_hyper(hyper)?;
            let cfg = NoiseStudyConfig {
                sizes: sizes.clone(),
                kinds: kind.flags(),
                matrices: *matrices,
                noise_seeds: *noise_seeds,
                level: *level,
                mode: (*noise_mode).into(),
                master_seed,
                hyper,
            };
            let (report, timing) = run_noise_study(&cfg)?;
            Ok(Outcome {
                artifacts: report.artifacts()?,
                summary_json: to_json(&report.points),
                summary_csv: to_csv(&report.points)?,
                timing,
            })
        }
        Command::WorkedExample { hyper } => {
            cmd_worked_example(&load_hyper(hyper.hyper.as_deref(), hyper.seed)?)
        }
    }
}

/// Runs the parsed command, writes reports and prints the summary.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let outcome = pool.install(|| execute(&cli.command))?;
    let dir = resolve_out_dir(cli.out_dir.clone());
    let mut artifacts = outcome.artifacts.clone();
    artifacts.add("timing.json", to_json(&outcome.timing));
    artifacts.write(&dir)?;
    let summary = match cli.format {
        Format::Json => &outcome.summary_json,
        Format::Csv => &outcome.summary_csv,
    };
    stdout
        .write_all(summary.as_bytes())
        .map_err(|e| CliError::io("stdout", e))?;
    Ok(())
}

/// Entry point returning the process exit status; errors go to `stderr` as JSON.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""));
            let _ = writeln!(stderr, "{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}
