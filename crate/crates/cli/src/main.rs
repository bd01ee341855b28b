use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cavstat_cli::config::{ConfigError, SweepConfig, PRESETS};
use cavstat_cli::run::{run_point, run_sweep, write_csv, write_json, ResultRow};
use cavstat_cli::validate::{run_validate, Level};
use clap::{Args, Parser, Subcommand, ValueEnum};

const CONFIG_ERROR: u8 = 2;
const VALIDATION_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "cavstat",
    version,
    about = "Photon statistics of a laser-dressed emitter in a pumped microcavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single parameter point.
    Point(RunArgs),
    /// Sweep one parameter over a grid, optionally one curve per series value.
    Sweep(RunArgs),
    /// Run the acceptance checks.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; `#` starts a comment.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in figure configuration. The kappa/Gamma axis [0.01, 3] with 60
    /// log-spaced points is a fixed choice; override it with `--set`.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    /// Override a configuration key (repeatable), e.g. `--set n_bar=1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output path, or `stdout`.
    #[arg(long, default_value = "stdout")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Moment truncation order K (even).
    #[arg(long)]
    order: Option<u32>,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

fn build_config(args: &RunArgs) -> Result<SweepConfig, ConfigError> {
    let mut cfg = match &args.preset {
        Some(name) => SweepConfig::preset(name)?,
        None => SweepConfig::default(),
    };
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(k) = args.order {
        cfg.order = k;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(rows: &[ResultRow], args: &RunArgs) -> io::Result<()> {
    let mut sink: Box<dyn Write> = if args.out == "stdout" || args.out == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(&args.out)?))
    };
    match args.format {
        Format::Csv => write_csv(rows, &mut sink)?,
        Format::Json => write_json(rows, &mut sink)?,
    }
    sink.flush()
}

fn run(args: RunArgs, sweep: bool) -> ExitCode {
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let rows = if sweep {
        let workers = args.workers.unwrap_or(0);
        let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: cannot start {workers} workers: {e}");
                return ExitCode::from(CONFIG_ERROR);
            }
        };
        pool.install(|| run_sweep(&cfg))
    } else {
        match run_point(&cfg) {
            Ok(row) => vec![row],
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(CONFIG_ERROR);
            }
        }
    };
    if let Err(e) = emit(&rows, &args) {
        eprintln!("error: writing {}: {e}", args.out);
        return ExitCode::from(CONFIG_ERROR);
    }
    let failed = rows.iter().filter(|r| r.is_error()).count();
    if failed > 0 {
        log::warn!("{failed} of {} points failed", rows.len());
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Point(args) => run(args, false),
        Command::Sweep(args) => run(args, true),
        Command::Validate { level } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let reports = run_validate(level);
            for r in &reports {
                print!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            println!(
                "{} of {} criteria passed",
                reports.len() - failed,
                reports.len()
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(VALIDATION_FAILURE)
            }
        }
    }
}
