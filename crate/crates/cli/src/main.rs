use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rlinear_cli::config::{self, ConfigError, Format, Mode, RunConfig};
use rlinear_cli::output::{curves_path, render};
use rlinear_cli::records::Record;
use rlinear_cli::run::{run, RunError};

/// Eigenvalue solver for the R-linear conjugation problem on circular inclusions.
#[derive(Debug, Parser)]
#[command(name = "solve", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Sweep seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for assembly and sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn load(args: &Args) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        ConfigError::Schema(vec![config::FieldError {
            field: "--config".into(),
            message: format!("{}: {e}", args.config.display()),
        }])
    })?;
    let mut cfg = config::parse_config_raw(&text)?;
    if let Some(mode) = args.mode {
        cfg.mode = mode;
    }
    if let Some(seed) = args.seed {
        cfg.sweep.seed = seed;
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.display().to_string());
    }
    if args.sequential {
        cfg.solver.parallel = false;
        cfg.analysis.parallel = false;
    }
    config::apply_env_overrides(&mut cfg, |k| std::env::var(k).ok())?;
    config::validate_config(&cfg)?;
    Ok(cfg)
}

fn execute(cfg: &RunConfig, threads: Option<usize>) -> Result<Vec<Record>, RunError> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool");
        return pool.install(|| run(cfg));
    }
    #[cfg(not(feature = "parallel"))]
    if threads.is_some() {
        eprintln!("warning: built without the parallel feature; --threads ignored");
    }
    run(cfg)
}

fn write(cfg: &RunConfig, records: &[Record]) -> std::io::Result<()> {
    let rendered = render(records, cfg.output.format);
    match &cfg.output.path {
        Some(path) => {
            let path = PathBuf::from(path);
            fs::write(&path, &rendered.main)?;
            if let Some(curves) = &rendered.curves {
                fs::write(curves_path(&path), curves)?;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(rendered.main.as_bytes())?;
            if let Some(curves) = &rendered.curves {
                out.write_all(b"\n")?;
                out.write_all(curves.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let records = match execute(&cfg, args.threads) {
        Ok(r) => r,
        Err(RunError::Config(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    if let Some(Record::SweepSummary(s)) = records.last() {
        eprintln!(
            "sweep: {} configs, {} failed, {} eigenvalues, {} nonreal confirmed, {} counterexamples",
            s.count,
            s.failed,
            s.accepted_eigenvalues,
            s.nonreal_confirmed.len(),
            s.counterexamples.len()
        );
        for c in &s.counterexamples {
            eprintln!(
                "counterexample: {}",
                serde_json::to_string(c).expect("serializable")
            );
        }
    }
    if let Err(e) = write(&cfg, &records) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    ExitCode::SUCCESS
}
