//! `spectral-lab` command-line runner.

mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;
use spectral_lab::LabError;

use crate::config::{ConfigError, ExperimentConfig, Kind};

#[derive(Parser)]
#[command(name = "spectral-lab", version, about = "Run spectral-lab experiments from TOML configs")]
struct Cli {
    /// List the experiment kinds and their section keys.
    #[arg(long)]
    list: bool,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "SPECTRAL_LAB_THREADS")]
    threads: Option<usize>,

    /// Output directory; overrides the config's `out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment and write its reports.
    Run { config: PathBuf },
    /// Check the config and print it with defaults filled in.
    Validate { config: PathBuf },
}

enum Failure {
    Config(ConfigError),
    Lab(LabError),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(ConfigError::Read { .. }) | Failure::Io(_) => 2,
            Failure::Config(ConfigError::Parse { .. }) => 3,
            Failure::Config(ConfigError::Precondition(_)) => 4,
            Failure::Lab(LabError::NonContraction { .. } | LabError::Divergence(_) | LabError::Instability(_)) => 5,
            Failure::Lab(_) => 4,
        }
    }

    fn record(&self) -> serde_json::Value {
        match self {
            Failure::Config(ConfigError::Parse { message, line, column }) => {
                json!({ "error": "parse", "message": message, "line": line, "column": column })
            }
            Failure::Config(ConfigError::Read { path, message }) => {
                json!({ "error": "io", "message": message, "path": path })
            }
            Failure::Config(ConfigError::Precondition(m)) => json!({ "error": "precondition", "message": m }),
            Failure::Lab(e) => {
                let kind = if self.code() == 5 { "numerical" } else { "precondition" };
                json!({ "error": kind, "message": e.to_string() })
            }
            Failure::Io(m) => json!({ "error": "io", "message": m }),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    Ok(config::load(path)?.resolve()?)
}

fn list() {
    for k in Kind::ALL {
        println!("{:<22} dim {}  [{}] {}", k.name(), k.dim(), k.section(), k.keys());
    }
    println!("every config: experiment, seed, [grid] n, box_length (default 2 pi), optional out");
}

fn execute(cfg: &ExperimentConfig, out_flag: Option<PathBuf>, threads: usize) -> Result<(), Failure> {
    let out = out_flag.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let report = run::run(cfg).map_err(Failure::Lab)?;
    let stem = format!("{}-{}", cfg.experiment.name(), cfg.seed);
    let csv = out.join(format!("{stem}.csv"));
    let js = out.join(format!("{stem}.json"));
    std::fs::write(&csv, &report.csv)?;
    std::fs::write(&js, serde_json::to_string_pretty(&report.json).expect("json") + "\n")?;
    let manifest = json!({
        "tool": "spectral-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "threads": threads,
        "outputs": [csv.file_name().and_then(|s| s.to_str()), js.file_name().and_then(|s| s.to_str())],
        "started_unix": started,
        "wall_clock_seconds": clock.elapsed().as_secs_f64(),
    });
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("json") + "\n")?;
    println!("wrote {} and {}", csv.display(), js.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        list();
        return ExitCode::SUCCESS;
    }
    let threads = cli.threads.unwrap_or(0);
    if threads > 0 {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = match cli.command {
        Some(Command::Validate { config }) => load(&config).map(|cfg| {
            println!("ok");
            print!("{}", cfg.dump());
        }),
        Some(Command::Run { config }) => {
            load(&config).and_then(|cfg| execute(&cfg, cli.out, rayon::current_num_threads()))
        }
        None => {
            eprintln!("nothing to do: use `run <config>`, `validate <config>` or `--list`");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
