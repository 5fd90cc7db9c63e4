use alloc2mech::checks::Thresholds;
use alloc2mech::config::Config;
use alloc2mech::error::{exit, Error, Result};
use alloc2mech::io::summary_table;
use alloc2mech::scenarios::{self, RunOutput};
use alloc2mech::stats::Runner;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Truthful mechanisms from monotone allocation rules with a single call,
/// and a harness that checks their guarantees.
#[derive(Parser)]
#[command(name = "alloc2mech", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its reports into the output directory.
    Run {
        /// Scenario name; overrides `scenario` in the config file.
        scenario: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// List scenarios, their parameters and the result each exercises.
    List {
        /// Emit the catalog as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run the full acceptance suite (the `verify-all` scenario).
    VerifyAll {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed of all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials or bandit runs.
    #[arg(long)]
    trials: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Resampling probability.
    #[arg(long)]
    mu: Option<f64>,
    /// Extra `key=value` override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn config(&self, scenario: Option<&str>) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::new(),
        };
        for pair in &self.overrides {
            cfg.set_pair(pair)?;
        }
        if let Some(s) = scenario {
            cfg.set("scenario", s);
        }
        if let Some(v) = self.seed {
            cfg.set("seed", v.to_string());
        }
        if let Some(v) = self.trials {
            cfg.set("trials", v.to_string());
        }
        if let Some(v) = &self.out {
            cfg.set("out", v.to_string_lossy());
        }
        if let Some(v) = self.mu {
            cfg.set("mu", v.to_string());
        }
        if !cfg.contains("scenario") {
            return Err(Error::UnknownScenario(String::new()));
        }
        Ok(cfg)
    }
}

fn execute(mut cfg: Config) -> Result<bool> {
    let runner = Runner::from_env().map_err(Error::Config)?;
    let th = Thresholds::default();
    let out: RunOutput = scenarios::run(&mut cfg, &runner, &th)?;
    let dir = PathBuf::from(cfg.str("out")?);
    let title = format!(
        "alloc2mech {} (seed {})",
        cfg.str("scenario")?,
        cfg.str("seed")?
    );
    scenarios::write_outputs(&dir, &cfg, &title, &out)?;
    print!("{}", summary_table(&title, &out.reports, &out.notes));
    println!("outputs written to {}", dir.display());
    Ok(out.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { json } => {
            if json {
                print!("{}", scenarios::catalog_json());
            } else {
                print!("{}", scenarios::catalog_text());
            }
            Ok(true)
        }
        Command::Run { scenario, common } => common.config(scenario.as_deref()).and_then(execute),
        Command::VerifyAll { common } => common.config(Some("verify-all")).and_then(execute),
    };
    let code = match result {
        Ok(true) => exit::OK,
        Ok(false) => exit::CHECK_FAILED,
        Err(Error::UnknownScenario(s)) if s.is_empty() => {
            eprintln!(
                "error: no scenario given; pass one to `run` or set `scenario` in the config"
            );
            exit::USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
