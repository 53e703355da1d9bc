use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thermovar::config::parse_flat;
use thermovar::{init_thread_pool, run, write_report, ExperimentConfig, ExperimentId, Result};

/// Variational Gibbs state preparation experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ising chain, both ansatzes, over a beta grid.
    IsingSweep(Flags),
    /// Ising chain lengths 5 to 9.
    IsingScaling(Flags),
    /// XY chain over ansatz depths and betas.
    XySweep(Flags),
    /// XY chain with three ancillas over truncation orders.
    KOrderStudy(Flags),
    /// Loss landscape of the one-parameter ansatz.
    Prop1Check(Flags),
    /// Cat-state fidelity against its closed-form floor.
    Prop2Curve(Flags),
    /// Truncation and fidelity bounds over (K, r, beta, eps) grids.
    BoundsTable(Flags),
}

#[derive(Args)]
struct Flags {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Number of random restarts per grid point.
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated inverse temperatures.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Evaluate the loss exactly (the default).
    #[arg(long, conflicts_with = "shots")]
    exact: bool,
    /// Estimate the loss from this many shots per measured quantity.
    #[arg(long)]
    shots: Option<u64>,
    /// Iteration cap per training run.
    #[arg(long)]
    max_iters: Option<usize>,
}

impl Command {
    fn split(self) -> (ExperimentId, Flags) {
        match self {
            Command::IsingSweep(f) => (ExperimentId::IsingSweep, f),
            Command::IsingScaling(f) => (ExperimentId::IsingScaling, f),
            Command::XySweep(f) => (ExperimentId::XySweep, f),
            Command::KOrderStudy(f) => (ExperimentId::KOrderStudy, f),
            Command::Prop1Check(f) => (ExperimentId::Prop1Check, f),
            Command::Prop2Curve(f) => (ExperimentId::Prop2Curve, f),
            Command::BoundsTable(f) => (ExperimentId::BoundsTable, f),
        }
    }
}

fn resolve(id: ExperimentId, flags: &Flags) -> Result<ExperimentConfig> {
    let mut map = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| thermovar::CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_flat(&text)?
        }
        None => BTreeMap::new(),
    };
    // The subcommand names the experiment; a config file may not contradict it.
    if let Some(other) = map.get("experiment.id") {
        if other.parse::<ExperimentId>()? != id {
            return Err(thermovar::CliError::Config(format!(
                "config file is for '{other}', subcommand is '{id}'"
            )));
        }
    }
    map.insert("experiment.id".into(), id.to_string());
    if let Some(n) = flags.seeds {
        map.insert("train.restarts".into(), n.to_string());
    }
    if let Some(betas) = &flags.beta {
        let list = betas.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let key = if id == ExperimentId::BoundsTable {
            "bounds.beta"
        } else {
            "train.beta_list"
        };
        map.insert(key.into(), list);
    }
    if flags.exact {
        map.remove("loss.shots");
        map.insert("loss.mode".into(), "exact".into());
    }
    if let Some(shots) = flags.shots {
        map.insert("loss.shots".into(), shots.to_string());
    }
    if let Some(n) = flags.max_iters {
        map.insert("train.max_iters".into(), n.to_string());
    }
    ExperimentConfig::resolve(Some(id), &map)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (id, flags) = cli.command.split();
    let outcome = init_thread_pool().and_then(|()| {
        let cfg = resolve(id, &flags)?;
        let report = run(&cfg)?;
        let files = write_report(&flags.out, &report)?;
        Ok((report, files))
    });
    match outcome {
        Ok((report, files)) => {
            for path in files {
                println!("wrote {}", path.display());
            }
            for check in &report.checks {
                let status = if check.passed { "PASS" } else { "FAIL" };
                let tag = if check.paper { "" } else { " (informational)" };
                println!("{status} {}{tag}: {}", check.name, check.detail);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
