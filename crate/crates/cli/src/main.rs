use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kelab::RegionTag;
use kelab_cli::config::{ExperimentConfig, OUTPUT_DIR_ENV};
use kelab_cli::report::{run_suites, write_outputs};
use kelab_cli::suites::{self, SuiteOutput};
use kelab_cli::Result;

/// Numerical experiments on the gluing construction for nodal Kähler-Einstein surfaces.
#[derive(Debug, Parser)]
#[command(name = "kelab", version)]
struct Cli {
    /// TOML experiment config; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Where reports go.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ricci-flatness of Eguchi-Hanson and the E = (1 - e^f) + D + R split.
    VerifyIdentities,
    /// Decay rates of the gluing error and the Ricci potential.
    SweepDecay {
        /// Only sweep quantities supported in this region.
        #[arg(long)]
        region: Option<RegionTag>,
        /// Derivative order.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Newton solves of the Monge-Ampere equation with the gate constants.
    Solve {
        /// Replaces the sweep; repeat for several values.
        #[arg(long = "delta")]
        deltas: Vec<f64>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Gromov-Hausdorff bounds against the central fiber.
    Gh,
    /// Every suite listed in the config.
    Report,
    /// Maximum number of nodes for a degree; without --degree, checks the table.
    NodeBound {
        #[arg(long)]
        degree: Option<u32>,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn print(outputs: &[SuiteOutput]) {
    for out in outputs {
        for c in &out.checks {
            let tag = c.criterion.map(|n| format!("[{n}] ")).unwrap_or_default();
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            println!("{verdict} {}: {tag}{}  measured {:.6e}, target {}", out.suite.as_str(), c.name, c.measured, c.target);
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = load(cli)?;
    let outputs = match &cli.command {
        Command::VerifyIdentities => vec![suites::verify_identities(&cfg)?],
        Command::SweepDecay { region, k } => vec![suites::sweep_decay(&cfg, *region, *k)?],
        Command::Solve { deltas, beta } => {
            if !deltas.is_empty() {
                cfg.set_delta_sweep(deltas.clone())?;
            }
            if let Some(b) = beta {
                kelab::params::check_beta(*b)?;
                cfg.beta = *b;
            }
            vec![suites::solve(&cfg)?]
        }
        Command::Gh => vec![suites::gh(&cfg)?],
        Command::Report => run_suites(&cfg, &cfg.suites)?,
        Command::NodeBound { degree: Some(d) } => {
            println!("{}", kelab::node_bound(*d)?);
            return Ok(true);
        }
        Command::NodeBound { degree: None } => vec![suites::node_bounds(&cfg)?],
    };
    let files = write_outputs(&cfg.output_dir, &outputs)?;
    print(&outputs);
    eprintln!("wrote {} files to {}", files.len(), cfg.output_dir.display());
    Ok(outputs.iter().all(SuiteOutput::pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

