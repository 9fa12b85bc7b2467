#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a < b)` also rejects NaN

mod config;
mod error;
mod reconstruct;
mod repro;
mod scan;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xyinfo::chain::ChainSpecRaw;
use xyinfo::{Classification, RestStateKind};

use config::{Format, RunConfig};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "xyinfo", version, about = "Information transfer along open XY spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for report files (overrides output.dir).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Report format for scans and reproduction tables.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for grid evaluation; 0 uses every core, 1 runs sequentially.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan det A, rank, conditioning and perfect-transfer flags over a time grid.
    Scan {
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        chain: ChainOverrides,
        #[command(flatten)]
        time: TimeOverrides,
    },
    /// Compare computed transfer maps against the closed-form three- and four-site results.
    Repro {
        #[arg(value_enum)]
        case: repro::Case,
    },
    /// Simulate the three-channel polarization readout and invert it.
    Reconstruct {
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        chain: ChainOverrides,
        /// Measurement time t1 (units of 1/D).
        #[arg(long)]
        t1: Option<f64>,
        /// Gaussian noise amplitude on each polarization.
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Required classification; a mismatch exits with status 4.
        #[arg(long, value_parser = parse_classification)]
        expect: Option<Classification>,
    },
}

#[derive(Debug, Args)]
struct ChainOverrides {
    /// Number of sites.
    #[arg(long)]
    n: Option<usize>,
    /// Coupling constant D.
    #[arg(long)]
    coupling: Option<f64>,
    /// Thermal rest state at this inverse temperature.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Debug, Args)]
struct TimeOverrides {
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

fn parse_classification(s: &str) -> Result<Classification, String> {
    match s {
        "complete" => Ok(Classification::Complete),
        "partial" => Ok(Classification::Partial),
        "none" => Ok(Classification::None),
        other => Err(format!("expected complete, partial or none, got `{other}`")),
    }
}

fn load(path: &Option<PathBuf>) -> CliResult<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

impl ChainOverrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(n) = self.n {
            match cfg.chain.as_mut() {
                Some(raw) => raw.n = n,
                None => {
                    cfg.chain = Some(ChainSpecRaw {
                        n,
                        coupling: 1.0,
                        omegas: Vec::new(),
                        beta: None,
                        sender: None,
                        receiver: None,
                    })
                }
            }
        }
        if let (Some(d), Some(raw)) = (self.coupling, cfg.chain.as_mut()) {
            raw.coupling = d;
        }
        if let Some(beta) = self.beta {
            cfg.rest = Some(RestStateKind::Thermal { beta });
        }
    }
}

impl TimeOverrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(t) = self.t_min {
            cfg.time.t_min = t;
        }
        if let Some(t) = self.t_max {
            cfg.time.t_max = t;
        }
        if let Some(p) = self.points {
            cfg.time.points = p;
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let global = |cfg: &mut RunConfig| {
        if let Some(dir) = &cli.output_dir {
            cfg.output.dir = Some(dir.clone());
        }
        if let Some(f) = cli.format {
            cfg.output.format = Some(f);
        }
        if let Some(w) = cli.workers {
            cfg.output.workers = Some(w);
        }
    };
    match &cli.command {
        Command::Scan { config, chain, time } => {
            let mut cfg = load(config)?;
            chain.apply(&mut cfg);
            time.apply(&mut cfg);
            global(&mut cfg);
            scan::run(&cfg)
        }
        Command::Repro { case } => {
            let mut cfg = RunConfig::default();
            global(&mut cfg);
            repro::run(*case, &cfg, cli.output_dir.is_some())
        }
        Command::Reconstruct { config, chain, t1, sigma, seed, expect } => {
            let mut cfg = load(config)?;
            chain.apply(&mut cfg);
            global(&mut cfg);
            let m = &mut cfg.measurement;
            m.t1 = t1.or(m.t1);
            m.sigma = sigma.unwrap_or(m.sigma);
            m.seed = seed.unwrap_or(m.seed);
            m.expect = expect.or(m.expect);
            reconstruct::run(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("xyinfo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
