use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skyfog::bench::{bench, loglog_slope};
use skyfog::config::load_config;
use skyfog::instances::game_instance;
use skyfog::report::{write_run, write_sweep};
use skyfog::sweep::{sweep, SweepParam};
use skyfog::verify::{run_suite, Suite};
use skyfog_core::game::poa_eval;
use skyfog_core::{run_horizon, Policy, Scenario, ScenarioConfig};

/// Joint task offloading and resource allocation simulator for UAV/vehicle edge networks.
#[derive(Parser)]
#[command(name = "skyfog", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one policy and write per-slot CSV with a summary row.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "mvtora")]
        policy: Policy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter over a grid for several policies and seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// euav-freq (GHz), task-density (cycles/bit) or veh-density (vehicles/km^2).
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "mvtora,elc,emc,vto,mto,todo")]
        policies: Vec<Policy>,
        /// Number of seeds, counted up from the base seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the solvers against slow reference oracles.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// Price of anarchy and its lower bound on small random games.
    Poa {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        players: usize,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-slot time per game round against fleet size.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35,40")]
        sizes: Vec<usize>,
        #[arg(long, default_value = "mvtora")]
        policy: Policy,
    },
}

/// Options shared by every command. Flags override the config file.
#[derive(Args)]
struct Common {
    /// Scenario file; defaults apply to anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    slots: Option<usize>,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl Common {
    fn resolve(&self) -> Result<ScenarioConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path).map_err(|e| Failure::Usage(e.to_string()))?,
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(slots) = self.slots {
            cfg.slots = slots;
        }
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Usage(format!("writing output: {e}"))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { common, policy, out } => {
            let scenario = Scenario::new(common.resolve()?).map_err(|e| Failure::Usage(e.to_string()))?;
            let run = run_horizon(&scenario, policy);
            write_run(output(out.as_deref())?, &run).map_err(csv_failure)
        }
        Command::Sweep { common, param, grid, policies, seeds, out } => {
            let cfg = common.resolve()?;
            let seed_list: Vec<u64> = (0..seeds.max(1)).map(|i| cfg.seed.wrapping_add(i)).collect();
            let rows = sweep(&cfg, param, &grid, &policies, &seed_list).map_err(|e| Failure::Usage(e.to_string()))?;
            write_sweep(output(out.as_deref())?, &rows).map_err(csv_failure)
        }
        Command::Verify { common, suite, trials } => {
            let report = run_suite(suite, &common.resolve()?, trials);
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification("verification failed".into()))
            }
        }
        Command::Poa { common, players, trials, out } => {
            let cfg = common.resolve()?;
            if players > skyfog_core::game::POA_MAX_PLAYERS {
                return Err(Failure::Usage(format!(
                    "--players {players} is above the enumeration limit of {}",
                    skyfog_core::game::POA_MAX_PLAYERS
                )));
            }
            let mut w = csv::Writer::from_writer(output(out.as_deref())?);
            w.write_record(["seed", "players", "equilibria", "poa", "lower_bound"]).map_err(csv_failure)?;
            let mut violations = Vec::new();
            for i in 0..trials {
                let seed = cfg.seed.wrapping_add(i);
                let r = poa_eval(&game_instance(seed, players, &cfg))
                    .map_err(|e| Failure::Verification(format!("seed {seed}: {e}")))?;
                if !(r.lower_bound <= r.poa && r.poa <= 1.0) {
                    violations.push(seed);
                }
                w.write_record([
                    seed.to_string(),
                    players.to_string(),
                    r.equilibria.to_string(),
                    r.poa.to_string(),
                    r.lower_bound.to_string(),
                ])
                .map_err(csv_failure)?;
            }
            w.flush().map_err(|e| Failure::Usage(e.to_string()))?;
            if violations.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verification(format!("bounds violated for seeds {violations:?}")))
            }
        }
        Command::Bench { common, sizes, policy } => {
            let mut cfg = common.resolve()?;
            if common.slots.is_none() {
                cfg.slots = 10;
            }
            if sizes.len() < 2 {
                return Err(Failure::Usage("--sizes needs at least two fleet sizes".into()));
            }
            let points = bench(&cfg, &sizes, cfg.slots, policy).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("cuavs,slots,secs_per_round,mean_rounds");
            for p in &points {
                println!("{},{},{},{}", p.cuavs, p.slots, p.secs_per_round, p.mean_rounds);
            }
            eprintln!("log-log slope of time per round against fleet size: {:.3}", loglog_slope(&points));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("skyfog: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("skyfog: {msg}");
            ExitCode::from(2)
        }
    }
}
