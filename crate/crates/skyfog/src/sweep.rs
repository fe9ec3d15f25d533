//! Parameter sweeps over paired seeds.
//!
//! Every policy at a grid point and seed runs over the same world
//! trajectory, so differences between rows isolate the policy.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use skyfog_core::engine::run_horizon_many;
use skyfog_core::scenario::{Interval, InvariantError};
use skyfog_core::{Policy, Scenario, ScenarioConfig};

use crate::report::SweepRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// E-UAV capacity, grid in GHz.
    EuavFreq,
    /// Task computation density, grid in cycles/bit; pins every task to that value.
    TaskDensity,
    /// Vehicle density, grid in vehicles/km^2.
    VehDensity,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::EuavFreq => "euav-freq",
            SweepParam::TaskDensity => "task-density",
            SweepParam::VehDensity => "veh-density",
        }
    }

    pub fn apply(&self, cfg: &mut ScenarioConfig, value: f64) {
        match self {
            SweepParam::EuavFreq => cfg.layout.euav_max_freq_hz = value * 1e9,
            SweepParam::TaskDensity => cfg.tasks.cycles_per_bit = Interval::point(value),
            SweepParam::VehDensity => cfg.mobility.vehicle_density_per_km2 = value,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euav-freq" => Ok(SweepParam::EuavFreq),
            "task-density" => Ok(SweepParam::TaskDensity),
            "veh-density" => Ok(SweepParam::VehDensity),
            other => {
                Err(format!("unknown sweep parameter `{other}` (expected euav-freq, task-density or veh-density)"))
            }
        }
    }
}

/// Results of every policy for one grid value and seed.
pub fn sweep_cell(
    base: &ScenarioConfig,
    param: SweepParam,
    value: f64,
    seed: u64,
    policies: &[Policy],
) -> Result<Vec<skyfog_core::RunResult>, InvariantError> {
    let mut cfg = base.clone();
    param.apply(&mut cfg, value);
    cfg.seed = seed;
    let scenario = Scenario::new(cfg)?;
    Ok(run_horizon_many(&scenario, policies))
}

/// Runs the full grid x seeds x policies cross product. Rows come out
/// ordered by grid value, then seed, then policy in the order given.
pub fn sweep(
    base: &ScenarioConfig,
    param: SweepParam,
    grid: &[f64],
    policies: &[Policy],
    seeds: &[u64],
) -> Result<Vec<SweepRow>, InvariantError> {
    let cells: Vec<(f64, u64)> = grid.iter().flat_map(|&v| seeds.iter().map(move |&s| (v, s))).collect();
    let results: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(value, seed)| {
            let runs = sweep_cell(base, param, value, seed, policies)?;
            Ok(runs
                .into_iter()
                .map(|r| SweepRow {
                    param_value: value,
                    policy: r.policy,
                    seed,
                    tsu: r.time_avg_system_utility,
                    avg_delay: r.avg_completion_delay_s,
                    energy: r.total_energy_j,
                })
                .collect())
        })
        .collect::<Result<_, InvariantError>>()?;
    Ok(results.into_iter().flatten().collect())
}
