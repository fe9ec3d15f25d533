//! Per-slot wall-time scaling in the number of C-UAVs.
//!
//! The area grows with the fleet, one grid cell per C-UAV on a square of
//! `ceil(sqrt(N))` cells per side, so vehicle density and the per-UAV
//! neighbourhood stay the same. Each slot's time is divided by the number of
//! game rounds it took, removing the iteration count from the scaling.

use std::time::Instant;

use skyfog_core::scenario::InvariantError;
use skyfog_core::{run_slot, Policy, Scenario, ScenarioConfig, World};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchPoint {
    pub cuavs: usize,
    pub slots: usize,
    /// Median over slots of wall seconds per game round.
    pub secs_per_round: f64,
    pub mean_rounds: f64,
}

pub fn scaled_config(base: &ScenarioConfig, cuavs: usize) -> ScenarioConfig {
    let mut cfg = base.clone();
    let per_side = (cuavs as f64).sqrt().ceil() as usize;
    cfg.layout.num_cuavs = cuavs;
    cfg.layout.area_side_m = per_side as f64 * cfg.layout.cell_side_m;
    cfg
}

pub fn bench_point(
    base: &ScenarioConfig,
    cuavs: usize,
    slots: usize,
    policy: Policy,
) -> Result<BenchPoint, InvariantError> {
    let mut world = World::new(Scenario::new(scaled_config(base, cuavs))?);
    let mut ratios = Vec::with_capacity(slots);
    let mut rounds_total = 0usize;
    for _ in 0..slots {
        let start = Instant::now();
        let out = run_slot(&world, policy);
        let secs = start.elapsed().as_secs_f64();
        let rounds = out.metrics.game_rounds.max(1);
        rounds_total += rounds;
        ratios.push(secs / rounds as f64);
        world.advance();
    }
    ratios.sort_by(f64::total_cmp);
    Ok(BenchPoint {
        cuavs,
        slots,
        secs_per_round: ratios[ratios.len() / 2],
        mean_rounds: rounds_total as f64 / slots as f64,
    })
}

pub fn bench(
    base: &ScenarioConfig,
    sizes: &[usize],
    slots: usize,
    policy: Policy,
) -> Result<Vec<BenchPoint>, InvariantError> {
    sizes.iter().map(|&n| bench_point(base, n, slots.max(1), policy)).collect()
}

/// Least-squares slope of `ln(secs_per_round)` against `ln(cuavs)`.
pub fn loglog_slope(points: &[BenchPoint]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.cuavs as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.secs_per_round.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
