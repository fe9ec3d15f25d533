//! Random solver instances for the verification suites.
//!
//! Each generator takes one seed and reads from its own harness stream, so a
//! failing instance can be rebuilt from the seed printed in a report.

use rand::Rng;
use skyfog_core::cost::{local_outcome, FogLink};
use skyfog_core::game::{MecRule, Player, SlotGame};
use skyfog_core::mec::MecDemand;
use skyfog_core::rng::{Purpose, SeedTree, StreamRng};
use skyfog_core::scenario::UtilityParams;
use skyfog_core::vfc::plan_vfc;
use skyfog_core::{ScenarioConfig, Task};

const MEC_STREAM: u64 = 1;
const FOG_STREAM: u64 = 2;
const DIVISION_STREAM: u64 = 3;
const GAME_STREAM: u64 = 4;

fn stream(seed: u64, kind: u64) -> StreamRng {
    SeedTree::new(seed).stream(Purpose::Harness, kind, 0)
}

fn random_task(rng: &mut StreamRng) -> Task {
    Task {
        data_bits: rng.random_range(1e6..3e6),
        cycles_per_bit: rng.random_range(100.0..1000.0),
        deadline_s: rng.random_range(0.5..1.0),
    }
}

fn random_link(vehicle: usize, rng: &mut StreamRng) -> FogLink {
    FogLink { vehicle, rate_bps: rng.random_range(1e6..1e7), freq_hz: rng.random_range(2e8..1e9), tx_power_w: 0.1 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MecInstance {
    pub demands: Vec<MecDemand>,
    pub capacity_hz: f64,
}

/// Up to five offloaders. Draws are repeated until the capacity covers the
/// offloaders' log floors, so every instance has an interior optimum.
pub fn mec_instance(seed: u64, up: &UtilityParams) -> MecInstance {
    let mut rng = stream(seed, MEC_STREAM);
    loop {
        let n = rng.random_range(1..=5);
        let demands: Vec<MecDemand> = (0..n)
            .map(|cuav| MecDemand {
                cuav,
                task: random_task(&mut rng),
                rate_bps: rng.random_range(2e6..2e7),
                tx_power_w: 0.1,
            })
            .collect();
        let capacity_hz = rng.random_range(2e9..40e9);
        let floors: f64 = demands.iter().map(|d| d.log_floor_hz(up)).sum();
        if demands.iter().all(|d| d.headroom_s(up) > 0.0) && floors < capacity_hz {
            return MecInstance { demands, capacity_hz };
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FogInstance {
    pub task: Task,
    pub candidates: Vec<FogLink>,
    pub max_nodes: usize,
}

/// Eight candidate vehicles, three subchannels.
pub fn fog_instance(seed: u64) -> FogInstance {
    let mut rng = stream(seed, FOG_STREAM);
    let task = random_task(&mut rng);
    let candidates = (0..8).map(|v| random_link(v, &mut rng)).collect();
    FogInstance { task, candidates, max_nodes: 3 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisionInstance {
    pub task: Task,
    pub links: Vec<FogLink>,
}

/// One to three fog links to divide a task over.
pub fn division_instance(seed: u64) -> DivisionInstance {
    let mut rng = stream(seed, DIVISION_STREAM);
    let task = random_task(&mut rng);
    let k = rng.random_range(1..=3);
    let links = (0..k).map(|v| random_link(v, &mut rng)).collect();
    DivisionInstance { task, links }
}

/// An `n`-player game whose local and VFC outcomes are both feasible, so
/// every welfare sum is finite. VFC outcomes come from the real selection
/// and GA pipeline over four private candidates per player.
pub fn game_instance(seed: u64, n: usize, cfg: &ScenarioConfig) -> SlotGame {
    let up = cfg.utility;
    let mut rng = stream(seed, GAME_STREAM);
    let players = (0..n)
        .map(|cuav| loop {
            let task = random_task(&mut rng);
            let local = local_outcome(&task, rng.random_range(1e9..2e9), &up);
            let candidates: Vec<FogLink> = (0..4).map(|v| random_link(4 * cuav + v, &mut rng)).collect();
            let Ok(plan) = plan_vfc(&task, &candidates, cfg.layout.subchannels, &cfg.ga, &up, &mut rng) else {
                continue;
            };
            let veh = plan.outcome;
            let mec = MecDemand { cuav, task, rate_bps: rng.random_range(4e6..2e7), tx_power_w: 0.1 };
            if local.feasible && veh.feasible {
                break Player { cuav, local, veh, mec, initial: Player::best_fixed_mode(&local, &veh) };
            }
        })
        .collect();
    SlotGame {
        players,
        capacity_hz: cfg.layout.euav_max_freq_hz,
        rel_tol: cfg.bisection_tol,
        rule: MecRule::Optimal,
        utility: up,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let up = UtilityParams::default();
        assert_eq!(mec_instance(5, &up), mec_instance(5, &up));
        assert_ne!(mec_instance(5, &up), mec_instance(6, &up));
        assert_eq!(fog_instance(9), fog_instance(9));
        assert_eq!(division_instance(2), division_instance(2));
        let cfg = ScenarioConfig::default();
        assert_eq!(game_instance(3, 3, &cfg), game_instance(3, 3, &cfg));
    }

    #[test]
    fn shapes() {
        let up = UtilityParams::default();
        for seed in 0..50 {
            let m = mec_instance(seed, &up);
            assert!((1..=5).contains(&m.demands.len()));
            let d = division_instance(seed);
            assert!((1..=3).contains(&d.links.len()));
        }
        assert_eq!(fog_instance(0).candidates.len(), 8);
    }
}
