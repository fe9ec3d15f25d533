//! Slot-by-slot simulation: world state, the proposed scheme and the
//! baselines, and horizon-level aggregation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channel::{u2u_rate, u2v_rate};
use crate::cost::{local_outcome, FogLink, ModeOutcome};
use crate::game::{MecRule, Player, SlotGame};
use crate::mec::{bisect_allocate, MecDemand};
use crate::mobility::{place_vehicles, step_cuav, step_vehicle};
use crate::rng::Purpose;
use crate::scenario::{
    spawn_task, task_stream, Assignment, CUavState, Mode, OffloadProfile, ProfileLimits, Scenario, SlotMetrics,
    UavRecord, VehicleState,
};
use crate::vfc::{plan_vfc, plan_vfc_random, FogPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    /// Joint game over local, MEC and VFC with optimal MEC shares and GA division.
    Mvtora,
    Elc,
    Emc,
    Vto,
    Mto,
    Todo,
}

impl Policy {
    pub const ALL: [Policy; 6] = [Policy::Mvtora, Policy::Elc, Policy::Emc, Policy::Vto, Policy::Mto, Policy::Todo];

    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::Mvtora => "mvtora",
            Policy::Elc => "elc",
            Policy::Emc => "emc",
            Policy::Vto => "vto",
            Policy::Mto => "mto",
            Policy::Todo => "todo",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown policy `{0}` (expected one of mvtora, elc, emc, vto, mto, todo)")]
pub struct UnknownPolicy(pub String);

impl FromStr for Policy {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownPolicy(s.into()))
    }
}

/// Mutable state of the simulated area: vehicles, C-UAV positions and tasks.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub scenario: Scenario,
    pub vehicles: Vec<VehicleState>,
    pub cuavs: Vec<CUavState>,
    pub slot: usize,
}

impl World {
    /// Places vehicles and spawns the tasks of slot 0.
    pub fn new(scenario: Scenario) -> Self {
        let area = scenario.config.layout.area();
        let mut rng = scenario.seeds.stream(Purpose::Placement, 0, 0);
        let vehicles = place_vehicles(&area, &scenario.config.mobility, &mut rng);
        let cuavs = scenario.cuavs.clone();
        let mut w = Self { scenario, vehicles, cuavs, slot: 0 };
        w.spawn_tasks();
        w
    }

    /// Moves everything to the next slot and spawns its tasks.
    pub fn advance(&mut self) {
        self.slot += 1;
        let cfg = &self.scenario.config;
        let area = cfg.layout.area();
        let mut rng = self.scenario.seeds.stream(Purpose::Mobility, self.slot as u64, 0);
        for v in self.vehicles.iter_mut() {
            let mut next = step_vehicle(v, &cfg.mobility, &mut rng);
            next.position = area.wrap(next.position);
            next.idle_freq_hz = cfg.mobility.idle_freq_hz.sample(&mut rng);
            *v = next;
        }
        let (dt, h) = (cfg.mobility.slot_duration_s, cfg.layout.cuav_altitude_m);
        for c in self.cuavs.iter_mut() {
            *c = step_cuav(c, self.slot, dt, h);
        }
        self.spawn_tasks();
    }

    fn spawn_tasks(&mut self) {
        let seeds = self.scenario.seeds;
        let ranges = self.scenario.config.tasks;
        for c in self.cuavs.iter_mut() {
            let mut rng = task_stream(&seeds, self.slot, c.id);
            c.current_task = spawn_task(c, &ranges, &mut rng);
        }
    }

    /// In-range vehicles of a C-UAV, skipping those already claimed.
    pub fn fog_candidates(&self, cuav: &CUavState, claimed: &[usize]) -> Vec<FogLink> {
        let ch = &self.scenario.config.channel;
        self.vehicles
            .iter()
            .filter(|v| !claimed.contains(&v.id))
            .filter_map(|v| {
                u2v_rate(&cuav.position, &v.position, ch).ok().map(|rate| FogLink {
                    vehicle: v.id,
                    rate_bps: rate,
                    freq_hz: v.idle_freq_hz,
                    tx_power_w: ch.tx_power_u2v_w,
                })
            })
            .collect()
    }

    pub fn mec_demand(&self, cuav: &CUavState) -> Option<MecDemand> {
        let task = cuav.current_task?;
        let ch = &self.scenario.config.channel;
        Some(MecDemand {
            cuav: cuav.id,
            task,
            rate_bps: u2u_rate(&cuav.position, &self.scenario.euav.position, cuav.subchannels, ch),
            tx_power_w: ch.tx_power_u2u_w,
        })
    }

    pub fn limits(&self) -> ProfileLimits {
        ProfileLimits {
            mec_capacity_hz: self.scenario.euav.max_freq_hz,
            subchannels: self.scenario.config.layout.subchannels,
        }
    }
}

/// Everything a policy decided and achieved in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub metrics: SlotMetrics,
    pub profile: OffloadProfile,
    /// Whether the offloading game hit its round cap.
    pub game_capped: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VfcStyle {
    None,
    Optimized,
    Random,
}

#[derive(Clone)]
struct Prepared {
    players: Vec<Player>,
    plans: Vec<Option<FogPlan>>,
}

fn prepare(world: &World, style: VfcStyle) -> Prepared {
    let cfg = &world.scenario.config;
    let mut players = Vec::new();
    let mut plans = Vec::new();
    let mut claimed: Vec<usize> = Vec::new();
    for c in world.cuavs.iter() {
        let Some(task) = c.current_task else { continue };
        let local = local_outcome(&task, c.local_freq_hz, &cfg.utility);
        let plan = match style {
            VfcStyle::None => None,
            VfcStyle::Optimized | VfcStyle::Random => {
                let candidates = world.fog_candidates(c, &claimed);
                let mut rng = world.scenario.seeds.stream(Purpose::Policy, world.slot as u64, c.id as u64);
                let plan = match style {
                    VfcStyle::Optimized => plan_vfc(&task, &candidates, c.subchannels, &cfg.ga, &cfg.utility, &mut rng),
                    _ => plan_vfc_random(&task, &candidates, c.subchannels, &cfg.utility, &mut rng),
                };
                plan.ok()
            }
        };
        if let Some(p) = &plan {
            claimed.extend(p.links.iter().map(|l| l.vehicle));
        }
        let veh = plan.as_ref().map_or_else(ModeOutcome::infeasible, |p| p.outcome);
        let mec = world.mec_demand(c).expect("task present");
        players.push(Player { cuav: c.id, local, veh, mec, initial: Player::best_fixed_mode(&local, &veh) });
        plans.push(plan);
    }
    Prepared { players, plans }
}

fn make_game(world: &World, players: Vec<Player>, rule: MecRule) -> SlotGame {
    SlotGame {
        players,
        capacity_hz: world.scenario.euav.max_freq_hz,
        rel_tol: world.scenario.config.bisection_tol,
        rule,
        utility: world.scenario.config.utility,
    }
}

/// Turns final modes into the profile and per-task records.
fn settle(
    world: &World,
    game: &SlotGame,
    plans: &[Option<FogPlan>],
    modes: &[Mode],
    rounds: usize,
    game_capped: bool,
) -> SlotOutcome {
    let eval = game.evaluate(modes);
    let mut assignments = Vec::with_capacity(modes.len());
    let mut records = Vec::with_capacity(modes.len());
    let mut dropped_count = 0;
    let mut system_utility = 0.0;
    for (i, (p, &mode)) in game.players.iter().zip(modes).enumerate() {
        let o = eval.outcomes[i];
        let deadline = p.mec.task.deadline_s;
        let assignment = match mode {
            Mode::Local => Some(Assignment::local(p.cuav)),
            Mode::Mec => eval.allocation.as_ref().and_then(|a| a.share_of(p.cuav)).map(|f| Assignment {
                cuav: p.cuav,
                mode,
                mec_freq_hz: Some(f),
                fog_set: Vec::new(),
                division: Vec::new(),
            }),
            Mode::Veh => plans[i].as_ref().map(|plan| Assignment {
                cuav: p.cuav,
                mode,
                mec_freq_hz: None,
                fog_set: plan.vehicles(),
                division: plan.division.clone(),
            }),
        };
        assignments.extend(assignment);
        let record = if o.feasible {
            system_utility += o.utility;
            UavRecord {
                cuav: p.cuav,
                mode,
                dropped: false,
                utility: o.utility,
                delay_s: o.delay_s,
                energy_j: o.energy_j,
            }
        } else {
            dropped_count += 1;
            UavRecord { cuav: p.cuav, mode, dropped: true, utility: 0.0, delay_s: deadline, energy_j: 0.0 }
        };
        records.push(record);
    }
    let profile = OffloadProfile { assignments };
    debug_assert_eq!(profile.validate(&world.limits()), Ok(()));
    SlotOutcome {
        metrics: SlotMetrics { slot: world.slot, system_utility, records, dropped_count, game_rounds: rounds },
        profile,
        game_capped,
    }
}

fn play(world: &World, game: SlotGame, plans: &[Option<FogPlan>]) -> SlotOutcome {
    if game.is_empty() {
        return settle(world, &game, plans, &[], 0, false);
    }
    match game.run() {
        Ok(out) => settle(world, &game, plans, &out.profile, out.rounds, false),
        Err(_) => {
            let start = game.initial_profile();
            settle(world, &game, plans, &start, game.round_cap(), true)
        }
    }
}

/// Per-slot inputs shared by every policy that needs them, so paired runs
/// over one world compute each VFC plan once.
struct SlotInputs<'w> {
    world: &'w World,
    plain: Option<Prepared>,
    optimized: Option<Prepared>,
    random: Option<Prepared>,
}

impl<'w> SlotInputs<'w> {
    fn new(world: &'w World) -> Self {
        Self { world, plain: None, optimized: None, random: None }
    }

    fn get(&mut self, style: VfcStyle) -> Prepared {
        let world = self.world;
        let slot = match style {
            VfcStyle::None => &mut self.plain,
            VfcStyle::Optimized => &mut self.optimized,
            VfcStyle::Random => &mut self.random,
        };
        slot.get_or_insert_with(|| prepare(world, style)).clone()
    }

    fn decide(&mut self, policy: Policy) -> SlotOutcome {
        let world = self.world;
        match policy {
            Policy::Mvtora => {
                let prep = self.get(VfcStyle::Optimized);
                play(world, make_game(world, prep.players, MecRule::Optimal), &prep.plans)
            }
            Policy::Mto => {
                let mut prep = self.get(VfcStyle::None);
                for p in prep.players.iter_mut() {
                    p.initial = Mode::Local;
                }
                play(world, make_game(world, prep.players, MecRule::Optimal), &prep.plans)
            }
            Policy::Todo => {
                let prep = self.get(VfcStyle::Random);
                play(world, make_game(world, prep.players, MecRule::Even), &prep.plans)
            }
            Policy::Elc | Policy::Vto | Policy::Emc => {
                let prep = self.get(if policy == Policy::Vto { VfcStyle::Optimized } else { VfcStyle::None });
                let modes: Vec<Mode> = match policy {
                    Policy::Elc => alloc::vec![Mode::Local; prep.players.len()],
                    Policy::Emc => alloc::vec![Mode::Mec; prep.players.len()],
                    _ => prep.players.iter().map(|p| p.initial).collect(),
                };
                let game = make_game(world, prep.players, MecRule::Optimal);
                settle(world, &game, &prep.plans, &modes, 0, false)
            }
        }
    }
}

/// Decides and executes all tasks of the world's current slot under `policy`.
pub fn run_slot(world: &World, policy: Policy) -> SlotOutcome {
    SlotInputs::new(world).decide(policy)
}

/// As [`run_slot`] for several policies on the same slot state.
pub fn run_slot_many(world: &World, policies: &[Policy]) -> Vec<SlotOutcome> {
    let mut inputs = SlotInputs::new(world);
    policies.iter().map(|&p| inputs.decide(p)).collect()
}

/// The offloading game a game-based policy plays in the current slot.
pub fn slot_game(world: &World, policy: Policy) -> Option<SlotGame> {
    let mut inputs = SlotInputs::new(world);
    let (style, rule) = match policy {
        Policy::Mvtora => (VfcStyle::Optimized, MecRule::Optimal),
        Policy::Mto => (VfcStyle::None, MecRule::Optimal),
        Policy::Todo => (VfcStyle::Random, MecRule::Even),
        _ => return None,
    };
    let mut prep = inputs.get(style);
    if policy == Policy::Mto {
        for p in prep.players.iter_mut() {
            p.initial = Mode::Local;
        }
    }
    Some(make_game(world, prep.players, rule))
}

/// Per-slot metrics and their horizon aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub policy: Policy,
    pub slots: Vec<SlotMetrics>,
    pub time_avg_system_utility: f64,
    /// Mean delay over every task of the horizon; dropped tasks count at their deadline.
    pub avg_completion_delay_s: f64,
    pub total_energy_j: f64,
    pub drops: usize,
    pub capped_games: usize,
}

impl RunResult {
    pub fn task_count(&self) -> usize {
        self.slots.iter().map(|s| s.task_count()).sum()
    }
}

struct Accumulator {
    policy: Policy,
    slots: Vec<SlotMetrics>,
    utility_sum: f64,
    delay_sum: f64,
    tasks: usize,
    energy: f64,
    drops: usize,
    capped: usize,
}

impl Accumulator {
    fn new(policy: Policy, horizon: usize) -> Self {
        Self {
            policy,
            slots: Vec::with_capacity(horizon),
            utility_sum: 0.0,
            delay_sum: 0.0,
            tasks: 0,
            energy: 0.0,
            drops: 0,
            capped: 0,
        }
    }

    fn push(&mut self, out: SlotOutcome) {
        let m = out.metrics;
        self.utility_sum += m.system_utility;
        self.delay_sum += m.total_delay_s();
        self.tasks += m.task_count();
        self.energy += m.total_energy_j();
        self.drops += m.dropped_count;
        self.capped += usize::from(out.game_capped);
        self.slots.push(m);
    }

    fn finish(self) -> RunResult {
        let horizon = self.slots.len().max(1);
        RunResult {
            policy: self.policy,
            time_avg_system_utility: self.utility_sum / horizon as f64,
            avg_completion_delay_s: if self.tasks == 0 { 0.0 } else { self.delay_sum / self.tasks as f64 },
            total_energy_j: self.energy,
            drops: self.drops,
            capped_games: self.capped,
            slots: self.slots,
        }
    }
}

/// Runs `policy` for the configured number of slots from a fresh world.
pub fn run_horizon(scenario: &Scenario, policy: Policy) -> RunResult {
    run_horizon_with(scenario, policy, |_| {})
}

/// As [`run_horizon`], handing every slot outcome to `inspect` as it is produced.
pub fn run_horizon_with(scenario: &Scenario, policy: Policy, mut inspect: impl FnMut(&SlotOutcome)) -> RunResult {
    let horizon = scenario.config.slots;
    let mut world = World::new(scenario.clone());
    let mut acc = Accumulator::new(policy, horizon);
    for t in 0..horizon {
        if t > 0 {
            world.advance();
        }
        let out = run_slot(&world, policy);
        inspect(&out);
        acc.push(out);
    }
    acc.finish()
}

/// Runs several policies over one shared world trajectory. Each result is
/// identical to what [`run_horizon`] returns for that policy alone.
pub fn run_horizon_many(scenario: &Scenario, policies: &[Policy]) -> Vec<RunResult> {
    let horizon = scenario.config.slots;
    let mut world = World::new(scenario.clone());
    let mut accs: Vec<Accumulator> = policies.iter().map(|&p| Accumulator::new(p, horizon)).collect();
    for t in 0..horizon {
        if t > 0 {
            world.advance();
        }
        for (acc, out) in accs.iter_mut().zip(run_slot_many(&world, policies)) {
            acc.push(out);
        }
    }
    accs.into_iter().map(Accumulator::finish).collect()
}

/// Total E-UAV cycles EMC hands out this slot, or zero when the set cannot be served.
pub fn emc_allocated_hz(world: &World) -> f64 {
    let demands: Vec<MecDemand> = world.cuavs.iter().filter_map(|c| world.mec_demand(c)).collect();
    let cfg = &world.scenario.config;
    bisect_allocate(&demands, world.scenario.euav.max_freq_hz, cfg.bisection_tol, &cfg.utility)
        .map(|a| a.total_hz)
        .unwrap_or(0.0)
}
