//! Domain types, scenario configuration and the offloading-profile validator.
//!
//! All quantities are linear SI: bits, cycles, hertz, watts, seconds, metres.
//! Unit conversion from the human-facing scenario file (GHz, dBm, Mb, ...)
//! happens once, when the file is loaded.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand::Rng;
use thiserror::Error;

use crate::geometry::{Rect, Vec3};
use crate::rng::{Purpose, SeedTree, StreamRng};

/// Closed interval used for uniformly drawn attributes. `lo == hi` pins the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.lo + (self.hi - self.lo) * u
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_ordered(&self) -> bool {
        self.lo <= self.hi
    }
}

/// One computing job generated by a C-UAV at the start of a slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Task {
    pub data_bits: f64,
    pub cycles_per_bit: f64,
    pub deadline_s: f64,
}

impl Task {
    /// Total CPU cycles needed to run the whole task.
    pub fn cycles(&self) -> f64 {
        self.data_bits * self.cycles_per_bit
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub id: usize,
    pub position: Vec3,
    pub speed_mps: f64,
    pub heading_rad: f64,
    pub idle_freq_hz: f64,
}

/// Circular pre-set trajectory of a C-UAV around the centre of its grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit {
    pub center: Vec3,
    pub radius_m: f64,
    pub speed_mps: f64,
    pub phase_rad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CUavState {
    pub id: usize,
    pub position: Vec3,
    pub speed_mps: f64,
    pub heading_rad: f64,
    pub task_prob: f64,
    pub local_freq_hz: f64,
    pub subchannels: usize,
    pub orbit: Orbit,
    pub current_task: Option<Task>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EUavState {
    pub position: Vec3,
    pub max_freq_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub bandwidth_hz: f64,
    /// Half-power half beamwidth Ψ in radians.
    pub beamwidth_half_rad: f64,
    pub main_lobe_gain: f64,
    pub out_of_beam_gain: f64,
    pub ref_gain_u2v: f64,
    pub ref_gain_u2u: f64,
    pub nlos_factor: f64,
    pub pathloss_exp: f64,
    pub los_a: f64,
    pub los_b: f64,
    pub noise_psd_w_per_hz: f64,
    pub tx_power_u2v_w: f64,
    pub tx_power_u2u_w: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            bandwidth_hz: 200.0e3,
            beamwidth_half_rad: PI / 4.0,
            main_lobe_gain: 2.2846,
            out_of_beam_gain: 0.0,
            ref_gain_u2v: 1.42e-4,
            ref_gain_u2u: 1.42e-4,
            nlos_factor: 0.2,
            pathloss_exp: 2.3,
            los_a: 10.0,
            los_b: 0.6,
            noise_psd_w_per_hz: dbm_to_watts(-174.0),
            tx_power_u2v_w: dbm_to_watts(20.0),
            tx_power_u2u_w: dbm_to_watts(20.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams {
    pub delay_weight: f64,
    pub energy_weight: f64,
    /// Positive constant inside the revenue logarithm.
    pub log_offset: f64,
    pub mec_price_per_hz: f64,
    pub switched_capacitance: f64,
}

impl Default for UtilityParams {
    fn default() -> Self {
        Self {
            delay_weight: 0.9,
            energy_weight: 0.1,
            log_offset: 1.0,
            // 0.001 $/GHz
            mec_price_per_hz: 1.0e-12,
            switched_capacitance: 1.0e-28,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    pub memory_degree: f64,
    pub mean_speed_mps: f64,
    pub speed_std: f64,
    pub mean_heading_rad: f64,
    pub heading_std: f64,
    pub speed_bounds: Interval,
    pub heading_bounds: Interval,
    pub vehicle_density_per_km2: f64,
    pub slot_duration_s: f64,
    pub idle_freq_hz: Interval,
}

impl Default for MobilityParams {
    fn default() -> Self {
        Self {
            memory_degree: 0.8,
            mean_speed_mps: 10.0,
            speed_std: 2.0,
            mean_heading_rad: 0.0,
            heading_std: PI / 4.0,
            speed_bounds: Interval::new(0.0, 20.0),
            heading_bounds: Interval::new(-PI, PI),
            vehicle_density_per_km2: 200.0,
            slot_duration_s: 1.0,
            idle_freq_hz: Interval::new(0.0, 1.0e9),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaParams {
    pub generations: usize,
    pub population: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self { generations: 200, population: 50, crossover_prob: 0.8, mutation_prob: 0.1 }
    }
}

/// Ranges the per-slot task attributes are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskRanges {
    pub data_bits: Interval,
    pub cycles_per_bit: Interval,
    pub deadline_s: Interval,
}

impl Default for TaskRanges {
    fn default() -> Self {
        Self {
            data_bits: Interval::new(1.0e6, 3.0e6),
            cycles_per_bit: Interval::new(100.0, 1000.0),
            deadline_s: Interval::new(0.5, 1.0),
        }
    }
}

/// Geometry of the area and the C-UAV fleet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutParams {
    pub area_side_m: f64,
    pub cell_side_m: f64,
    pub num_cuavs: usize,
    pub cuav_altitude_m: f64,
    pub cuav_speed_mps: f64,
    pub orbit_radius_m: f64,
    pub cuav_freq_hz: Interval,
    pub task_prob: Interval,
    pub subchannels: usize,
    pub euav_altitude_m: f64,
    pub euav_max_freq_hz: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            area_side_m: 2000.0,
            cell_side_m: 400.0,
            num_cuavs: 15,
            cuav_altitude_m: 100.0,
            cuav_speed_mps: 20.0,
            orbit_radius_m: 100.0,
            cuav_freq_hz: Interval::new(1.0e9, 2.0e9),
            task_prob: Interval::new(0.8, 1.0),
            subchannels: 5,
            euav_altitude_m: 300.0,
            euav_max_freq_hz: 30.0e9,
        }
    }
}

impl LayoutParams {
    pub fn area(&self) -> Rect {
        Rect::centered_square(self.area_side_m)
    }

    pub fn cells_per_side(&self) -> usize {
        libm::floor(self.area_side_m / self.cell_side_m + 1e-9) as usize
    }
}

/// Fully specified, unit-converted scenario parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub slots: usize,
    pub layout: LayoutParams,
    pub tasks: TaskRanges,
    pub channel: ChannelParams,
    pub utility: UtilityParams,
    pub mobility: MobilityParams,
    pub ga: GaParams,
    /// Relative tolerance on the MEC price multiplier bracket.
    pub bisection_tol: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            slots: 100,
            layout: LayoutParams::default(),
            tasks: TaskRanges::default(),
            channel: ChannelParams::default(),
            utility: UtilityParams::default(),
            mobility: MobilityParams::default(),
            ga: GaParams::default(),
            bisection_tol: 1.0e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {reason}")]
pub struct InvariantError {
    pub field: &'static str,
    pub reason: String,
}

fn check(ok: bool, field: &'static str, reason: &str) -> Result<(), InvariantError> {
    if ok {
        Ok(())
    } else {
        Err(InvariantError { field, reason: reason.to_string() })
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

fn positive_interval(i: Interval) -> bool {
    i.is_ordered() && positive(i.lo) && i.hi.is_finite()
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), InvariantError> {
        let l = &self.layout;
        check(positive(l.area_side_m), "area.side_m", "must be positive")?;
        check(
            positive(l.cell_side_m) && l.cell_side_m <= l.area_side_m,
            "area.cell_side_m",
            "must be positive and fit in the area",
        )?;
        check(l.num_cuavs >= 1, "area.num_cuavs", "need at least one C-UAV")?;
        let cells = l.cells_per_side() * l.cells_per_side();
        check(l.num_cuavs <= cells, "area.num_cuavs", "more C-UAVs than grid cells")?;
        check(positive(l.cuav_altitude_m), "cuav.H", "must be positive")?;
        check(positive(l.cuav_speed_mps), "cuav.speed", "must be positive")?;
        check(positive(l.orbit_radius_m), "cuav.radius", "must be positive")?;
        check(positive_interval(l.cuav_freq_hz), "cuav.f_uav", "must be a positive ordered range")?;
        check(
            l.task_prob.is_ordered() && l.task_prob.lo >= 0.0 && l.task_prob.hi <= 1.0,
            "cuav.rho",
            "task probability must lie in [0, 1]",
        )?;
        check(l.subchannels >= 1, "cuav.K_n", "need at least one subchannel")?;
        check(positive(l.euav_altitude_m), "euav.H_u", "must be positive")?;
        check(positive(l.euav_max_freq_hz), "euav.F_u_max", "must be positive")?;

        let t = &self.tasks;
        check(positive_interval(t.data_bits), "task.D_n", "must be a positive ordered range")?;
        check(positive_interval(t.cycles_per_bit), "task.eta_n", "must be a positive ordered range")?;
        check(positive_interval(t.deadline_s), "task.T_max", "must be a positive ordered range")?;
        check(
            t.deadline_s.hi <= self.mobility.slot_duration_s,
            "task.T_max",
            "deadline must not exceed the slot duration",
        )?;

        let c = &self.channel;
        check(
            c.beamwidth_half_rad > 0.0 && c.beamwidth_half_rad < PI / 2.0,
            "channel.Psi",
            "half beamwidth must lie in (0, pi/2)",
        )?;
        check(c.nlos_factor > 0.0 && c.nlos_factor < 1.0, "channel.kappa", "must lie in (0, 1)")?;
        check(c.out_of_beam_gain == 0.0, "channel.g", "out-of-beam gain is fixed at 0")?;
        for (ok, field) in [
            (positive(c.bandwidth_hz), "channel.B"),
            (positive(c.main_lobe_gain), "channel.G0"),
            (positive(c.ref_gain_u2v), "channel.beta_0"),
            (positive(c.ref_gain_u2u), "channel.beta_0_u2u"),
            (positive(c.pathloss_exp), "channel.mu"),
            (positive(c.los_a), "channel.a"),
            (positive(c.los_b), "channel.b"),
            (positive(c.noise_psd_w_per_hz), "channel.sigma2"),
            (positive(c.tx_power_u2v_w), "channel.P_nm"),
            (positive(c.tx_power_u2u_w), "channel.P_nu"),
        ] {
            check(ok, field, "must be positive")?;
        }

        let u = &self.utility;
        check(u.delay_weight >= 0.0 && u.energy_weight >= 0.0, "utility.alpha_n", "weights must be nonnegative")?;
        check(
            libm::fabs(u.delay_weight + u.energy_weight - 1.0) <= 1e-9,
            "utility.alpha_n",
            "delay_weight + energy_weight \u{2260} 1",
        )?;
        check(positive(u.log_offset), "utility.beta", "log offset must be positive")?;
        check(u.mec_price_per_hz >= 0.0 && u.mec_price_per_hz.is_finite(), "utility.rho_0", "must be nonnegative")?;
        check(u.switched_capacitance >= 0.0, "utility.k", "must be nonnegative")?;

        let m = &self.mobility;
        check((0.0..=1.0).contains(&m.memory_degree), "mobility.alpha", "memory degree must lie in [0, 1]")?;
        check(m.speed_std >= 0.0, "mobility.sigma_v", "must be nonnegative")?;
        check(m.heading_std >= 0.0, "mobility.sigma_d", "must be nonnegative")?;
        check(m.speed_bounds.is_ordered(), "mobility.speed_bounds", "bounds must be ordered")?;
        check(m.heading_bounds.is_ordered(), "mobility.heading_bounds", "bounds must be ordered")?;
        check(positive(m.vehicle_density_per_km2), "mobility.rho_v", "density must be positive")?;
        check(positive(m.slot_duration_s), "mobility.delta_t", "must be positive")?;
        check(
            m.idle_freq_hz.is_ordered() && m.idle_freq_hz.lo >= 0.0,
            "mobility.f_veh",
            "must be a nonnegative ordered range",
        )?;

        check(self.ga.generations >= 1, "ga.G", "need at least one generation")?;
        check(self.ga.population >= 2, "ga.L", "population must be at least 2")?;
        check((0.0..=1.0).contains(&self.ga.crossover_prob), "ga.pc", "must lie in [0, 1]")?;
        check((0.0..=1.0).contains(&self.ga.mutation_prob), "ga.pm", "must lie in [0, 1]")?;
        check(positive(self.bisection_tol), "solver.epsilon", "must be positive")?;
        check(self.slots >= 1, "slots", "horizon must be at least one slot")?;

        // Coverage discs of adjacent C-UAVs must not overlap.
        let reach = l.orbit_radius_m + l.cuav_altitude_m * libm::tan(c.beamwidth_half_rad);
        check(
            reach <= l.cell_side_m / 2.0 + 1e-9,
            "cuav.radius",
            "orbit radius plus coverage radius exceeds half a grid cell",
        )?;
        Ok(())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// A validated configuration with its fixed per-run layout materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub cuavs: Vec<CUavState>,
    pub euav: EUavState,
    pub seeds: SeedTree,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self, InvariantError> {
        config.validate()?;
        let seeds = SeedTree::new(config.seed);
        let l = &config.layout;
        let mut rng = seeds.stream(Purpose::Layout, 0, 0);

        let per_side = l.cells_per_side();
        let area = l.area();
        let mut cells: Vec<usize> = (0..per_side * per_side).collect();
        // Partial Fisher-Yates: the first num_cuavs entries are a uniform draw.
        for i in 0..l.num_cuavs {
            let j = rng.random_range(i..cells.len());
            cells.swap(i, j);
        }

        let cuavs = cells[..l.num_cuavs]
            .iter()
            .enumerate()
            .map(|(id, &cell)| {
                let (cx, cy) = (cell % per_side, cell / per_side);
                let center = Vec3::new(
                    area.min_x + (cx as f64 + 0.5) * l.cell_side_m,
                    area.min_y + (cy as f64 + 0.5) * l.cell_side_m,
                    0.0,
                );
                let orbit = Orbit {
                    center,
                    radius_m: l.orbit_radius_m,
                    speed_mps: l.cuav_speed_mps,
                    phase_rad: rng.random_range(0.0..2.0 * PI),
                };
                let mut c = CUavState {
                    id,
                    position: center,
                    speed_mps: l.cuav_speed_mps,
                    heading_rad: 0.0,
                    task_prob: l.task_prob.sample(&mut rng),
                    local_freq_hz: l.cuav_freq_hz.sample(&mut rng),
                    subchannels: l.subchannels,
                    orbit,
                    current_task: None,
                };
                c = crate::mobility::step_cuav(&c, 0, config.mobility.slot_duration_s, l.cuav_altitude_m);
                c
            })
            .collect();

        let euav = EUavState { position: Vec3::new(0.0, 0.0, l.euav_altitude_m), max_freq_hz: l.euav_max_freq_hz };
        Ok(Self { config, cuavs, euav, seeds })
    }
}

/// Bernoulli task arrival followed by uniform draws of the task attributes.
pub fn spawn_task<R: Rng + ?Sized>(cuav: &CUavState, ranges: &TaskRanges, rng: &mut R) -> Option<Task> {
    let u: f64 = rng.random();
    if u >= cuav.task_prob {
        return None;
    }
    Some(Task {
        data_bits: ranges.data_bits.sample(rng),
        cycles_per_bit: ranges.cycles_per_bit.sample(rng),
        deadline_s: ranges.deadline_s.sample(rng),
    })
}

/// Task stream for one C-UAV in one slot.
pub fn task_stream(seeds: &SeedTree, slot: usize, cuav: usize) -> StreamRng {
    seeds.stream(Purpose::Tasks, slot as u64, cuav as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Local,
    Mec,
    Veh,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Local, Mode::Mec, Mode::Veh];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Local => "local",
            Mode::Mec => "mec",
            Mode::Veh => "veh",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Final decision for one task-bearing C-UAV.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub cuav: usize,
    pub mode: Mode,
    pub mec_freq_hz: Option<f64>,
    pub fog_set: Vec<usize>,
    pub division: Vec<f64>,
}

impl Assignment {
    pub fn local(cuav: usize) -> Self {
        Self { cuav, mode: Mode::Local, mec_freq_hz: None, fog_set: Vec::new(), division: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OffloadProfile {
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileViolation {
    #[error("C-UAV {0} appears more than once")]
    DuplicateCuav(usize),
    #[error("C-UAV {0}: MEC frequency present without MEC mode, or missing/nonpositive under MEC")]
    MecShare(usize),
    #[error("MEC shares sum to {total} Hz, above capacity {capacity} Hz")]
    MecCapacity { total: f64, capacity: f64 },
    #[error("C-UAV {0}: fog set or division present without VFC mode")]
    StrayFogData(usize),
    #[error("C-UAV {cuav}: {len} fog nodes exceeds {limit} subchannels")]
    TooManyFogNodes { cuav: usize, len: usize, limit: usize },
    #[error("C-UAV {0}: division length differs from fog set length, or is empty")]
    DivisionShape(usize),
    #[error("C-UAV {cuav}: division is off the simplex (sum {sum})")]
    DivisionSimplex { cuav: usize, sum: f64 },
    #[error("vehicle {0} serves more than one C-UAV")]
    SharedFogNode(usize),
}

/// Limits a profile is checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileLimits {
    pub mec_capacity_hz: f64,
    pub subchannels: usize,
}

pub const SIMPLEX_TOL: f64 = 1e-9;

impl OffloadProfile {
    pub fn mode_of(&self, cuav: usize) -> Option<Mode> {
        self.assignments.iter().find(|a| a.cuav == cuav).map(|a| a.mode)
    }

    /// Checks every structural constraint a decision profile must satisfy.
    pub fn validate(&self, limits: &ProfileLimits) -> Result<(), ProfileViolation> {
        let mut seen_cuavs: Vec<usize> = Vec::with_capacity(self.assignments.len());
        let mut seen_vehicles: Vec<usize> = Vec::new();
        let mut mec_total = 0.0;
        for a in &self.assignments {
            if seen_cuavs.contains(&a.cuav) {
                return Err(ProfileViolation::DuplicateCuav(a.cuav));
            }
            seen_cuavs.push(a.cuav);

            match (a.mode, a.mec_freq_hz) {
                (Mode::Mec, Some(f)) if f > 0.0 && f <= limits.mec_capacity_hz * (1.0 + SIMPLEX_TOL) => mec_total += f,
                (Mode::Mec, _) | (_, Some(_)) => return Err(ProfileViolation::MecShare(a.cuav)),
                _ => {}
            }

            if a.mode != Mode::Veh {
                if !a.fog_set.is_empty() || !a.division.is_empty() {
                    return Err(ProfileViolation::StrayFogData(a.cuav));
                }
                continue;
            }
            if a.fog_set.len() > limits.subchannels {
                return Err(ProfileViolation::TooManyFogNodes {
                    cuav: a.cuav,
                    len: a.fog_set.len(),
                    limit: limits.subchannels,
                });
            }
            if a.division.is_empty() || a.division.len() != a.fog_set.len() {
                return Err(ProfileViolation::DivisionShape(a.cuav));
            }
            let sum: f64 = a.division.iter().sum();
            let in_range = a.division.iter().all(|&x| (0.0..=1.0).contains(&x));
            if !in_range || libm::fabs(sum - 1.0) > SIMPLEX_TOL {
                return Err(ProfileViolation::DivisionSimplex { cuav: a.cuav, sum });
            }
            for &v in &a.fog_set {
                if seen_vehicles.contains(&v) {
                    return Err(ProfileViolation::SharedFogNode(v));
                }
                seen_vehicles.push(v);
            }
        }
        if mec_total > limits.mec_capacity_hz * (1.0 + SIMPLEX_TOL) {
            return Err(ProfileViolation::MecCapacity { total: mec_total, capacity: limits.mec_capacity_hz });
        }
        Ok(())
    }
}

/// Outcome of one task in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavRecord {
    pub cuav: usize,
    pub mode: Mode,
    pub dropped: bool,
    pub utility: f64,
    pub delay_s: f64,
    pub energy_j: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlotMetrics {
    pub slot: usize,
    pub system_utility: f64,
    pub records: Vec<UavRecord>,
    pub dropped_count: usize,
    /// Better-response rounds the offloading game needed; 0 when no game ran.
    pub game_rounds: usize,
}

impl SlotMetrics {
    pub fn task_count(&self) -> usize {
        self.records.len()
    }

    pub fn total_delay_s(&self) -> f64 {
        self.records.iter().map(|r| r.delay_s).sum()
    }

    pub fn avg_delay_s(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.total_delay_s() / self.records.len() as f64
        }
    }

    pub fn total_energy_j(&self) -> f64 {
        self.records.iter().map(|r| r.energy_j).sum()
    }

    pub fn mode_count(&self, mode: Mode) -> usize {
        self.records.iter().filter(|r| r.mode == mode).count()
    }
}
