//! Scenario files.
//!
//! A scenario file is TOML. Every key is optional and falls back to the
//! default scenario; unknown keys are rejected so typos do not silently
//! fall back. Values use the human-facing units listed below and are
//! converted to linear SI on load.
//!
//! | section     | key            | unit            | default          |
//! |-------------|----------------|-----------------|------------------|
//! | (top level) | `seed`         |                 | 1                |
//! | (top level) | `slots`        | slots           | 100              |
//! | `area`      | `side_m`       | m               | 2000             |
//! | `area`      | `cell_side_m`  | m               | 400              |
//! | `area`      | `num_cuavs`    |                 | 15               |
//! | `cuav`      | `H`            | m               | 100              |
//! | `cuav`      | `speed`        | m/s             | 20               |
//! | `cuav`      | `radius`       | m               | 100              |
//! | `cuav`      | `f_uav`        | GHz             | [1, 2]           |
//! | `cuav`      | `rho`          | probability     | [0.8, 1]         |
//! | `cuav`      | `K_n`          | subchannels     | 5                |
//! | `euav`      | `H_u`          | m               | 300              |
//! | `euav`      | `F_u_max`      | GHz             | 30               |
//! | `task`      | `D_n`          | Mb              | [1, 3]           |
//! | `task`      | `eta_n`        | cycles/bit      | [100, 1000]      |
//! | `task`      | `T_max`        | s               | [0.5, 1]         |
//! | `channel`   | `B`            | KHz             | 200              |
//! | `channel`   | `Psi`          | rad             | pi/4             |
//! | `channel`   | `G0`           |                 | 2.2846           |
//! | `channel`   | `g`            |                 | 0                |
//! | `channel`   | `beta_0`       |                 | 1.42e-4          |
//! | `channel`   | `beta_0_u2u`   |                 | 1.42e-4          |
//! | `channel`   | `kappa`        |                 | 0.2              |
//! | `channel`   | `mu`           |                 | 2.3              |
//! | `channel`   | `a`, `b`       |                 | 10, 0.6          |
//! | `channel`   | `sigma2`       | dBm/Hz          | -174             |
//! | `channel`   | `P_nm`, `P_nu` | dBm             | 20, 20           |
//! | `utility`   | `alpha_n`      |                 | 0.9              |
//! | `utility`   | `beta_n`       |                 | 0.1              |
//! | `utility`   | `beta`         | s               | 1                |
//! | `utility`   | `rho_0`        | $/GHz           | 0.001            |
//! | `utility`   | `k`            |                 | 1e-28            |
//! | `mobility`  | `delta_t`      | s               | 1                |
//! | `mobility`  | `rho_v`        | vehicles/km^2   | 200              |
//! | `mobility`  | `f_veh`        | GHz             | [0, 1]           |
//! | `mobility`  | `alpha`        |                 | 0.8              |
//! | `mobility`  | `mean_speed`   | m/s             | 10               |
//! | `mobility`  | `sigma_v`      | m/s             | 2                |
//! | `mobility`  | `mean_heading` | rad             | 0                |
//! | `mobility`  | `sigma_d`      | rad             | pi/4             |
//! | `mobility`  | `speed_bounds` | m/s             | [0, 20]          |
//! | `mobility`  | `heading_bounds` | rad           | [-pi, pi]        |
//! | `ga`        | `pc`, `pm`     | probability     | 0.8, 0.1         |
//! | `ga`        | `G`, `L`       |                 | 200, 50          |
//! | `solver`    | `epsilon`      | relative        | 1e-12            |
//!
//! Ranged keys accept either `[lo, hi]` or a single number.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use skyfog_core::scenario::{dbm_to_watts, Interval, InvariantError};
use skyfog_core::{Scenario, ScenarioConfig};
use thiserror::Error;

const GHZ: f64 = 1e9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: parse error at line {line}, column {column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
    #[error("{0}")]
    Invariant(#[from] InvariantError),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Range {
    Point(f64),
    Pair([f64; 2]),
}

impl Range {
    fn scaled(self, unit: f64) -> Interval {
        match self {
            Range::Point(v) => Interval::point(v * unit),
            Range::Pair([lo, hi]) => Interval::new(lo * unit, hi * unit),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    seed: Option<u64>,
    slots: Option<usize>,
    #[serde(default)]
    area: Area,
    #[serde(default)]
    cuav: Cuav,
    #[serde(default)]
    euav: Euav,
    #[serde(default)]
    task: TaskSection,
    #[serde(default)]
    channel: Channel,
    #[serde(default)]
    utility: Utility,
    #[serde(default)]
    mobility: Mobility,
    #[serde(default)]
    ga: Ga,
    #[serde(default)]
    solver: Solver,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Area {
    side_m: Option<f64>,
    cell_side_m: Option<f64>,
    num_cuavs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct Cuav {
    H: Option<f64>,
    speed: Option<f64>,
    radius: Option<f64>,
    f_uav: Option<Range>,
    rho: Option<Range>,
    K_n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct Euav {
    H_u: Option<f64>,
    F_u_max: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct TaskSection {
    D_n: Option<Range>,
    eta_n: Option<Range>,
    T_max: Option<Range>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct Channel {
    B: Option<f64>,
    Psi: Option<f64>,
    G0: Option<f64>,
    g: Option<f64>,
    beta_0: Option<f64>,
    beta_0_u2u: Option<f64>,
    kappa: Option<f64>,
    mu: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    sigma2: Option<f64>,
    P_nm: Option<f64>,
    P_nu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Utility {
    alpha_n: Option<f64>,
    beta_n: Option<f64>,
    beta: Option<f64>,
    rho_0: Option<f64>,
    k: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Mobility {
    delta_t: Option<f64>,
    rho_v: Option<f64>,
    f_veh: Option<Range>,
    alpha: Option<f64>,
    mean_speed: Option<f64>,
    sigma_v: Option<f64>,
    mean_heading: Option<f64>,
    sigma_d: Option<f64>,
    speed_bounds: Option<[f64; 2]>,
    heading_bounds: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct Ga {
    pc: Option<f64>,
    pm: Option<f64>,
    G: Option<usize>,
    L: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Solver {
    epsilon: Option<f64>,
}

fn set<T>(target: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *target = v;
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

impl File {
    fn apply(self, cfg: &mut ScenarioConfig) {
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.slots, self.slots);

        let l = &mut cfg.layout;
        set(&mut l.area_side_m, self.area.side_m);
        set(&mut l.cell_side_m, self.area.cell_side_m);
        set(&mut l.num_cuavs, self.area.num_cuavs);
        set(&mut l.cuav_altitude_m, self.cuav.H);
        set(&mut l.cuav_speed_mps, self.cuav.speed);
        set(&mut l.orbit_radius_m, self.cuav.radius);
        set(&mut l.cuav_freq_hz, self.cuav.f_uav.map(|r| r.scaled(GHZ)));
        set(&mut l.task_prob, self.cuav.rho.map(|r| r.scaled(1.0)));
        set(&mut l.subchannels, self.cuav.K_n);
        set(&mut l.euav_altitude_m, self.euav.H_u);
        set(&mut l.euav_max_freq_hz, self.euav.F_u_max.map(|f| f * GHZ));

        let t = &mut cfg.tasks;
        set(&mut t.data_bits, self.task.D_n.map(|r| r.scaled(1e6)));
        set(&mut t.cycles_per_bit, self.task.eta_n.map(|r| r.scaled(1.0)));
        set(&mut t.deadline_s, self.task.T_max.map(|r| r.scaled(1.0)));

        let c = &mut cfg.channel;
        let ch = self.channel;
        set(&mut c.bandwidth_hz, ch.B.map(|b| b * 1e3));
        set(&mut c.beamwidth_half_rad, ch.Psi);
        set(&mut c.main_lobe_gain, ch.G0);
        set(&mut c.out_of_beam_gain, ch.g);
        set(&mut c.ref_gain_u2v, ch.beta_0);
        set(&mut c.ref_gain_u2u, ch.beta_0_u2u);
        set(&mut c.nlos_factor, ch.kappa);
        set(&mut c.pathloss_exp, ch.mu);
        set(&mut c.los_a, ch.a);
        set(&mut c.los_b, ch.b);
        set(&mut c.noise_psd_w_per_hz, ch.sigma2.map(dbm_to_watts));
        set(&mut c.tx_power_u2v_w, ch.P_nm.map(dbm_to_watts));
        set(&mut c.tx_power_u2u_w, ch.P_nu.map(dbm_to_watts));

        let u = &mut cfg.utility;
        set(&mut u.delay_weight, self.utility.alpha_n);
        set(&mut u.energy_weight, self.utility.beta_n);
        set(&mut u.log_offset, self.utility.beta);
        set(&mut u.mec_price_per_hz, self.utility.rho_0.map(|p| p / GHZ));
        set(&mut u.switched_capacitance, self.utility.k);

        let m = &mut cfg.mobility;
        let mo = self.mobility;
        set(&mut m.slot_duration_s, mo.delta_t);
        set(&mut m.vehicle_density_per_km2, mo.rho_v);
        set(&mut m.idle_freq_hz, mo.f_veh.map(|r| r.scaled(GHZ)));
        set(&mut m.memory_degree, mo.alpha);
        set(&mut m.mean_speed_mps, mo.mean_speed);
        set(&mut m.speed_std, mo.sigma_v);
        set(&mut m.mean_heading_rad, mo.mean_heading);
        set(&mut m.heading_std, mo.sigma_d);
        set(&mut m.speed_bounds, mo.speed_bounds.map(|[lo, hi]| Interval::new(lo, hi)));
        set(&mut m.heading_bounds, mo.heading_bounds.map(|[lo, hi]| Interval::new(lo, hi)));

        set(&mut cfg.ga.crossover_prob, self.ga.pc);
        set(&mut cfg.ga.mutation_prob, self.ga.pm);
        set(&mut cfg.ga.generations, self.ga.G);
        set(&mut cfg.ga.population, self.ga.L);
        set(&mut cfg.bisection_tol, self.solver.epsilon);
    }
}

/// Parses scenario text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<ScenarioConfig, ConfigError> {
    let file: File = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ConfigError::Parse { origin: origin.to_string(), line, column, message: e.message().to_string() }
    })?;
    let mut cfg = ScenarioConfig::default();
    file.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, &path.display().to_string())
}

/// Parses and materializes a scenario in one step.
pub fn load_scenario(text: &str) -> Result<Scenario, ConfigError> {
    Ok(Scenario::new(parse_config(text, "<input>")?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column_from_offset() {
        let text = "a = 1\nbb = 2\n";
        assert_eq!(line_col(text, 0), (1, 1));
        assert_eq!(line_col(text, 6), (2, 1));
        assert_eq!(line_col(text, 8), (2, 3));
    }

    #[test]
    fn point_and_pair_ranges() {
        assert_eq!(Range::Point(2.0).scaled(GHZ), Interval::point(2e9));
        assert_eq!(Range::Pair([1.0, 3.0]).scaled(1e6), Interval::new(1e6, 3e6));
    }
}
