//! Oracle verification suites behind `skyfog verify`.
//!
//! Every check runs over seeded random instances and keeps the worst error
//! it saw plus the seeds of the instances that broke its tolerance.

use std::fmt;
use std::str::FromStr;

use skyfog_core::game::poa_eval;
use skyfog_core::mec::{bisect_allocate, stationarity_residual};
use skyfog_core::rng::{Purpose, SeedTree};
use skyfog_core::vfc::{ga_divide, link_preference, select_fog_nodes};
use skyfog_core::ScenarioConfig;

use crate::instances::{division_instance, fog_instance, game_instance, mec_instance};
use crate::oracle::{best_subset_delay, division_reference, equalized_delay, mec_reference, potential_residual};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Mec,
    Vfc,
    Game,
    Poa,
    All,
}

impl Suite {
    fn parts(self) -> &'static [Suite] {
        match self {
            Suite::All => &[Suite::Mec, Suite::Vfc, Suite::Game, Suite::Poa],
            Suite::Mec => &[Suite::Mec],
            Suite::Vfc => &[Suite::Vfc],
            Suite::Game => &[Suite::Game],
            Suite::Poa => &[Suite::Poa],
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mec" => Ok(Suite::Mec),
            "vfc" => Ok(Suite::Vfc),
            "game" => Ok(Suite::Game),
            "poa" => Ok(Suite::Poa),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite `{other}` (expected mec, vfc, game, poa or all)")),
        }
    }
}

/// Worst error of one check over all its instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub instances: usize,
    pub max_error: f64,
    /// Seeds of the instances whose error was above tolerance or not a number.
    pub failing_seeds: Vec<u64>,
}

impl Check {
    pub fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, tolerance, instances: 0, max_error: 0.0, failing_seeds: Vec::new() }
    }

    pub fn record(&mut self, seed: u64, error: f64) {
        self.instances += 1;
        if (error.is_nan() || error > self.tolerance) && !self.failing_seeds.contains(&seed) {
            self.failing_seeds.push(seed);
        }
        if error.is_nan() || error > self.max_error {
            self.max_error = error;
        }
    }

    pub fn passed(&self) -> bool {
        self.failing_seeds.is_empty()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<24} instances={:<5} max_error={:.3e} tolerance={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.max_error,
            self.tolerance
        )?;
        if !self.passed() {
            let seeds: Vec<String> = self.failing_seeds.iter().take(20).map(u64::to_string).collect();
            write!(f, " failing seeds: {}", seeds.join(", "))?;
            if self.failing_seeds.len() > 20 {
                write!(f, " (+{} more)", self.failing_seeds.len() - 20)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Stationarity, complementary slackness and optimality of the bisection
/// allocation against the pairwise-transfer reference.
pub fn mec_suite(cfg: &ScenarioConfig, trials: u64) -> Vec<Check> {
    let up = cfg.utility;
    let mut stationarity = Check::new("mec/stationarity", 1e-6);
    let mut slackness = Check::new("mec/slackness", 1e-6);
    let mut optimality = Check::new("mec/optimality", 1e-6);
    let mut capacity = Check::new("mec/capacity", 1e-9);
    for seed in 0..trials {
        let inst = mec_instance(seed, &up);
        let Ok(a) = bisect_allocate(&inst.demands, inst.capacity_hz, cfg.bisection_tol, &up) else {
            stationarity.record(seed, f64::NAN);
            continue;
        };
        let residual = inst
            .demands
            .iter()
            .zip(&a.shares_hz)
            .map(|(d, &f)| stationarity_residual(d, f, a.multiplier, &up))
            .fold(0.0, f64::max);
        stationarity.record(seed, residual);
        // γ·(ΣF − cap), scaled by the price level and the capacity
        let price = up.mec_price_per_hz + a.multiplier;
        slackness.record(seed, a.multiplier / price * (a.total_hz - inst.capacity_hz).abs() / inst.capacity_hz);
        capacity.record(seed, ((a.total_hz - inst.capacity_hz) / inst.capacity_hz).max(0.0));
        let ours: f64 =
            inst.demands.iter().zip(&a.shares_hz).map(|(d, &f)| crate::oracle::mec_objective(d, f, &up)).sum();
        let reference = mec_reference(&inst.demands, inst.capacity_hz, &up);
        optimality.record(seed, (reference.objective - ours).max(0.0));
    }
    vec![stationarity, slackness, optimality, capacity]
}

/// Fog-node dominance against subset brute force, and GA quality against
/// the simplex reference.
pub fn vfc_suite(cfg: &ScenarioConfig, trials: u64) -> Vec<Check> {
    let up = cfg.utility;
    let mut dominance = Check::new("vfc/selection-dominance", 1e-12);
    let mut ga_gap = Check::new("vfc/ga-relative-gap", 0.02);
    let mut simplex = Check::new("vfc/ga-simplex", 1e-12);
    for seed in 0..trials {
        let inst = fog_instance(seed);
        match select_fog_nodes(&inst.task, &inst.candidates, inst.max_nodes) {
            Ok(chosen) => {
                let ours = equalized_delay(&inst.task, &chosen);
                let best = best_subset_delay(&inst.task, &inst.candidates, inst.max_nodes);
                dominance.record(seed, ((ours - best) / best).max(0.0));
                debug_assert!(chosen
                    .windows(2)
                    .all(|w| link_preference(&inst.task, &w[0]) <= link_preference(&inst.task, &w[1])));
            }
            Err(_) => dominance.record(seed, f64::NAN),
        }

        let div = division_instance(seed);
        let mut rng = SeedTree::new(seed).stream(Purpose::Policy, 0, 0);
        let report = ga_divide(&div.task, &div.links, &cfg.ga, &up, &mut rng);
        let reference = division_reference(&div.task, &div.links, &up);
        let gap = if report.objective >= reference.objective {
            0.0
        } else {
            (reference.objective - report.objective) / reference.objective.abs()
        };
        ga_gap.record(seed, gap);
        simplex.record(seed, report.max_simplex_error);
    }
    vec![dominance, ga_gap, simplex]
}

/// Player counts of the convergence check.
pub const CONVERGENCE_SIZES: [usize; 4] = [5, 10, 15, 20];

/// Exact-potential identity on three-player games, then convergence,
/// strict potential ascent and the equilibrium certificate on larger ones.
pub fn game_suite(cfg: &ScenarioConfig, trials: u64) -> Vec<Check> {
    let mut identity = Check::new("game/potential-identity", 1e-9);
    let mut converged = Check::new("game/round-cap", 0.0);
    let mut ascent = Check::new("game/potential-ascent", 0.0);
    let mut stable = Check::new("game/stable-profile", 0.0);
    for seed in 0..trials {
        identity.record(seed, potential_residual(&game_instance(seed, 3, cfg)));
        for n in CONVERGENCE_SIZES {
            let game = game_instance(seed, n, cfg);
            match game.run() {
                Ok(out) => {
                    converged.record(seed, 0.0);
                    // a step that does not raise the potential counts as an error of 1
                    let bad = out.steps.iter().filter(|s| !s.raises_potential()).count();
                    ascent.record(seed, bad as f64);
                    stable.record(seed, if game.is_stable(&out.profile) { 0.0 } else { 1.0 });
                }
                Err(_) => converged.record(seed, 1.0),
            }
        }
    }
    vec![identity, converged, ascent, stable]
}

/// Price of anarchy within `[lower_bound, 1]` on three-player games.
pub fn poa_suite(cfg: &ScenarioConfig, trials: u64) -> Vec<Check> {
    let mut bounds = Check::new("poa/bounds", 1e-12);
    for seed in 0..trials {
        let game = game_instance(seed, 3, cfg);
        match poa_eval(&game) {
            Ok(r) => {
                let below = r.lower_bound - r.poa;
                let above = r.poa - 1.0;
                bounds.record(seed, below.max(above).max(0.0));
            }
            Err(_) => bounds.record(seed, f64::NAN),
        }
    }
    vec![bounds]
}

pub fn run_suite(suite: Suite, cfg: &ScenarioConfig, trials: u64) -> Report {
    let mut checks = Vec::new();
    for part in suite.parts() {
        checks.extend(match part {
            Suite::Mec => mec_suite(cfg, trials),
            Suite::Vfc => vfc_suite(cfg, trials),
            Suite::Game => game_suite(cfg, trials),
            Suite::Poa => poa_suite(cfg, trials),
            Suite::All => unreachable!(),
        });
    }
    Report { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_and_sticks() {
        let mut c = Check::new("x", 1.0);
        c.record(3, 0.5);
        c.record(4, f64::NAN);
        c.record(5, 0.1);
        assert!(!c.passed());
        assert_eq!(c.failing_seeds, vec![4]);
        assert!(c.max_error.is_nan());
        assert!(c.to_string().contains("failing seeds: 4"));
    }

    #[test]
    fn small_suites_pass() {
        let cfg = ScenarioConfig::default();
        let r = run_suite(Suite::Mec, &cfg, 10);
        assert!(r.passed(), "{r}");
        let r = run_suite(Suite::Poa, &cfg, 3);
        assert!(r.passed(), "{r}");
    }
}
