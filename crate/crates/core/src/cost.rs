//! Service delay, C-UAV energy and utility for the three execution modes.
//!
//! Utility is `α·ln(β + T_max − T) − β_n·E`, minus `ρ0·F` for MEC. An
//! outcome that misses its deadline carries `f64::NEG_INFINITY` as utility so
//! every argmax downstream skips it without special cases. The unchecked
//! value is kept in `objective` for solvers that optimize the smooth formula.

use crate::scenario::{Mode, Task, UtilityParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOutcome {
    pub delay_s: f64,
    pub energy_j: f64,
    /// Utility, or negative infinity when `!feasible`.
    pub utility: f64,
    /// Utility formula evaluated without the deadline check; negative
    /// infinity only outside the logarithm's domain.
    pub objective: f64,
    pub feasible: bool,
}

impl ModeOutcome {
    pub fn infeasible() -> Self {
        Self {
            delay_s: f64::INFINITY,
            energy_j: 0.0,
            utility: f64::NEG_INFINITY,
            objective: f64::NEG_INFINITY,
            feasible: false,
        }
    }
}

/// `α·ln(β + T_max − T)`; negative infinity when the argument is not positive.
pub fn revenue(delay_s: f64, deadline_s: f64, up: &UtilityParams) -> f64 {
    let arg = up.log_offset + deadline_s - delay_s;
    if arg > 0.0 {
        up.delay_weight * libm::log(arg)
    } else {
        f64::NEG_INFINITY
    }
}

/// Inputs of the utility formula for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityTerms {
    pub delay_s: f64,
    pub deadline_s: f64,
    pub energy_j: f64,
    /// E-UAV cycles bought; only charged under MEC.
    pub mec_freq_hz: f64,
}

/// Smooth utility formula of a mode, ignoring the deadline.
pub fn objective(mode: Mode, t: &UtilityTerms, up: &UtilityParams) -> f64 {
    let base = revenue(t.delay_s, t.deadline_s, up) - up.energy_weight * t.energy_j;
    match mode {
        Mode::Mec => base - up.mec_price_per_hz * t.mec_freq_hz,
        Mode::Local | Mode::Veh => base,
    }
}

/// Utility of a mode with the deadline enforced.
pub fn utility(mode: Mode, t: &UtilityTerms, up: &UtilityParams) -> f64 {
    if t.delay_s <= t.deadline_s {
        objective(mode, t, up)
    } else {
        f64::NEG_INFINITY
    }
}

fn outcome(mode: Mode, terms: UtilityTerms, up: &UtilityParams) -> ModeOutcome {
    let objective = objective(mode, &terms, up);
    let feasible = terms.delay_s <= terms.deadline_s && objective.is_finite();
    ModeOutcome {
        delay_s: terms.delay_s,
        energy_j: terms.energy_j,
        utility: if feasible { objective } else { f64::NEG_INFINITY },
        objective,
        feasible,
    }
}

pub fn local_outcome(task: &Task, local_freq_hz: f64, up: &UtilityParams) -> ModeOutcome {
    debug_assert!(local_freq_hz > 0.0);
    let delay = task.cycles() / local_freq_hz;
    let energy = up.switched_capacitance * local_freq_hz * local_freq_hz * local_freq_hz * delay;
    outcome(
        Mode::Local,
        UtilityTerms { delay_s: delay, deadline_s: task.deadline_s, energy_j: energy, mec_freq_hz: 0.0 },
        up,
    )
}

/// Whole-task offload to the E-UAV with `mec_freq_hz` cycles/s allocated.
pub fn mec_outcome(task: &Task, mec_freq_hz: f64, rate_bps: f64, tx_power_w: f64, up: &UtilityParams) -> ModeOutcome {
    if !(mec_freq_hz > 0.0 && rate_bps > 0.0) {
        return ModeOutcome::infeasible();
    }
    let tx_time = task.data_bits / rate_bps;
    let delay = tx_time + task.cycles() / mec_freq_hz;
    outcome(
        Mode::Mec,
        UtilityTerms { delay_s: delay, deadline_s: task.deadline_s, energy_j: tx_power_w * tx_time, mec_freq_hz },
        up,
    )
}

/// A vehicle fog node as seen by one C-UAV this slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogLink {
    pub vehicle: usize,
    pub rate_bps: f64,
    pub freq_hz: f64,
    pub tx_power_w: f64,
}

/// Completion delay (slowest sub-task) and transmit energy of a division.
/// Delay is infinite when a positive share lands on a node with no capacity.
pub fn vfc_delay_energy(task: &Task, division: &[f64], links: &[FogLink]) -> (f64, f64) {
    debug_assert_eq!(division.len(), links.len());
    let mut delay: f64 = 0.0;
    let mut energy = 0.0;
    for (&share, link) in division.iter().zip(links) {
        if share <= 0.0 {
            continue;
        }
        if !(link.freq_hz > 0.0 && link.rate_bps > 0.0) {
            return (f64::INFINITY, energy);
        }
        let tx = share * task.data_bits / link.rate_bps;
        delay = delay.max(tx + share * task.cycles() / link.freq_hz);
        energy += link.tx_power_w * tx;
    }
    (delay, energy)
}

pub fn vfc_outcome(task: &Task, division: &[f64], links: &[FogLink], up: &UtilityParams) -> ModeOutcome {
    if division.is_empty() || division.len() != links.len() {
        return ModeOutcome::infeasible();
    }
    let (delay, energy) = vfc_delay_energy(task, division, links);
    if !delay.is_finite() {
        return ModeOutcome::infeasible();
    }
    outcome(
        Mode::Veh,
        UtilityTerms { delay_s: delay, deadline_s: task.deadline_s, energy_j: energy, mec_freq_hz: 0.0 },
        up,
    )
}
