//! The per-slot task offloading game among task-bearing C-UAVs.
//!
//! Each player starts from its best non-MEC mode. In every round, players in
//! ascending order try MEC: the E-UAV re-allocates its cycles over the
//! tentative MEC set and the player keeps MEC only on a strict improvement
//! over its initial utility, otherwise it falls back. A round with no change
//! ends the game.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::cost::ModeOutcome;
use crate::mec::{bisect_allocate, closed_form_share, even_split, MecAllocation, MecDemand};
use crate::scenario::{Mode, UtilityParams};

/// How the E-UAV divides its capacity among the MEC players.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MecRule {
    Optimal,
    Even,
}

/// One task-bearing C-UAV with its mode outcomes that do not depend on others.
#[derive(Debug, Clone, PartialEq)]
pub struct Player {
    pub cuav: usize,
    pub local: ModeOutcome,
    /// Infeasible when no fog node is available.
    pub veh: ModeOutcome,
    pub mec: MecDemand,
    /// Mode played when not on MEC.
    pub initial: Mode,
}

impl Player {
    pub fn initial_utility(&self) -> f64 {
        self.fixed_utility(self.initial)
    }

    fn fixed_utility(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Local => self.local.utility,
            Mode::Veh => self.veh.utility,
            Mode::Mec => unreachable!("MEC utility depends on the profile"),
        }
    }

    /// Best of local and VFC, ties to local.
    pub fn best_fixed_mode(local: &ModeOutcome, veh: &ModeOutcome) -> Mode {
        if veh.utility > local.utility {
            Mode::Veh
        } else {
            Mode::Local
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GameError {
    #[error("no convergence within {rounds} rounds")]
    RoundCap { rounds: usize },
    #[error("no pure Nash equilibrium among the enumerated profiles")]
    NoEquilibrium,
    #[error("{players} players is too many to enumerate")]
    TooLarge { players: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotGame {
    pub players: Vec<Player>,
    pub capacity_hz: f64,
    pub rel_tol: f64,
    pub rule: MecRule,
    pub utility: UtilityParams,
}

/// One accepted strategy change. The potential seen by the deviator is
/// `others + before` ahead of the move and `others + after` behind it, so the
/// move raises the potential exactly when `after > before`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialStep {
    pub round: usize,
    pub player: usize,
    pub to: Mode,
    /// Sum of every other player's local utility.
    pub others: f64,
    /// Deviator's utility before the move.
    pub before: f64,
    pub after: f64,
}

impl PotentialStep {
    pub fn potential_before(&self) -> f64 {
        self.others + self.before
    }

    pub fn potential_after(&self) -> f64 {
        self.others + self.after
    }

    /// Whether the move raised the potential. Compares the deviator's terms
    /// only, so it stays meaningful when `others` is negative infinity.
    pub fn raises_potential(&self) -> bool {
        self.after > self.before
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub profile: Vec<Mode>,
    /// Rounds played, counting the final round without changes.
    pub rounds: usize,
    pub steps: Vec<PotentialStep>,
}

/// Per-player outcomes of a full profile plus the MEC allocation behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEval {
    pub outcomes: Vec<ModeOutcome>,
    /// `None` when nobody is on MEC or the MEC set cannot be served.
    pub allocation: Option<MecAllocation>,
}

impl ProfileEval {
    pub fn utilities(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.utility).collect()
    }
}

impl SlotGame {
    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn initial_profile(&self) -> Vec<Mode> {
        self.players.iter().map(|p| p.initial).collect()
    }

    pub fn allocate(&self, profile: &[Mode]) -> Option<MecAllocation> {
        // offloaders whose upload alone eats the headroom get no share and stay infeasible
        let demands: Vec<MecDemand> = self
            .players
            .iter()
            .zip(profile)
            .filter(|(p, &m)| m == Mode::Mec && p.mec.headroom_s(&self.utility) > 0.0)
            .map(|(p, _)| p.mec)
            .collect();
        if demands.is_empty() {
            return None;
        }
        match self.rule {
            MecRule::Optimal => bisect_allocate(&demands, self.capacity_hz, self.rel_tol, &self.utility).ok(),
            MecRule::Even => Some(even_split(&demands, self.capacity_hz)),
        }
    }

    pub fn evaluate(&self, profile: &[Mode]) -> ProfileEval {
        let allocation = self.allocate(profile);
        let outcomes = self
            .players
            .iter()
            .zip(profile)
            .map(|(p, &m)| match m {
                Mode::Local => p.local,
                Mode::Veh => p.veh,
                Mode::Mec => match allocation.as_ref().and_then(|a| a.share_of(p.cuav)) {
                    Some(f) => p.mec.outcome(f, &self.utility),
                    None => ModeOutcome::infeasible(),
                },
            })
            .collect();
        ProfileEval { outcomes, allocation }
    }

    pub fn utilities(&self, profile: &[Mode]) -> Vec<f64> {
        self.evaluate(profile).utilities()
    }

    /// Potential seen by `deviator`: its own utility plus everybody else's
    /// local utility. Any unilateral move by `deviator` changes it by exactly
    /// the change in the deviator's utility.
    pub fn potential(&self, profile: &[Mode], deviator: usize) -> f64 {
        let own = self.utilities(profile)[deviator];
        own + self.others_local(deviator)
    }

    fn others_local(&self, deviator: usize) -> f64 {
        self.players.iter().enumerate().filter(|(j, _)| *j != deviator).map(|(_, p)| p.local.utility).sum()
    }

    /// One pass over all players in index order. Returns whether anything changed.
    ///
    /// Each player compares MEC against its initial decision and moves only on
    /// a strict gain; a tie (two infeasible options included) keeps its mode.
    pub fn better_response_round(&self, profile: &mut [Mode], round: usize, log: &mut Vec<PotentialStep>) -> bool {
        let mut changed = false;
        for n in 0..self.players.len() {
            let current = profile[n];
            let initial = self.players[n].initial;
            let fallback = self.players[n].initial_utility();
            let held = match current {
                Mode::Mec => None,
                m if m == initial => Some(fallback),
                _ => Some(self.utilities(profile)[n]),
            };
            profile[n] = Mode::Mec;
            let on_mec = self.utilities(profile)[n];
            let held = held.unwrap_or(on_mec);
            let (target, gain) = if on_mec > fallback { (Mode::Mec, on_mec) } else { (initial, fallback) };
            if target != current && gain > held {
                profile[n] = target;
                changed = true;
                log.push(PotentialStep {
                    round,
                    player: n,
                    to: target,
                    others: self.others_local(n),
                    before: held,
                    after: gain,
                });
            } else {
                profile[n] = current;
            }
        }
        changed
    }

    pub fn round_cap(&self) -> usize {
        10 * self.players.len().max(1)
    }

    pub fn run_from(&self, start: Vec<Mode>) -> Result<GameOutcome, GameError> {
        let mut profile = start;
        let mut steps = Vec::new();
        let cap = self.round_cap();
        for round in 1..=cap {
            if !self.better_response_round(&mut profile, round, &mut steps) {
                return Ok(GameOutcome { profile, rounds: round, steps });
            }
        }
        Err(GameError::RoundCap { rounds: cap })
    }

    pub fn run(&self) -> Result<GameOutcome, GameError> {
        self.run_from(self.initial_profile())
    }

    /// Checks the deviations the game explores: nobody on MEC prefers its
    /// fallback and nobody off MEC gains by joining.
    pub fn is_stable(&self, profile: &[Mode]) -> bool {
        let current = self.utilities(profile);
        (0..self.players.len()).all(|n| {
            let fallback = self.players[n].initial_utility();
            if profile[n] == Mode::Mec {
                current[n] >= fallback
            } else {
                let mut probe = profile.to_vec();
                probe[n] = Mode::Mec;
                profile[n] == self.players[n].initial && self.utilities(&probe)[n] <= fallback
            }
        })
    }

    /// Pure Nash equilibrium over all three modes per player.
    pub fn is_nash(&self, profile: &[Mode]) -> bool {
        let current = self.utilities(profile);
        (0..self.players.len()).all(|n| {
            Mode::ALL.iter().filter(|&&m| m != profile[n]).all(|&m| {
                let mut probe = profile.to_vec();
                probe[n] = m;
                self.utilities(&probe)[n] <= current[n]
            })
        })
    }

    /// Best MEC utility a player could get from the E-UAV alone: the
    /// unconstrained optimal share, capped at the capacity.
    pub fn mec_upper_utility(&self, n: usize) -> f64 {
        let p = &self.players[n];
        match closed_form_share(&p.mec, 0.0, &self.utility) {
            Ok(f) => p.mec.outcome(f.min(self.capacity_hz), &self.utility).objective,
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Enumerates every profile over `{local, mec, veh}^N` in lexicographic order.
pub fn all_profiles(players: usize) -> Vec<Vec<Mode>> {
    let mut out = vec![Vec::new()];
    for _ in 0..players {
        out = out
            .into_iter()
            .flat_map(|p| {
                Mode::ALL.iter().map(move |&m| {
                    let mut q = p.clone();
                    q.push(m);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoaReport {
    pub poa: f64,
    pub lower_bound: f64,
    pub optimum: f64,
    pub worst_equilibrium: f64,
    pub equilibria: usize,
}

pub const POA_MAX_PLAYERS: usize = 6;

/// Price of anarchy by exhaustive enumeration, with its analytic lower bound.
pub fn poa_eval(game: &SlotGame) -> Result<PoaReport, GameError> {
    let n = game.len();
    if n > POA_MAX_PLAYERS {
        return Err(GameError::TooLarge { players: n });
    }
    let mut optimum = f64::NEG_INFINITY;
    let mut worst = f64::INFINITY;
    let mut equilibria = 0;
    for profile in all_profiles(n) {
        let welfare: f64 = game.utilities(&profile).iter().sum();
        optimum = optimum.max(welfare);
        if game.is_nash(&profile) {
            equilibria += 1;
            worst = worst.min(welfare);
        }
    }
    if equilibria == 0 {
        return Err(GameError::NoEquilibrium);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (i, p) in game.players.iter().enumerate() {
        let fixed = p.local.utility.max(p.veh.utility);
        num += fixed;
        den += fixed.max(game.mec_upper_utility(i));
    }
    Ok(PoaReport { poa: worst / optimum, lower_bound: num / den, optimum, worst_equilibrium: worst, equilibria })
}
