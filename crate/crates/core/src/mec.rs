//! Edge-UAV frequency allocation among the MEC offloaders.
//!
//! Each offloader's share maximizes `α·ln(c − ηD/F) − (ρ0 + γ)·F` where
//! `c = β + T_max − D/R` and `γ ≥ 0` prices the capacity constraint. The
//! first-order condition is the quadratic `c·F² − ηD·F − αηD/(ρ0+γ) = 0`,
//! whose positive root is taken in closed form. The total demand is
//! continuous and strictly decreasing in `γ`, so the capacity-clearing
//! multiplier is found by bisection.

use alloc::vec::Vec;

use thiserror::Error;

use crate::cost::{mec_outcome, ModeOutcome};
use crate::scenario::{Task, UtilityParams};

/// One C-UAV competing for E-UAV cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MecDemand {
    pub cuav: usize,
    pub task: Task,
    pub rate_bps: f64,
    pub tx_power_w: f64,
}

impl MecDemand {
    pub fn tx_time_s(&self) -> f64 {
        self.task.data_bits / self.rate_bps
    }

    /// `β + T_max − D/R`: the log headroom left once the upload is done.
    pub fn headroom_s(&self, up: &UtilityParams) -> f64 {
        up.log_offset + self.task.deadline_s - self.tx_time_s()
    }

    /// Smallest share keeping the revenue logarithm defined.
    pub fn log_floor_hz(&self, up: &UtilityParams) -> f64 {
        self.task.cycles() / self.headroom_s(up)
    }

    pub fn outcome(&self, freq_hz: f64, up: &UtilityParams) -> ModeOutcome {
        mec_outcome(&self.task, freq_hz, self.rate_bps, self.tx_power_w, up)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MecError {
    #[error("C-UAV {cuav}: upload alone exhausts the deadline plus log offset")]
    UploadExhaustsDeadline { cuav: usize },
    #[error("E-UAV capacity {capacity_hz} Hz cannot cover the {floor_hz} Hz needed to keep every offloader's log term defined")]
    CapacityExhausted { floor_hz: f64, capacity_hz: f64 },
    #[error("multiplier bisection did not converge in {iterations} steps")]
    NoConvergence { iterations: usize },
}

/// Optimal share of one offloader at multiplier `gamma`.
pub fn closed_form_share(d: &MecDemand, gamma: f64, up: &UtilityParams) -> Result<f64, MecError> {
    let c = d.headroom_s(up);
    if c <= 0.0 || c.is_nan() {
        return Err(MecError::UploadExhaustsDeadline { cuav: d.cuav });
    }
    let cycles = d.task.cycles();
    let price = up.mec_price_per_hz + gamma;
    if price <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let disc = cycles * cycles + 4.0 * c * cycles * up.delay_weight / price;
    Ok((cycles + libm::sqrt(disc)) / (2.0 * c))
}

/// Relative residual of the first-order condition `α·ηD / (F²·(c − ηD/F)) = ρ0 + γ`.
pub fn stationarity_residual(d: &MecDemand, freq_hz: f64, gamma: f64, up: &UtilityParams) -> f64 {
    let c = d.headroom_s(up);
    let cycles = d.task.cycles();
    let marginal = up.delay_weight * cycles / (freq_hz * freq_hz * (c - cycles / freq_hz));
    let price = up.mec_price_per_hz + gamma;
    libm::fabs(marginal - price) / price
}

/// Sum over offloaders of the smooth MEC utility at the given shares.
pub fn allocation_objective(demands: &[MecDemand], shares_hz: &[f64], up: &UtilityParams) -> f64 {
    demands.iter().zip(shares_hz).map(|(d, &f)| d.outcome(f, up).objective).sum()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MecAllocation {
    /// C-UAV ids, parallel to `shares_hz`.
    pub cuavs: Vec<usize>,
    pub shares_hz: Vec<f64>,
    pub multiplier: f64,
    pub total_hz: f64,
    pub iterations: usize,
}

impl MecAllocation {
    pub fn share_of(&self, cuav: usize) -> Option<f64> {
        self.cuavs.iter().position(|&c| c == cuav).map(|i| self.shares_hz[i])
    }

    fn from_shares(demands: &[MecDemand], shares_hz: Vec<f64>, multiplier: f64, iterations: usize) -> Self {
        Self {
            cuavs: demands.iter().map(|d| d.cuav).collect(),
            total_hz: shares_hz.iter().sum(),
            shares_hz,
            multiplier,
            iterations,
        }
    }
}

pub const BISECTION_CAP: usize = 200;
const DOUBLING_CAP: usize = 2200;

fn shares_at(demands: &[MecDemand], gamma: f64, up: &UtilityParams) -> Result<Vec<f64>, MecError> {
    demands.iter().map(|d| closed_form_share(d, gamma, up)).collect()
}

/// Capacity-constrained optimal allocation.
///
/// `rel_tol` bounds the final multiplier bracket relative to `ρ0 + γ`, the
/// quantity the shares actually depend on. The returned shares are those at
/// the upper end of the bracket, so they never exceed `capacity_hz`.
pub fn bisect_allocate(
    demands: &[MecDemand],
    capacity_hz: f64,
    rel_tol: f64,
    up: &UtilityParams,
) -> Result<MecAllocation, MecError> {
    if demands.is_empty() {
        return Ok(MecAllocation::default());
    }
    let unconstrained = shares_at(demands, 0.0, up)?;
    if unconstrained.iter().sum::<f64>() <= capacity_hz {
        let clamped = unconstrained.into_iter().map(|f| f.min(capacity_hz)).collect();
        return Ok(MecAllocation::from_shares(demands, clamped, 0.0, 0));
    }

    let floor: f64 = demands.iter().map(|d| d.log_floor_hz(up)).sum();
    if floor >= capacity_hz {
        return Err(MecError::CapacityExhausted { floor_hz: floor, capacity_hz });
    }

    let demand_at = |g: f64| -> f64 { demands.iter().map(|d| closed_form_share(d, g, up).unwrap_or(0.0)).sum() };

    let mut hi = if up.mec_price_per_hz > 0.0 { up.mec_price_per_hz } else { 1e-15 };
    let mut doublings = 0;
    while demand_at(hi) > capacity_hz {
        hi *= 2.0;
        doublings += 1;
        if doublings > DOUBLING_CAP || !hi.is_finite() {
            return Err(MecError::NoConvergence { iterations: doublings });
        }
    }

    let mut lo = 0.0;
    let mut iterations = 0;
    while hi - lo >= rel_tol * (up.mec_price_per_hz + hi) {
        if iterations == BISECTION_CAP {
            return Err(MecError::NoConvergence { iterations });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket is down to adjacent floats
        }
        if demand_at(mid) >= capacity_hz {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let shares = shares_at(demands, hi, up)?.into_iter().map(|f| f.min(capacity_hz)).collect();
    Ok(MecAllocation::from_shares(demands, shares, hi, iterations))
}

/// Capacity split evenly among the offloaders, ignoring their demands.
pub fn even_split(demands: &[MecDemand], capacity_hz: f64) -> MecAllocation {
    if demands.is_empty() {
        return MecAllocation::default();
    }
    let share = capacity_hz / demands.len() as f64;
    MecAllocation::from_shares(demands, alloc::vec![share; demands.len()], 0.0, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, SeedTree};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn up() -> UtilityParams {
        UtilityParams::default()
    }

    /// A demand with given total cycles and headroom `c` under the default β = 1.
    fn demand(cuav: usize, cycles: f64, headroom: f64) -> MecDemand {
        // D = 1e6 bits, deadline 1 s: c = 2 - 1e6 / R
        let rate = 1e6 / (2.0 - headroom);
        MecDemand {
            cuav,
            task: Task { data_bits: 1e6, cycles_per_bit: cycles / 1e6, deadline_s: 1.0 },
            rate_bps: rate,
            tx_power_w: 0.1,
        }
    }

    #[test]
    fn closed_form_value() {
        let d = demand(0, 1e9, 1.4);
        let f = closed_form_share(&d, 0.0, &up()).unwrap();
        let oracle = (1e9 + (1e18f64 + 4.0 * 1.4 * 1e9 * 0.9 / 1e-12).sqrt()) / 2.8;
        assert_relative_eq!(f, oracle, max_relative = 1e-14);
        assert!((f / 2.57e10 - 1.0).abs() < 0.002, "{f}");
        assert!(stationarity_residual(&d, f, 0.0, &up()) < 1e-9);
        let g = 3.7e-12;
        let f2 = closed_form_share(&d, g, &up()).unwrap();
        assert!(stationarity_residual(&d, f2, g, &up()) < 1e-9);
    }

    #[test]
    fn large_multiplier_approaches_log_floor() {
        let d = demand(0, 1e9, 1.4);
        let floor = d.log_floor_hz(&up());
        let mut prev = f64::INFINITY;
        for g in [1e-9, 1e-6, 1e-3, 1.0, 1e3] {
            let f = closed_form_share(&d, g, &up()).unwrap();
            assert!(f > floor && f < prev);
            prev = f;
        }
        assert!((prev - floor) / floor < 1e-6);
    }

    #[test]
    fn exhausted_headroom_rejected() {
        let mut d = demand(3, 1e9, 1.4);
        d.rate_bps = 1e5; // 10 s upload
        assert_eq!(closed_form_share(&d, 0.0, &up()), Err(MecError::UploadExhaustsDeadline { cuav: 3 }));
    }

    #[test]
    fn slack_capacity_keeps_zero_multiplier() {
        let d = demand(0, 1e9, 1.4);
        let a = bisect_allocate(&[d], 30e9, 1e-12, &up()).unwrap();
        assert_eq!(a.multiplier, 0.0);
        assert_eq!(a.shares_hz[0], closed_form_share(&d, 0.0, &up()).unwrap());
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        let d0 = demand(0, 1e9, 1.4);
        let d1 = demand(1, 1e9, 1.4);
        let a = bisect_allocate(&[d0, d1], 30e9, 1e-12, &up()).unwrap();
        assert!(a.multiplier > 0.0);
        assert_relative_eq!(a.shares_hz[0], 15e9, max_relative = 1e-9);
        assert_relative_eq!(a.shares_hz[1], 15e9, max_relative = 1e-9);
        // Grid over the multiplier: the first grid point at which total demand
        // fits must bracket the bisection result.
        let mut prev = 0.0;
        let mut g = 0.0;
        while g < 1e-9 {
            let total: f64 = [d0, d1].iter().map(|d| closed_form_share(d, g, &up()).unwrap()).sum();
            if total <= 30e9 {
                assert!(prev <= a.multiplier && a.multiplier <= g);
                break;
            }
            prev = g;
            g += 1e-15;
        }
    }

    #[test]
    fn empty_set_and_exhaustion() {
        assert_eq!(bisect_allocate(&[], 30e9, 1e-12, &up()).unwrap(), MecAllocation::default());
        let heavy: alloc::vec::Vec<_> = (0..10).map(|i| demand(i, 3e9, 1.0)).collect();
        assert!(matches!(bisect_allocate(&heavy, 20e9, 1e-12, &up()), Err(MecError::CapacityExhausted { .. })));
    }

    #[test]
    fn demand_decreases_in_multiplier() {
        let mut rng = SeedTree::new(8).stream(Purpose::Harness, 0, 0);
        for _ in 0..50 {
            let d = demand(0, rng.random_range(1e8..3e9), rng.random_range(0.6..1.9));
            let mut prev = f64::INFINITY;
            let mut g = 1e-14;
            while g < 1.0 {
                let f = closed_form_share(&d, g, &up()).unwrap();
                assert!(f < prev);
                prev = f;
                g *= 1.5;
            }
        }
    }

    #[test]
    fn kkt_certificate_on_random_sets() {
        let mut rng = SeedTree::new(21).stream(Purpose::Harness, 0, 0);
        for _ in 0..200 {
            let n = rng.random_range(1..=6);
            let ds: alloc::vec::Vec<_> =
                (0..n).map(|i| demand(i, rng.random_range(1e8..3e9), rng.random_range(0.8..1.9))).collect();
            let cap = rng.random_range(5e9..40e9);
            let a = match bisect_allocate(&ds, cap, 1e-12, &up()) {
                Ok(a) => a,
                Err(MecError::CapacityExhausted { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(a.total_hz <= cap * (1.0 + 1e-12));
            for (d, &f) in ds.iter().zip(&a.shares_hz) {
                assert!(f > 0.0 && f <= cap);
                assert!(stationarity_residual(d, f, a.multiplier, &up()) < 1e-6);
            }
            let slack = a.multiplier * (cap - a.total_hz) / (up().mec_price_per_hz * cap);
            assert!(slack.abs() < 1e-6, "slackness {slack}");
            // local optimality probe on each share
            for i in 0..n {
                let mut probe = a.shares_hz.clone();
                let best = ds[i].outcome(probe[i], &up()).objective;
                for s in [0.99, 1.01] {
                    probe[i] = a.shares_hz[i] * s;
                    if a.multiplier == 0.0 || s < 1.0 {
                        assert!(ds[i].outcome(probe[i], &up()).objective < best);
                    }
                }
            }
        }
    }

    #[test]
    fn even_split_shares() {
        let ds: alloc::vec::Vec<_> = (0..4).map(|i| demand(i, 1e9, 1.4)).collect();
        let a = even_split(&ds, 30e9);
        assert!(a.shares_hz.iter().all(|&s| s == 7.5e9));
    }
}
