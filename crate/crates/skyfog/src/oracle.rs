//! Slow reference solvers the fast ones are checked against.
//!
//! These share the model formulas with the library only through plain
//! arithmetic written out here; none of them calls a library solver.

use skyfog_core::cost::FogLink;
use skyfog_core::game::SlotGame;
use skyfog_core::mec::MecDemand;
use skyfog_core::scenario::UtilityParams;
use skyfog_core::{Mode, Task};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_max(mut lo: f64, mut hi: f64, iterations: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iterations {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        }
    }
    let mut best = (a, fa);
    for x in [b, lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// MEC utility formula at share `f`, negative infinity outside the log domain.
pub fn mec_objective(d: &MecDemand, f: f64, up: &UtilityParams) -> f64 {
    let tx = d.task.data_bits / d.rate_bps;
    let arg = up.log_offset + d.task.deadline_s - tx - d.task.data_bits * d.task.cycles_per_bit / f;
    if !(f > 0.0 && arg > 0.0) {
        return f64::NEG_INFINITY;
    }
    up.delay_weight * arg.ln() - up.energy_weight * d.tx_power_w * tx - up.mec_price_per_hz * f
}

#[derive(Debug, Clone, PartialEq)]
pub struct MecReference {
    pub shares_hz: Vec<f64>,
    pub objective: f64,
}

/// Reference MEC allocation.
///
/// Each share is first maximized on its own over `(floor, capacity]`. If
/// those shares do not fit, the capacity is split in proportion to the
/// wanted excess over the floors and then polished by repeated pairwise
/// transfers, each chosen by golden-section search. The objective is
/// separable and concave, so no pairwise transfer improving it means the
/// point is optimal.
pub fn mec_reference(demands: &[MecDemand], capacity_hz: f64, up: &UtilityParams) -> MecReference {
    let obj = |i: usize, f: f64| mec_objective(&demands[i], f, up);
    let floors: Vec<f64> = demands
        .iter()
        .map(|d| {
            let head = up.log_offset + d.task.deadline_s - d.task.data_bits / d.rate_bps;
            d.task.data_bits * d.task.cycles_per_bit / head
        })
        .collect();
    let wanted: Vec<f64> =
        (0..demands.len()).map(|i| golden_max(floors[i] * (1.0 + 1e-12), capacity_hz, 200, |f| obj(i, f)).0).collect();
    let total = |s: &[f64]| (0..s.len()).map(|i| obj(i, s[i])).sum::<f64>();
    if wanted.iter().sum::<f64>() <= capacity_hz {
        return MecReference { objective: total(&wanted), shares_hz: wanted };
    }

    let slack = capacity_hz - floors.iter().sum::<f64>();
    let excess: Vec<f64> = wanted.iter().zip(&floors).map(|(w, f)| w - f).collect();
    let excess_sum: f64 = excess.iter().sum();
    let mut shares: Vec<f64> = floors.iter().zip(&excess).map(|(f, e)| f + slack * e / excess_sum).collect();
    let mut current = total(&shares);
    for _ in 0..500 {
        let before = current;
        for i in 0..shares.len() {
            for j in (i + 1)..shares.len() {
                // move t from j to i; both must stay above their floors
                let lo = floors[i] - shares[i];
                let hi = shares[j] - floors[j];
                let (fi, fj) = (shares[i], shares[j]);
                let pair = |t: f64| obj(i, fi + t) + obj(j, fj - t);
                let (t, v) = golden_max(lo, hi, 120, pair);
                if v > pair(0.0) {
                    shares[i] = fi + t;
                    shares[j] = fj - t;
                }
            }
        }
        current = total(&shares);
        if current - before <= 1e-15 * current.abs().max(1.0) {
            break;
        }
    }
    MecReference { objective: current, shares_hz: shares }
}

/// Full-task transfer plus execution time on one link.
pub fn full_task_time(task: &Task, link: &FogLink) -> f64 {
    task.data_bits / link.rate_bps + task.data_bits * task.cycles_per_bit / link.freq_hz
}

/// Completion delay when the division makes every selected node finish at
/// the same moment: `1 / Σ 1/p_j`.
pub fn equalized_delay(task: &Task, links: &[FogLink]) -> f64 {
    1.0 / links.iter().map(|l| 1.0 / full_task_time(task, l)).sum::<f64>()
}

/// Smallest equalized delay over every `k`-subset of `candidates`, by brute force.
pub fn best_subset_delay(task: &Task, candidates: &[FogLink], k: usize) -> f64 {
    let n = candidates.len();
    let k = k.min(n);
    let mut best = f64::INFINITY;
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let subset: Vec<FogLink> = pick.iter().map(|&i| candidates[i]).collect();
        best = best.min(equalized_delay(task, &subset));
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&p| pick[p] < n - k + p) else { break };
        pick[pos] += 1;
        for q in pos + 1..k {
            pick[q] = pick[q - 1] + 1;
        }
    }
    best
}

/// VFC utility formula for a division, negative infinity outside the log domain.
pub fn division_value(task: &Task, division: &[f64], links: &[FogLink], up: &UtilityParams) -> f64 {
    let mut delay: f64 = 0.0;
    let mut energy = 0.0;
    for (&x, l) in division.iter().zip(links) {
        if x > 0.0 {
            delay = delay.max(x * full_task_time(task, l));
            energy += l.tx_power_w * x * task.data_bits / l.rate_bps;
        }
    }
    let arg = up.log_offset + task.deadline_s - delay;
    if arg > 0.0 {
        up.delay_weight * arg.ln() - up.energy_weight * energy
    } else {
        f64::NEG_INFINITY
    }
}

/// Every point of the simplex in `k` dimensions with coordinates on a
/// `1/steps` lattice.
pub fn simplex_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    fn fill(k: usize, left: usize, steps: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if prefix.len() + 1 == k {
            prefix.push(left);
            out.push(prefix.iter().map(|&c| c as f64 / steps as f64).collect());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            fill(k, left - c, steps, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        fill(k, steps, steps, &mut Vec::new(), &mut out);
    }
    out
}

/// Cheapest-energy division whose slowest node finishes by `level` seconds:
/// a fractional knapsack filling nodes in order of joules per unit share.
fn division_at_level(task: &Task, links: &[FogLink], level: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..links.len()).collect();
    let joules = |l: &FogLink| l.tx_power_w * task.data_bits / l.rate_bps;
    order.sort_by(|&a, &b| joules(&links[a]).total_cmp(&joules(&links[b])));
    let mut division = vec![0.0; links.len()];
    let mut left = 1.0;
    for i in order {
        let cap = (level / full_task_time(task, &links[i])).min(1.0);
        let take = cap.min(left);
        division[i] = take;
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    division
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisionReference {
    pub division: Vec<f64>,
    pub objective: f64,
}

/// Reference division: the best point of the 0.01 simplex lattice, then
/// polished by searching over the completion-delay level. For a fixed level
/// the energy-minimal division is a fractional knapsack; over the level the
/// objective is concave, so golden-section search finds the optimum.
pub fn division_reference(task: &Task, links: &[FogLink], up: &UtilityParams) -> DivisionReference {
    let mut best = DivisionReference { division: Vec::new(), objective: f64::NEG_INFINITY };
    for point in simplex_grid(links.len(), 100) {
        let v = division_value(task, &point, links, up);
        if v > best.objective || best.division.is_empty() {
            best = DivisionReference { division: point, objective: v };
        }
    }
    let fastest = equalized_delay(task, links);
    let slowest = links.iter().map(|l| full_task_time(task, l)).fold(0.0, f64::max);
    let value = |level: f64| division_value(task, &division_at_level(task, links, level), links, up);
    let (level, v) = golden_max(fastest, slowest, 200, value);
    if v > best.objective {
        best = DivisionReference { division: division_at_level(task, links, level), objective: v };
    }
    best
}

/// Largest gap `|ΔU_n − ΔF|` over every profile and every unilateral
/// deviation, where `F` is the game's potential as seen by the deviator.
/// Moves between two infinite values with the same sign count as exact.
pub fn potential_residual(game: &SlotGame) -> f64 {
    let n = game.len();
    let mut worst: f64 = 0.0;
    for profile in skyfog_core::game::all_profiles(n) {
        let u = game.utilities(&profile);
        for dev in 0..n {
            let f_before = game.potential(&profile, dev);
            for &m in Mode::ALL.iter().filter(|&&m| m != profile[dev]) {
                let mut moved = profile.clone();
                moved[dev] = m;
                let du = game.utilities(&moved)[dev] - u[dev];
                let df = game.potential(&moved, dev) - f_before;
                let gap = if du == df { 0.0 } else { (du - df).abs() };
                worst = if gap.is_nan() { f64::NAN } else { worst.max(gap) };
                if worst.is_nan() {
                    return worst;
                }
            }
        }
    }
    worst
}
