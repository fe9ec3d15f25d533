//! Vehicle fog computing: fog-node selection by preference value and task
//! division across the selected vehicles with an elitist real-coded GA.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::cost::{vfc_outcome, FogLink, ModeOutcome};
use crate::scenario::{GaParams, Task, UtilityParams};

/// Time to ship and run the whole task on one vehicle. Lower is better.
pub fn preference(task: &Task, rate_bps: f64, freq_hz: f64) -> f64 {
    if !(freq_hz > 0.0 && rate_bps > 0.0) {
        return f64::INFINITY;
    }
    task.data_bits / rate_bps + task.cycles() / freq_hz
}

pub fn link_preference(task: &Task, link: &FogLink) -> f64 {
    preference(task, link.rate_bps, link.freq_hz)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no usable fog vehicle in range")]
pub struct NoFogNodes;

/// The `max_nodes` candidates with the smallest preference value, ties
/// broken by vehicle id. Vehicles without idle capacity are never picked.
pub fn select_fog_nodes(task: &Task, candidates: &[FogLink], max_nodes: usize) -> Result<Vec<FogLink>, NoFogNodes> {
    let mut ranked: Vec<(f64, FogLink)> =
        candidates.iter().map(|l| (link_preference(task, l), *l)).filter(|(p, _)| p.is_finite()).collect();
    if ranked.is_empty() || max_nodes == 0 {
        return Err(NoFogNodes);
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.vehicle.cmp(&b.1.vehicle)));
    ranked.truncate(max_nodes);
    Ok(ranked.into_iter().map(|(_, l)| l).collect())
}

/// Smooth VFC objective of a division; the GA fitness.
pub fn division_objective(task: &Task, division: &[f64], links: &[FogLink], up: &UtilityParams) -> f64 {
    vfc_outcome(task, division, links, up).objective
}

/// Scales `genes` onto the probability simplex in place. An all-zero vector
/// has no direction to keep and is redrawn uniformly first.
pub fn normalize<R: Rng + ?Sized>(genes: &mut [f64], rng: &mut R) {
    let mut sum: f64 = genes.iter().sum();
    while sum <= 0.0 || sum.is_nan() {
        for g in genes.iter_mut() {
            *g = rng.random::<f64>();
        }
        sum = genes.iter().sum();
    }
    for g in genes.iter_mut() {
        *g /= sum;
    }
}

/// Largest deviation from the simplex: sum off by one, or a gene outside [0, 1].
pub fn simplex_error(genes: &[f64]) -> f64 {
    let sum: f64 = genes.iter().sum();
    let spill = genes.iter().map(|&g| (-g).max(g - 1.0).max(0.0)).fold(0.0, f64::max);
    libm::fabs(sum - 1.0).max(spill)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaReport {
    pub division: Vec<f64>,
    pub objective: f64,
    /// Best-ever objective after each generation.
    pub best_per_generation: Vec<f64>,
    /// Worst simplex error seen in any individual of any generation.
    pub max_simplex_error: f64,
}

fn tournament<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> usize {
    let a = rng.random_range(0..fitness.len());
    let b = rng.random_range(0..fitness.len());
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if fitness[hi] > fitness[lo] {
        hi
    } else {
        lo
    }
}

fn argmax(fitness: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..fitness.len() {
        if fitness[i] > fitness[best] {
            best = i;
        }
    }
    best
}

fn argmin(fitness: &[f64]) -> usize {
    let mut worst = 0;
    for i in 1..fitness.len() {
        if fitness[i] < fitness[worst] {
            worst = i;
        }
    }
    worst
}

/// The division objective with the per-node constants hoisted out: a share
/// `x` on node `j` takes `x * pref[j]` seconds and `x * joules[j]` joules.
struct Fitness {
    pref: Vec<f64>,
    joules: Vec<f64>,
    headroom: f64,
    delay_weight: f64,
    energy_weight: f64,
}

impl Fitness {
    fn new(task: &Task, links: &[FogLink], up: &UtilityParams) -> Self {
        Self {
            pref: links.iter().map(|l| link_preference(task, l)).collect(),
            joules: links.iter().map(|l| l.tx_power_w * task.data_bits / l.rate_bps).collect(),
            headroom: up.log_offset + task.deadline_s,
            delay_weight: up.delay_weight,
            energy_weight: up.energy_weight,
        }
    }

    fn eval(&self, genes: &[f64]) -> f64 {
        let mut delay: f64 = 0.0;
        let mut energy = 0.0;
        for ((&x, &p), &e) in genes.iter().zip(&self.pref).zip(&self.joules) {
            if x > 0.0 {
                delay = delay.max(x * p);
                energy += x * e;
            }
        }
        let arg = self.headroom - delay;
        if arg > 0.0 {
            self.delay_weight * libm::log(arg) - self.energy_weight * energy
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Divides `task` over `links` with a GA and returns the best division found.
pub fn ga_divide<R: Rng + ?Sized>(
    task: &Task,
    links: &[FogLink],
    ga: &GaParams,
    up: &UtilityParams,
    rng: &mut R,
) -> GaReport {
    assert!(!links.is_empty(), "GA needs at least one fog node");
    let k = links.len();
    if k == 1 {
        return GaReport {
            division: vec![1.0],
            objective: division_objective(task, &[1.0], links, up),
            best_per_generation: Vec::new(),
            max_simplex_error: 0.0,
        };
    }
    let fitness_fn = Fitness::new(task, links, up);

    // Individuals are stored back to back, `k` genes each.
    let size = ga.population.max(2);
    let mut pop = vec![0.0; size * k];
    let mut next = vec![0.0; size * k];
    for ind in pop.chunks_mut(k) {
        for g in ind.iter_mut() {
            *g = rng.random::<f64>();
        }
        normalize(ind, rng);
    }
    let mut fitness: Vec<f64> = pop.chunks(k).map(|g| fitness_fn.eval(g)).collect();
    let mut next_fit = vec![0.0; size];
    let mut parents = vec![0usize; size];
    let mut max_err = pop.chunks(k).map(simplex_error).fold(0.0, f64::max);
    let first = argmax(&fitness);
    let mut best = (pop[first * k..(first + 1) * k].to_vec(), fitness[first]);
    let mut elite = vec![0.0; k];
    let mut history = Vec::with_capacity(ga.generations);

    for _ in 0..ga.generations {
        let e = argmax(&fitness);
        elite.copy_from_slice(&pop[e * k..(e + 1) * k]);
        let elite_fit = fitness[e];

        for p in parents.iter_mut() {
            *p = tournament(&fitness, rng);
        }
        for (pair, out) in parents.chunks(2).zip(next.chunks_mut(2 * k)) {
            let a = &pop[pair[0] * k..(pair[0] + 1) * k];
            if pair.len() == 1 {
                out.copy_from_slice(a);
                continue;
            }
            let b = &pop[pair[1] * k..(pair[1] + 1) * k];
            let (c1, c2) = out.split_at_mut(k);
            if rng.random::<f64>() < ga.crossover_prob {
                let tau: f64 = rng.random();
                for j in 0..k {
                    c1[j] = tau * a[j] + (1.0 - tau) * b[j];
                    c2[j] = (1.0 - tau) * a[j] + tau * b[j];
                }
            } else {
                c1.copy_from_slice(a);
                c2.copy_from_slice(b);
            }
        }
        for (child, f) in next.chunks_mut(k).zip(next_fit.iter_mut()) {
            for g in child.iter_mut() {
                if rng.random::<f64>() < ga.mutation_prob {
                    *g = rng.random::<f64>();
                }
            }
            normalize(child, rng);
            *f = fitness_fn.eval(child);
        }

        let worst = argmin(&next_fit);
        next[worst * k..(worst + 1) * k].copy_from_slice(&elite);
        next_fit[worst] = elite_fit;
        core::mem::swap(&mut pop, &mut next);
        core::mem::swap(&mut fitness, &mut next_fit);

        max_err = pop.chunks(k).map(simplex_error).fold(max_err, f64::max);
        let top = argmax(&fitness);
        if fitness[top] > best.1 {
            best = (pop[top * k..(top + 1) * k].to_vec(), fitness[top]);
        }
        history.push(best.1);
    }

    let objective = division_objective(task, &best.0, links, up);
    GaReport { division: best.0, objective, best_per_generation: history, max_simplex_error: max_err }
}

/// Selected fog nodes, the division over them, and the resulting outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct FogPlan {
    pub links: Vec<FogLink>,
    pub division: Vec<f64>,
    pub outcome: ModeOutcome,
}

impl FogPlan {
    pub fn vehicles(&self) -> Vec<usize> {
        self.links.iter().map(|l| l.vehicle).collect()
    }
}

/// Node selection followed by GA division.
pub fn plan_vfc<R: Rng + ?Sized>(
    task: &Task,
    candidates: &[FogLink],
    max_nodes: usize,
    ga: &GaParams,
    up: &UtilityParams,
    rng: &mut R,
) -> Result<FogPlan, NoFogNodes> {
    let links = select_fog_nodes(task, candidates, max_nodes)?;
    let report = ga_divide(task, &links, ga, up, rng);
    let outcome = vfc_outcome(task, &report.division, &links, up);
    Ok(FogPlan { links, division: report.division, outcome })
}

/// Random fog nodes with an even division, as used by the TODO baseline.
pub fn plan_vfc_random<R: Rng + ?Sized>(
    task: &Task,
    candidates: &[FogLink],
    max_nodes: usize,
    up: &UtilityParams,
    rng: &mut R,
) -> Result<FogPlan, NoFogNodes> {
    if candidates.is_empty() || max_nodes == 0 {
        return Err(NoFogNodes);
    }
    let mut pool: Vec<FogLink> = candidates.to_vec();
    let take = max_nodes.min(pool.len());
    for i in 0..take {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(take);
    let division = vec![1.0 / take as f64; take];
    let outcome = vfc_outcome(task, &division, &pool, up);
    Ok(FogPlan { links: pool, division, outcome })
}
