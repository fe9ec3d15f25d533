//! End-to-end acceptance run. Criteria execute one after another inside a
//! single test so the timing checks are not disturbed by sibling tests.
//! Each prints one PASS/FAIL line; the test fails if any criterion does.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use skyfog::bench::{bench, loglog_slope};
use skyfog::instances::{fog_instance, game_instance};
use skyfog::oracle::{best_subset_delay, equalized_delay, potential_residual};
use skyfog::report::SweepRow;
use skyfog::sweep::{sweep, SweepParam};
use skyfog::verify::{mec_suite, poa_suite, vfc_suite, Check};
use skyfog_core::engine::slot_game;
use skyfog_core::vfc::select_fog_nodes;
use skyfog_core::{Policy, Scenario, ScenarioConfig, World};

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed(limit: Option<Duration>, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = body();
    let took = start.elapsed();
    out.detail = format!("{}; {:.1}s", out.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            out.passed = false;
            out.detail.push_str(&format!(" exceeds the {}s budget", limit.as_secs()));
        }
    }
    out
}

fn checks_outcome(checks: &[Check]) -> Outcome {
    Outcome {
        passed: checks.iter().all(Check::passed),
        detail: checks.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | "),
    }
}

fn potential_identity() -> Outcome {
    let cfg = ScenarioConfig::default();
    let mut check = Check::new("potential-identity", 1e-9);
    for seed in 0..60 {
        check.record(seed, potential_residual(&game_instance(seed, 3, &cfg)));
    }
    checks_outcome(&[check])
}

fn game_convergence() -> Outcome {
    let mut capped = Vec::new();
    let mut flat_steps = 0usize;
    let mut unstable = 0usize;
    let mut max_rounds = 0usize;
    let mut games = 0usize;
    for n in [5, 10, 15, 20] {
        for seed in 0..100u64 {
            // one random instance and one real slot per seed and size
            let cfg = ScenarioConfig {
                seed,
                layout: skyfog_core::scenario::LayoutParams { num_cuavs: n, ..Default::default() },
                ..Default::default()
            };
            let world = World::new(Scenario::new(cfg.clone()).unwrap());
            let real = slot_game(&world, Policy::Mvtora).unwrap();
            for game in [game_instance(seed, n, &cfg), real] {
                games += 1;
                match game.run() {
                    Ok(out) => {
                        max_rounds = max_rounds.max(out.rounds);
                        flat_steps += out.steps.iter().filter(|s| !s.raises_potential()).count();
                        if !game.is_stable(&out.profile) {
                            unstable += 1;
                        }
                    }
                    Err(_) => capped.push((n, seed)),
                }
            }
        }
    }
    Outcome {
        passed: capped.is_empty() && flat_steps == 0 && unstable == 0,
        detail: format!(
            "{games} games, capped {:?}, non-increasing steps {flat_steps}, unstable ends {unstable}, max rounds {max_rounds}",
            capped
        ),
    }
}

fn selection_dominance() -> Outcome {
    let mut violations = Vec::new();
    for seed in 0..100 {
        let inst = fog_instance(seed);
        let chosen = select_fog_nodes(&inst.task, &inst.candidates, inst.max_nodes).unwrap();
        let ours = equalized_delay(&inst.task, &chosen);
        let best = best_subset_delay(&inst.task, &inst.candidates, inst.max_nodes);
        if ours > best * (1.0 + 1e-12) {
            violations.push(seed);
        }
    }
    Outcome { passed: violations.is_empty(), detail: format!("100 instances of 3 from 8, violations {violations:?}") }
}

type Metrics = (u64, u64, u64);

fn bits(r: &SweepRow) -> Metrics {
    (r.tsu.to_bits(), r.avg_delay.to_bits(), r.energy.to_bits())
}

/// Rows keyed by (policy, seed), each holding its values along the grid in order.
fn by_policy_seed(rows: &[SweepRow]) -> BTreeMap<(&'static str, u64), Vec<&SweepRow>> {
    let mut map: BTreeMap<(&'static str, u64), Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        map.entry((r.policy.as_str(), r.seed)).or_default().push(r);
    }
    map
}

fn invariant(rows: &[SweepRow], policy: Policy) -> Vec<u64> {
    by_policy_seed(rows)
        .into_iter()
        .filter(|((p, _), v)| *p == policy.as_str() && v.windows(2).any(|w| bits(w[0]) != bits(w[1])))
        .map(|((_, s), _)| s)
        .collect()
}

fn trends() -> Outcome {
    let base = ScenarioConfig { slots: 100, ..ScenarioConfig::default() };
    let seeds: Vec<u64> = (1..=10).collect();
    let mut notes = Vec::new();
    let mut passed = true;

    // (a) and (b), (c): the edge-capacity grid includes the default 30 GHz
    let freq = sweep(&base, SweepParam::EuavFreq, &[10.0, 20.0, 30.0, 40.0], &Policy::ALL, &seeds).unwrap();
    let at_default: Vec<&SweepRow> = freq.iter().filter(|r| r.param_value == 30.0).collect();
    let mut beaten = Vec::new();
    let mut margin = f64::INFINITY;
    for &seed in &seeds {
        let tsu = |p: Policy| at_default.iter().find(|r| r.seed == seed && r.policy == p).unwrap().tsu;
        let ours = tsu(Policy::Mvtora);
        for p in [Policy::Elc, Policy::Emc, Policy::Vto, Policy::Mto, Policy::Todo] {
            margin = margin.min(ours - tsu(p));
            if ours <= tsu(p) {
                beaten.push((seed, p.as_str()));
            }
        }
    }
    passed &= beaten.is_empty();
    notes.push(format!(
        "(a) MVTORA above every baseline on all seeds: {} (min margin {margin:.4}, losses {beaten:?})",
        beaten.is_empty()
    ));

    let moved: Vec<_> = [Policy::Elc, Policy::Vto].into_iter().flat_map(|p| invariant(&freq, p)).collect();
    passed &= moved.is_empty();
    notes.push(format!("(b) ELC, VTO unchanged over capacity: {} (seeds changed {moved:?})", moved.is_empty()));

    let mut not_decreasing = Vec::new();
    for ((p, seed), series) in by_policy_seed(&freq) {
        if p == "emc" && !series.windows(2).all(|w| w[1].avg_delay < w[0].avg_delay) {
            not_decreasing.push(seed);
        }
    }
    passed &= not_decreasing.is_empty();
    notes.push(format!(
        "(c) EMC delay decreasing in capacity: {} (violating seeds {not_decreasing:?})",
        not_decreasing.is_empty()
    ));

    // (d)
    let veh = sweep(
        &base,
        SweepParam::VehDensity,
        &[100.0, 200.0, 300.0, 400.0],
        &[Policy::Elc, Policy::Emc, Policy::Mto],
        &seeds,
    )
    .unwrap();
    let moved: Vec<_> = [Policy::Elc, Policy::Emc, Policy::Mto].into_iter().flat_map(|p| invariant(&veh, p)).collect();
    passed &= moved.is_empty();
    notes.push(format!(
        "(d) ELC, EMC, MTO unchanged over vehicle density: {} (seeds changed {moved:?})",
        moved.is_empty()
    ));

    // (e) mean over seeds at each light density
    let policies = [Policy::Elc, Policy::Mvtora, Policy::Mto, Policy::Vto, Policy::Todo];
    let light = sweep(&base, SweepParam::TaskDensity, &[100.0, 200.0, 300.0], &policies, &seeds).unwrap();
    let mut worst: f64 = 0.0;
    let mut far = Vec::new();
    for density in [100.0, 200.0, 300.0] {
        let mean = |p: Policy| {
            let v: Vec<f64> =
                light.iter().filter(|r| r.param_value == density && r.policy == p).map(|r| r.tsu).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let elc = mean(Policy::Elc);
        for p in &policies[1..] {
            let rel = (mean(*p) - elc).abs() / elc.abs();
            worst = worst.max(rel);
            if rel > 0.10 {
                far.push((density, p.as_str(), rel));
            }
        }
    }
    passed &= far.is_empty();
    notes.push(format!(
        "(e) within 10% of ELC at density <= 300: {} (worst {:.2}%, outside {far:?})",
        far.is_empty(),
        100.0 * worst
    ));

    Outcome { passed, detail: notes.join("; ") }
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 4] = [
        &["run", "--policy", "mvtora", "--slots", "8", "--seed", "7"],
        &["run", "--policy", "todo", "--slots", "8", "--seed", "7"],
        &["sweep", "--param", "task-density", "--grid", "200,800", "--seeds", "2", "--slots", "4"],
        &["poa", "--trials", "4", "--seed", "9"],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let run = || Command::new(env!("CARGO_BIN_EXE_skyfog")).args(args).output().unwrap();
        let (a, b) = (run(), run());
        if !(a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty()) {
            differing.push(args.join(" "));
        }
    }
    Outcome {
        passed: differing.is_empty(),
        detail: format!("{} commands repeated, differing {differing:?}", commands.len()),
    }
}

fn complexity() -> Outcome {
    let sizes = [5, 10, 15, 20, 25, 30, 35, 40];
    let points = bench(&ScenarioConfig::default(), &sizes, 10, Policy::Mvtora).unwrap();
    let slope = loglog_slope(&points);
    let per_n: Vec<String> = points.iter().map(|p| format!("{}:{:.2}ms", p.cuavs, 1e3 * p.secs_per_round)).collect();
    Outcome {
        passed: slope <= 1.5,
        detail: format!("log-log slope {slope:.3} (limit 1.5), time per round {}", per_n.join(" ")),
    }
}

type Criterion = Box<dyn FnOnce() -> Outcome>;

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("exact potential identity", Box::new(|| timed(Some(Duration::from_secs(10)), potential_identity))),
        ("game convergence", Box::new(|| timed(None, game_convergence))),
        (
            "MEC allocation optimality",
            Box::new(|| {
                timed(Some(Duration::from_secs(30)), || checks_outcome(&mec_suite(&ScenarioConfig::default(), 100)))
            }),
        ),
        ("fog selection dominance", Box::new(|| timed(None, selection_dominance))),
        (
            "GA division quality",
            Box::new(|| {
                timed(Some(Duration::from_secs(60)), || {
                    let checks: Vec<Check> = vfc_suite(&ScenarioConfig::default(), 100)
                        .into_iter()
                        .filter(|c| c.name != "vfc/selection-dominance")
                        .collect();
                    checks_outcome(&checks)
                })
            }),
        ),
        (
            "price of anarchy bounds",
            Box::new(|| timed(None, || checks_outcome(&poa_suite(&ScenarioConfig::default(), 30)))),
        ),
        ("policy trends", Box::new(|| timed(Some(Duration::from_secs(300)), trends))),
        ("determinism", Box::new(|| timed(None, determinism))),
        ("per-round time scaling", Box::new(|| timed(None, complexity))),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let out = run();
        println!("{} criterion {}: {name}: {}", if out.passed { "PASS" } else { "FAIL" }, i + 1, out.detail);
        if !out.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
