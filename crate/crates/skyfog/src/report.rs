//! CSV tables.
//!
//! Per-run table, one row per slot plus a final `summary` row:
//!
//! `slot,policy,system_utility,avg_delay_s,total_energy_j,n_local,n_mec,n_veh,drops`
//!
//! Mode counts include dropped tasks, so `n_local + n_mec + n_veh` is the
//! slot's task count. The summary row holds the time-averaged system
//! utility, the delay averaged over every task of the run, and the summed
//! energy, mode counts and drops; all of it can be recomputed from the slot
//! rows. Dropped tasks enter the delay average at their deadline.
//!
//! Sweep table, one row per grid value, policy and seed:
//!
//! `param_value,policy,seed,tsu,avg_delay,energy`
//!
//! Files are UTF-8, comma-separated, with a header row. Numbers use the
//! shortest representation that reads back to the same `f64`.

use std::io::Write;

use skyfog_core::{Mode, RunResult, SlotMetrics};

pub const RUN_HEADER: [&str; 9] =
    ["slot", "policy", "system_utility", "avg_delay_s", "total_energy_j", "n_local", "n_mec", "n_veh", "drops"];

pub const SWEEP_HEADER: [&str; 6] = ["param_value", "policy", "seed", "tsu", "avg_delay", "energy"];

fn slot_row(policy: &str, m: &SlotMetrics) -> [String; 9] {
    [
        m.slot.to_string(),
        policy.to_string(),
        m.system_utility.to_string(),
        m.avg_delay_s().to_string(),
        m.total_energy_j().to_string(),
        m.mode_count(Mode::Local).to_string(),
        m.mode_count(Mode::Mec).to_string(),
        m.mode_count(Mode::Veh).to_string(),
        m.dropped_count.to_string(),
    ]
}

pub fn write_run<W: Write>(out: W, run: &RunResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_HEADER)?;
    let policy = run.policy.as_str();
    for m in &run.slots {
        w.write_record(slot_row(policy, m))?;
    }
    let count = |mode| run.slots.iter().map(|m| m.mode_count(mode)).sum::<usize>().to_string();
    w.write_record([
        "summary".to_string(),
        policy.to_string(),
        run.time_avg_system_utility.to_string(),
        run.avg_completion_delay_s.to_string(),
        run.total_energy_j.to_string(),
        count(Mode::Local),
        count(Mode::Mec),
        count(Mode::Veh),
        run.drops.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn run_csv(run: &RunResult) -> String {
    let mut buf = Vec::new();
    write_run(&mut buf, run).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_value: f64,
    pub policy: skyfog_core::Policy,
    pub seed: u64,
    pub tsu: f64,
    pub avg_delay: f64,
    pub energy: f64,
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.param_value.to_string(),
            r.policy.as_str().to_string(),
            r.seed.to_string(),
            r.tsu.to_string(),
            r.avg_delay.to_string(),
            r.energy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_sweep(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use skyfog_core::{run_horizon, Policy, Scenario, ScenarioConfig};

    #[test]
    fn summary_recomputes_from_slot_rows() {
        let s = Scenario::new(ScenarioConfig { slots: 7, seed: 3, ..ScenarioConfig::default() }).unwrap();
        let run = run_horizon(&s, Policy::Emc);
        let text = run_csv(&run);
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), RUN_HEADER.to_vec());
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 8);
        let num = |r: &csv::StringRecord, i: usize| r[i].parse::<f64>().unwrap();
        let slots = &rows[..7];
        let summary = &rows[7];
        assert_eq!(&summary[0], "summary");
        let tsu = slots.iter().map(|r| num(r, 2)).sum::<f64>() / 7.0;
        assert!((tsu - num(summary, 2)).abs() < 1e-12);
        let tasks: Vec<f64> = slots.iter().map(|r| num(r, 5) + num(r, 6) + num(r, 7)).collect();
        let delay = slots.iter().zip(&tasks).map(|(r, n)| num(r, 3) * n).sum::<f64>() / tasks.iter().sum::<f64>();
        assert!((delay - num(summary, 3)).abs() < 1e-12);
        let energy: f64 = slots.iter().map(|r| num(r, 4)).sum();
        assert!((energy - num(summary, 4)).abs() < 1e-9);
        let drops: f64 = slots.iter().map(|r| num(r, 8)).sum();
        assert_eq!(drops, num(summary, 8));
    }

    #[test]
    fn floats_round_trip() {
        let row =
            SweepRow { param_value: 0.1, policy: Policy::Elc, seed: 4, tsu: 1.0 / 3.0, avg_delay: 2.5e-7, energy: 0.0 };
        let text = sweep_csv(std::slice::from_ref(&row));
        let line = text.lines().nth(1).unwrap();
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3].parse::<f64>().unwrap(), row.tsu);
        assert_eq!(cells[4].parse::<f64>().unwrap(), row.avg_delay);
    }
}
