use std::path::Path;
use std::process::{Command, Output};

fn skyfog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skyfog")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_is_byte_identical_for_a_seed() {
    let a = skyfog(&["run", "--policy", "elc", "--slots", "10", "--seed", "7"]);
    let b = skyfog(&["run", "--policy", "elc", "--slots", "10", "--seed", "7"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("slot,policy,system_utility,avg_delay_s,total_energy_j,n_local,n_mec,n_veh,drops\n"));
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().last().unwrap().starts_with("summary,elc,"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let to_file = skyfog(&["run", "--policy", "todo", "--slots", "4", "--seed", "3", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success(), "{}", stderr(&to_file));
    let to_stdout = skyfog(&["run", "--policy", "todo", "--slots", "4", "--seed", "3"]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

fn summary_tsu(csv: &str) -> f64 {
    let last = csv.lines().last().unwrap();
    last.split(',').nth(2).unwrap().parse().unwrap()
}

#[test]
fn mvtora_beats_local_only() {
    let m = skyfog(&["run", "--policy", "mvtora", "--slots", "20", "--seed", "5"]);
    let e = skyfog(&["run", "--policy", "elc", "--slots", "20", "--seed", "5"]);
    assert!(summary_tsu(&stdout(&m)) > summary_tsu(&stdout(&e)));
}

#[test]
fn missing_config_exits_2_naming_the_path() {
    let o = skyfog(&["run", "--config", "/no/such/scenario.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/scenario.toml"));
}

#[test]
fn inconsistent_weights_exit_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weights.toml");
    std::fs::write(&path, "[utility]\nalpha_n = 0.7\nbeta_n = 0.7\n").unwrap();
    let o = skyfog(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("utility.alpha_n"), "{}", stderr(&o));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.toml");
    std::fs::write(&path, "seed = 11\nslots = 2\n").unwrap();
    let from_file = skyfog(&["run", "--policy", "elc", "--config", path.to_str().unwrap()]);
    assert_eq!(stdout(&from_file).lines().count(), 4);
    let overridden =
        skyfog(&["run", "--policy", "elc", "--config", path.to_str().unwrap(), "--slots", "3", "--seed", "11"]);
    assert_eq!(stdout(&overridden).lines().count(), 5);
    // same seed, so the first two slot rows agree
    let (a, b) = (stdout(&from_file), stdout(&overridden));
    assert_eq!(a.lines().take(3).collect::<Vec<_>>(), b.lines().take(3).collect::<Vec<_>>());
}

#[test]
fn unknown_policy_and_param_are_usage_errors() {
    assert_eq!(skyfog(&["run", "--policy", "greedy"]).status.code(), Some(2));
    let o = skyfog(&["sweep", "--param", "bandwidth", "--grid", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bandwidth"));
}

#[test]
fn sweep_cross_product_and_determinism() {
    let args = [
        "sweep",
        "--param",
        "euav-freq",
        "--grid",
        "10,20,30",
        "--policies",
        "elc,emc",
        "--seeds",
        "2",
        "--slots",
        "3",
    ];
    let a = skyfog(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    let text = stdout(&a);
    assert_eq!(text.lines().next().unwrap(), "param_value,policy,seed,tsu,avg_delay,energy");
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 2);
    assert_eq!(skyfog(&args).stdout, a.stdout);
}

#[test]
fn vehicle_density_leaves_local_only_rows_unchanged() {
    let o = skyfog(&[
        "sweep",
        "--param",
        "veh-density",
        "--grid",
        "100,300",
        "--policies",
        "elc",
        "--slots",
        "5",
        "--seed",
        "4",
    ]);
    let rows: Vec<Vec<String>> =
        stdout(&o).lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][3..], rows[1][3..]);
}

#[test]
fn verify_passes_and_reports_each_check() {
    let o = skyfog(&["verify", "--suite", "mec", "--trials", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS mec/stationarity"));
    assert!(text.contains("0 failed"));
}

#[test]
fn poa_rows_respect_the_bounds() {
    let o = skyfog(&["poa", "--trials", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for line in stdout(&o).lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[4] <= cells[3] && cells[3] <= 1.0, "{line}");
    }
}

#[test]
fn example_scenario_runs() {
    let path = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/table1.toml"));
    let o = skyfog(&["run", "--config", path.to_str().unwrap(), "--slots", "2", "--policy", "vto"]);
    assert!(o.status.success(), "{}", stderr(&o));
}
