use std::f64::consts::PI;
use std::path::Path;

use skyfog::config::{load_config, load_scenario, parse_config, ConfigError};
use skyfog_core::ScenarioConfig;

fn table1_path() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/table1.toml"))
}

#[test]
fn empty_document_is_the_default_scenario() {
    assert_eq!(parse_config("", "empty").unwrap(), ScenarioConfig::default());
}

#[test]
fn spelled_out_defaults_match_built_in_defaults() {
    assert_eq!(load_config(table1_path()).unwrap(), ScenarioConfig::default());
}

#[test]
fn edge_capacity_subchannels_and_beamwidth_echo() {
    let text = "[euav]\nF_u_max = 30\n[cuav]\nK_n = 5\n[channel]\nPsi = 0.7853981633974483\n";
    let s = load_scenario(text).unwrap();
    assert_eq!(s.euav.max_freq_hz, 30e9);
    assert!(s.cuavs.iter().all(|c| c.subchannels == 5));
    assert_eq!(s.config.channel.beamwidth_half_rad, PI / 4.0);
}

#[test]
fn units_are_converted() {
    let cfg = parse_config("[task]\nD_n = 2\n[utility]\nrho_0 = 0.002\n[channel]\nB = 100\n", "t").unwrap();
    assert_eq!(cfg.tasks.data_bits.lo, 2e6);
    assert_eq!(cfg.tasks.data_bits.hi, 2e6);
    assert!((cfg.utility.mec_price_per_hz - 2e-12).abs() < 1e-27);
    assert_eq!(cfg.channel.bandwidth_hz, 1e5);
}

#[test]
fn parse_errors_carry_line_context() {
    let err = parse_config("seed = 1\n[area]\nside_m = \"wide\"\n", "bad.toml").unwrap_err();
    match &err {
        ConfigError::Parse { origin, line, .. } => {
            assert_eq!(origin, "bad.toml");
            assert_eq!(*line, 3);
        }
        other => panic!("{other:?}"),
    }
    assert!(err.to_string().contains("line 3"));
}

#[test]
fn unknown_keys_are_rejected() {
    let err = parse_config("[ga]\ngenerations = 5\n", "x").unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
}

#[test]
fn invariant_violations_name_the_field() {
    let err = parse_config("[utility]\nalpha_n = 0.5\nbeta_n = 0.1\n", "x").unwrap_err();
    assert!(matches!(&err, ConfigError::Invariant(e) if e.field == "utility.alpha_n"), "{err}");
    let err = parse_config("[area]\nnum_cuavs = 0\n", "x").unwrap_err();
    assert!(err.to_string().contains("area.num_cuavs"));
}

#[test]
fn missing_file_names_the_path() {
    let err = load_config(Path::new("/definitely/not/here.toml")).unwrap_err();
    assert!(err.to_string().contains("/definitely/not/here.toml"));
}
