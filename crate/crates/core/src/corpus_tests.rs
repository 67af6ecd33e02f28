//! Replays the checked-in fuzz corpus through the invariants the fuzz
//! targets assert, so the seeds stay meaningful without a nightly toolchain.

use std::fs;
use std::path::PathBuf;

use crate::io::{
    parse_grid, read_csv, read_csv_str, read_params, read_report, write_report, write_series_csv,
};
use crate::models::{evaluate, ModelId};
use crate::scenarios::Scenario;

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut paths: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds for {target}");
    paths.into_iter().map(|p| fs::read(p).unwrap()).collect()
}

#[test]
fn read_csv_seeds() {
    let mut accepted = 0;
    for data in seeds("read_csv") {
        if let Ok(series) = read_csv(data.as_slice()) {
            assert_eq!(read_csv_str(&write_series_csv(&series)).unwrap(), series);
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn scenario_config_seeds() {
    let mut accepted = 0;
    for data in seeds("scenario_config") {
        let (&selector, rest) = data.split_first().unwrap();
        let name = Scenario::NAMES[selector as usize % Scenario::NAMES.len()];
        if let Ok(s) = Scenario::from_json(name, std::str::from_utf8(rest).unwrap()) {
            for t in [0.0, 0.5, 12.0, 123.0] {
                let _ = s.value(t);
            }
            accepted += 1;
        }
    }
    assert!(accepted >= 5);
}

#[test]
fn params_json_seeds() {
    let mut accepted = 0;
    for data in seeds("params_json") {
        let (&selector, rest) = data.split_first().unwrap();
        let model = ModelId::ALL[selector as usize % ModelId::ALL.len()];
        if let Ok(p) = read_params(model, std::str::from_utf8(rest).unwrap()) {
            assert_eq!(p.values().len(), model.k());
            for t in [-1.0, 0.0, 1.0, 50.0] {
                let _ = evaluate(&p, t);
            }
            accepted += 1;
        }
    }
    assert!(accepted >= 5);
}

#[test]
fn read_report_seeds() {
    for data in seeds("read_report") {
        let report = read_report(std::str::from_utf8(&data).unwrap()).unwrap();
        let written = write_report(&report);
        assert_eq!(read_report(&written).unwrap(), report);
    }
}

#[test]
fn parse_grid_seeds() {
    let mut accepted = 0;
    for data in seeds("parse_grid") {
        if let Ok(grid) = parse_grid(std::str::from_utf8(&data).unwrap()) {
            assert!(grid.len() >= 3 && grid.windows(2).all(|w| w[0] < w[1]));
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}
