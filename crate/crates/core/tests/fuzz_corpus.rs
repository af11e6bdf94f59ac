//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so the seeds stay meaningful on stable toolchains.

use std::fs;
use std::path::{Path, PathBuf};

use dwlab::dw_solver::SolveReport;
use dwlab::game_value::ValueCertificate;
use dwlab::harness::{read_calibration_csv, read_gap_csv, read_records_csv, SuiteConfig};
use dwlab::instance_gen::PackingInstance;
use dwlab::rational;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn parse_instance() {
    let mut parsed = 0;
    for (_, data) in corpus("parse_instance") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Ok(inst) = PackingInstance::from_json(text) {
            assert_eq!(PackingInstance::from_json(&inst.to_json()).unwrap(), inst);
            parsed += 1;
        }
    }
    assert!(parsed >= 3);
}

#[test]
fn parse_rational() {
    let mut parsed = 0;
    for (_, data) in corpus("parse_rational") {
        let Ok(text) = std::str::from_utf8(&data) else { continue };
        if let Some(r) = rational::parse(text) {
            assert_eq!(rational::parse(&rational::format(&r)), Some(r));
            parsed += 1;
        }
    }
    assert_eq!(parsed, 3);
}

#[test]
fn parse_solve_report() {
    let mut parsed = 0;
    for (p, data) in corpus("parse_solve_report") {
        let text = std::str::from_utf8(&data).unwrap();
        let report = SolveReport::from_json(text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(SolveReport::from_json(&report.to_json()).unwrap(), report);
        parsed += 1;
    }
    assert_eq!(parsed, 3);
}

#[test]
fn parse_certificate() {
    for (p, data) in corpus("parse_certificate") {
        let cert: ValueCertificate = serde_json::from_slice(&data).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let again: ValueCertificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
        assert_eq!(cert, again);
    }
}

#[test]
fn parse_experiment_config() {
    for (p, data) in corpus("parse_experiment_config") {
        let text = std::str::from_utf8(&data).unwrap();
        let cfg = if p.extension().is_some_and(|e| e == "json") {
            SuiteConfig::from_json(text)
        } else {
            SuiteConfig::from_toml(text)
        }
        .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        cfg.validate().unwrap();
        assert_eq!(cfg.digest().len(), 64);
    }
}

#[test]
fn parse_csv() {
    let mut parsed = 0;
    for (_, data) in corpus("parse_csv") {
        parsed += read_gap_csv(data.as_slice()).map_or(0, |r| r.len());
        parsed += read_calibration_csv(data.as_slice()).map_or(0, |r| r.len());
        parsed += read_records_csv(data.as_slice()).map_or(0, |r| r.len());
    }
    assert_eq!(parsed, 3);
}
