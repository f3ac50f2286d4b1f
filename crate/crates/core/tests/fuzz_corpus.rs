//! Replays the checked-in fuzz seeds through the parsers with the same
//! assertions as the fuzz targets.

use std::fs;
use std::path::PathBuf;

use dche::floquet::{MultiplicativeSolution, SolutionDump};
use dche::model::parse_complex;
use dche::validation::parse_fixture;
use dche::DcheParams;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn params_seeds() {
    let mut accepted = 0;
    for (name, s) in seeds("params_json") {
        if let Ok(p) = DcheParams::from_json(&s) {
            assert_eq!(DcheParams::from_json(&p.to_json()).unwrap(), p, "{name}");
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn solution_seeds() {
    let params = DcheParams::from_real([-1.0, 0.8, 1.24, 0.6, -0.25]).unwrap();
    let mut accepted = 0;
    for (_, s) in seeds("solution_json") {
        if let Ok(d) = SolutionDump::from_json(&s) {
            if let Ok(w) = MultiplicativeSolution::from_dump(&d, params, 1) {
                let _ = w.residual();
                let _ = w.shifted(1);
            }
            accepted += 1;
        }
    }
    assert_eq!(accepted, 1);
}

#[test]
fn fixture_seeds() {
    let results: Vec<(String, bool)> = seeds("fixture_json")
        .into_iter()
        .map(|(name, s)| (name, parse_fixture(&s).is_ok()))
        .collect();
    for (name, ok) in results {
        assert_eq!(ok, name != "bad_table.json", "{name}");
    }
}

#[test]
fn complex_arg_seeds() {
    for (name, s) in seeds("complex_arg") {
        let r = parse_complex(&s);
        let expect_ok = matches!(name.as_str(), "real.txt" | "pair.txt" | "spaces.txt");
        assert_eq!(r.is_ok(), expect_ok, "{name}: {r:?}");
        if let Ok(z) = r {
            assert_eq!(parse_complex(&format!("{},{}", z.re, z.im)).unwrap(), z);
        }
    }
}
