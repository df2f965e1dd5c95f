use std::fs;
use std::path::{Path, PathBuf};

use xlab_core::experiments::{list_experiments, run_experiment, write_result, ExperimentConfig};

fn config(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.json"));
    ExperimentConfig::from_json_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut v: Vec<_> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).map(|p| (p.clone(), fs::read(p).unwrap())).collect();
    v.sort();
    v.into_iter().map(|(p, b)| (PathBuf::from(p.file_name().unwrap()), b)).collect()
}

#[test]
fn every_shipped_config_passes() {
    for info in list_experiments() {
        let r = run_experiment(&config(info.name), false).unwrap();
        let failed: Vec<_> = r.assertions.iter().filter(|a| !a.pass).map(|a| &a.name).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", info.name);
        assert!(!r.assertions.is_empty(), "{} checks nothing", info.name);
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    for name in ["cycle-spectral", "sphere-k22", "noncompact-blocks"] {
        let cfg = config(name);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        write_result(&run_experiment(&cfg, false).unwrap(), a.path(), false).unwrap();
        write_result(&run_experiment(&cfg, false).unwrap(), b.path(), false).unwrap();
        let (fa, fb) = (files(a.path()), files(b.path()));
        assert!(fa.len() >= 2, "{name} wrote {fa:?}");
        assert_eq!(fa, fb, "{name} output differs between runs");
    }
}

#[test]
fn oracle_mode_reproduces_bundled_values() {
    let r = run_experiment(&config("noncompact-blocks"), true).unwrap();
    assert!(r.all_pass());
    let dir = tempfile::tempdir().unwrap();
    let written = write_result(&r, dir.path(), false).unwrap();
    assert!(written.iter().any(|p| p.ends_with("expectations.json")));
}
