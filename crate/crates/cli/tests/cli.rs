use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crackfield::scenarios::{build, AxisSpec, BuiltinScenario, Density, Setup, Zone};

fn crackfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crackfield")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crackfield-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Through-cracked square on a coarse grid, two load steps.
fn small_scenario(dir: &Path) -> PathBuf {
    let mut spec = build(BuiltinScenario::ThroughCrackShear, Density::Coarse);
    let Setup::Fem(f) = &mut spec.setup else { unreachable!() };
    f.mesh.x = AxisSpec::uniform(10.0);
    f.mesh.y = AxisSpec { size: 10.0, zones: vec![Zone { from: 44.0, to: 56.0, size: 3.0 }], lines: vec![], grading: 0.5 };
    f.load.segments[0].step = 0.005;
    let path = dir.join("small.toml");
    fs::write(&path, spec.to_toml()).unwrap();
    path
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_model_is_a_usage_error() {
    let o = crackfield(&["run", "--scenario", "shear", "--model", "hookean"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown model 'hookean'"));
}

#[test]
fn run_needs_a_scenario() {
    let dir = scratch("none");
    let o = crackfield(&["--out-root", dir.to_str().unwrap(), "run"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_variational_model_is_refused() {
    let dir = scratch("ss1");
    let file = small_scenario(&dir);
    let out = dir.join("run");
    let o = crackfield(&["run", "--file", file.to_str().unwrap(), "--model", "ss1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("ss1"));
}

#[test]
fn invalid_scenario_file_names_the_field() {
    let dir = scratch("invalid");
    let file = small_scenario(&dir);
    let text = fs::read_to_string(&file).unwrap().replace("mu_gpa = 80.77", "mu_gpa = -80.77");
    fs::write(&file, text).unwrap();
    let o = crackfield(&["run", "--file", file.to_str().unwrap(), "--out", dir.join("run").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("material.mu_gpa"), "{}", stderr(&o));
}

#[test]
fn scenarios_list_names_every_builtin() {
    let o = crackfield(&["scenarios", "list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for b in BuiltinScenario::ALL {
        assert!(text.lines().any(|l| l.starts_with(b.name())), "{}", b.name());
    }
}

#[test]
fn sweep_endpoints() {
    let o = crackfield(&["sweep", "--models", "spectral,proposed", "--points", "101"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,spectral,proposed"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0], vec![0.0, 1.0, 1.0]);
    assert_eq!(rows[100], vec![1.0, 0.5, 0.0]);
}

#[test]
fn runs_are_deterministic_and_replayable() {
    let dir = scratch("replay");
    let file = small_scenario(&dir);
    let first = dir.join("first");
    let second = dir.join("second");
    for out in [&first, &second] {
        let o = crackfield(&["run", "--file", file.to_str().unwrap(), "--model", "vol-dev", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let history = fs::read_to_string(first.join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 3);
    assert_eq!(history, fs::read_to_string(second.join("history.csv")).unwrap());
    assert!(first.join("snapshots/step_0000.vtk").exists());
    assert!(first.join("snapshots/step_0002.vtk").exists());

    let replayed = dir.join("replayed");
    let record = first.join("run.json");
    let o = crackfield(&["run", "--replay", record.to_str().unwrap(), "--out", replayed.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(history, fs::read_to_string(replayed.join("history.csv")).unwrap());

    // the record embeds the scenario, so the source file is no longer needed
    fs::remove_file(&file).unwrap();
    let again = dir.join("again");
    let o = crackfield(&["run", "--replay", record.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(history, fs::read_to_string(again.join("history.csv")).unwrap());
}

#[test]
fn kink_angle_needs_a_slit() {
    let dir = scratch("kink");
    let file = small_scenario(&dir);
    let out = dir.join("run");
    let o = crackfield(&["run", "--file", file.to_str().unwrap(), "--model", "vol-dev", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = crackfield(&["kink-angle", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("slit"));
}
