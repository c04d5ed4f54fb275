use std::path::Path;
use std::process::{Command, Output};

use kmod_core::module::TreeModule;

fn kmod(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmod"))
        .args(args)
        .current_dir(dir)
        .env_remove("KMOD_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn example_then_ar() {
    let dir = tempfile::tempdir().unwrap();
    assert!(kmod(&["example4", "-o", "z.json"], dir.path())
        .status
        .success());
    let o = kmod(&["ar", "--input", "z.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("Y: flow, r=1, C={root,+2}"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn example_orbit_table() {
    let dir = tempfile::tempdir().unwrap();
    kmod(&["example4", "-o", "z.json"], dir.path());
    let o = kmod(&["orbit", "--input", "z.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("iota(input) = 0   r0 = 1   b = 1"), "{text}");
    let json = kmod(
        &["orbit", "--input", "z.json", "--format", "json"],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["r0"], 1);
    assert_eq!(v["b"], 1);
    assert_eq!(v["records"].as_array().unwrap().len(), 4 + 1 + 5);
}

#[test]
fn check_all_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let o = kmod(&["check", "--suite", "all", "--seeds", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn ar_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    kmod(
        &["example4", "--l1", "5", "--l3", "7", "-o", "z.json"],
        dir.path(),
    );
    let o = kmod(&["ar", "--input", "z.json", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let y: TreeModule =
        TreeModule::from_file(&serde_json::from_value(v["ar"]["y"].clone()).unwrap()).unwrap();
    assert_eq!(y.total_dim(), 6);
    let z = TreeModule::load(&dir.path().join("z.json")).unwrap();
    let z2 = TreeModule::from_file(&serde_json::from_value(v["ar"]["z"].clone()).unwrap()).unwrap();
    assert_eq!(z, z2);
}

#[test]
fn generation_is_deterministic_and_honours_env_seed() {
    let dir = tempfile::tempdir().unwrap();
    kmod(
        &["gen", "--seed", "9", "--n", "3", "-o", "a.json"],
        dir.path(),
    );
    kmod(
        &["gen", "--seed", "9", "--n", "3", "-o", "b.json"],
        dir.path(),
    );
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    let o = Command::new(env!("CARGO_BIN_EXE_kmod"))
        .args(["gen", "-o", "c.json"])
        .current_dir(dir.path())
        .env("KMOD_SEED", "9")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(a, std::fs::read(dir.path().join("c.json")).unwrap());
    let m = TreeModule::load(&dir.path().join("a.json")).unwrap();
    assert!(m.validate().is_empty());
}

#[test]
fn malformed_input_exits_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"n": 3, "p": 10007, "parity": "omega",
        "vertices": [{"word": "", "dim": 1}, {"word": "+1", "dim": 2}],
        "edges": [{"child": "+1", "matrix": [[1]]}]}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    let o = kmod(&["orbit", "--input", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("+1"), "{err}");
    let o = kmod(&["orbit", "--input", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = kmod(&["check", "--suite", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_regular_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    // a simple module is projective or injective, never regular
    let simple = r#"{"n": 3, "p": 10007, "parity": "omega",
        "vertices": [{"word": "", "dim": 1}], "edges": []}"#;
    std::fs::write(dir.path().join("s.json"), simple).unwrap();
    let o = kmod(&["orbit", "--input", "s.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dot_export() {
    let dir = tempfile::tempdir().unwrap();
    kmod(&["example4", "-o", "z.json"], dir.path());
    let o = kmod(
        &[
            "export-dot",
            "--input",
            "z.json",
            "-o",
            "z.dot",
            "--highlight-center",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let dot = std::fs::read_to_string(dir.path().join("z.dot")).unwrap();
    assert!(dot.starts_with("graph module {"));
    assert!(dot.contains("shape=box, style=filled"));
    assert!(dot.contains("shape=circle, color=red"));
}
