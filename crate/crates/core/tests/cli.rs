use std::path::Path;
use std::process::{Command, Output};

fn momentlab(dir: &Path, args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_momentlab"));
    cmd.args(args).current_dir(dir).env_remove("MOMENTLAB_SEED");
    if let Some(s) = env_seed {
        cmd.env("MOMENTLAB_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

const SURVEY: &str =
    r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "sphere-survey", "samples": 20}"#;

fn seed_of(out: &Output) -> u64 {
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    v["config"]["seed"].as_u64().unwrap()
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "plain.json", SURVEY);
    write(
        p,
        "seeded.json",
        r#"{"rep": {"kind": "su2", "j": 0.5}, "experiment": "sphere-survey", "samples": 20, "seed": 4}"#,
    );
    assert_eq!(
        seed_of(&momentlab(p, &["run", "--config", "plain.json"], None)),
        0
    );
    assert_eq!(
        seed_of(&momentlab(p, &["run", "--config", "plain.json"], Some("9"))),
        9
    );
    assert_eq!(
        seed_of(&momentlab(
            p,
            &["run", "--config", "seeded.json"],
            Some("9")
        )),
        4
    );
    assert_eq!(
        seed_of(&momentlab(
            p,
            &["run", "--config", "seeded.json", "--seed", "2"],
            Some("9")
        )),
        2
    );
    assert_eq!(
        momentlab(p, &["run", "--config", "plain.json"], Some("abc"))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "survey.json", SURVEY);
    let out = momentlab(
        p,
        &["run", "--config", "survey.json", "--format", "csv"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    momentlab(
        p,
        &["run", "--config", "survey.json", "--out", "r.csv"],
        None,
    );
    let file = std::fs::read(p.join("r.csv")).unwrap();
    assert_eq!(out.stdout, file);
    let text = String::from_utf8(file).unwrap();
    assert!(text.starts_with("sample_index,casimir,mu_1,mu_2,mu_3,norm\n"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn config_output_section_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(
        p,
        "c.json",
        r#"{"rep": {"kind": "circle", "charge": 2}, "experiment": "cocycle", "trials": 10,
            "output": {"path": "check.csv", "format": "csv"}}"#,
    );
    assert_eq!(
        momentlab(p, &["run", "--config", "c.json"], None)
            .status
            .code(),
        Some(0)
    );
    let text = std::fs::read_to_string(p.join("check.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("operation,inputs_digest,defect,tolerance,pass")
    );
    assert!(lines.next().unwrap().ends_with(",true"));
}

#[test]
fn errors_go_to_stderr_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write(p, "bad.json", "{\"rep\": ");
    let out = momentlab(p, &["run", "--config", "bad.json"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    write(
        p,
        "neg.json",
        r#"{"rep": {"kind": "su2", "j": 1}, "experiment": "rank", "samples": -3}"#,
    );
    let out = momentlab(p, &["run", "--config", "neg.json"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("samples"));

    let out = momentlab(p, &["run", "--config", "absent.json"], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));

    write(p, "ok.json", SURVEY);
    let out = momentlab(
        p,
        &["run", "--config", "ok.json", "--out", "no/such/dir/r.json"],
        None,
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such/dir/r.json"));
}

#[test]
fn check_and_catalog_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = momentlab(p, &["catalog", "list"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ["su2", "heisenberg", "circle"] {
        assert!(text.contains(kind));
    }
    for args in [
        &["check", "--rep", "su2", "--j", "2.5"][..],
        &["check", "--rep", "heisenberg", "--n", "16"],
        &["check", "--rep", "circle", "--charge", "-2"],
    ] {
        assert_eq!(momentlab(p, args, None).status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn custom_representation_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let rep = momentlab::Representation::catalog(&momentlab::CatalogKind::spin(2)).unwrap();
    write(
        p,
        "rep.json",
        &serde_json::to_string(&rep.to_document()).unwrap(),
    );
    write(
        p,
        "c.json",
        r#"{"rep": {"kind": "custom", "path": "rep.json"}, "experiment": "orbit-survey", "casimir": "su2_quadratic", "words": 20}"#,
    );
    let out = momentlab(p, &["run", "--config", "c.json"], None);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
