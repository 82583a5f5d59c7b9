use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn scs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scs"))
        .args(args)
        .current_dir(dir)
        .env_remove("SCS_TOL")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// The leading pretty-printed JSON object of the output.
fn leading_json(o: &Output) -> Value {
    let text = stdout(o);
    let end = text.find("\n}").map(|i| i + 2).expect("json block");
    serde_json::from_str(&text[..end]).expect("valid json")
}

#[test]
fn gen_cfr_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = scs(dir.path(), &["gen-cfr", "--prime", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(fixture("flo5.txt"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| format!("{l}\n"))
            .collect::<String>()
    );
    assert_eq!(
        scs(dir.path(), &["gen-cfr", "--prime", "4"]).status.code(),
        Some(1)
    );
    assert_eq!(
        scs(dir.path(), &["gen-cfr", "--search", "3", "--rows", "3"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        scs(
            dir.path(),
            &["gen-cfr", "--search", "15", "--rows", "4", "--budget", "10"]
        )
        .status
        .code(),
        Some(2)
    );
    let o = scs(
        dir.path(),
        &["gen-cfr", "--search", "9", "--rows", "2", "--out", "c9.txt"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("c9.txt.config.json").exists());
    let v = scs(dir.path(), &["verify", "--cfr", "c9.txt"]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(scs(dir.path(), &["gen-cfr"]).status.code(), Some(1));
}

#[test]
fn gen_scs_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let o = scs(
        dir.path(),
        &["gen-scs", "c1", "--cfr", &fixture("flo15.txt")],
    );
    assert_eq!(o.status.code(), Some(0));
    let s = leading_json(&o);
    assert!((s["theta_max"].as_f64().unwrap() - 16.0).abs() < 1e-6);
    assert_eq!(s["omega"][1], 17);

    let o = scs(
        dir.path(),
        &[
            "gen-scs",
            "c3",
            "--cfr",
            &fixture("flo5.txt"),
            "--insert",
            "0,2,6,7,8,10",
        ],
    );
    assert!((leading_json(&o)["theta_c"].as_f64().unwrap() - 11.0).abs() < 1e-6);

    let o = scs(
        dir.path(),
        &["gen-scs", "c2", "--cfr", &fixture("flo3.txt"), "--s0", "0"],
    );
    assert!((leading_json(&o)["theta_max"].as_f64().unwrap() - 4.0).abs() < 1e-6);

    assert_eq!(
        scs(dir.path(), &["gen-scs", "c2", "--prime", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        scs(dir.path(), &["gen-scs", "c2", "--prime", "5", "--s0", "9"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn outputs_replay_identically() {
    let dir = tempfile::tempdir().unwrap();
    let o = scs(
        dir.path(),
        &[
            "gen-scs",
            "c4",
            "--cfr",
            &fixture("flo5.txt"),
            "--s0",
            "2",
            "--out",
            "fam.json",
            "--spectrum-csv",
            "spec.csv",
            "--corr-csv",
            "corr.csv",
            "--pair",
            "0,5",
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let first = std::fs::read(dir.path().join("fam.json")).unwrap();
    let spec = std::fs::read_to_string(dir.path().join("spec.csv")).unwrap();
    assert!(spec.starts_with("f,power,forbidden\n"));
    assert_eq!(spec.lines().count(), 31);
    let corr = std::fs::read_to_string(dir.path().join("corr.csv")).unwrap();
    assert!(corr.starts_with("tau,re,im,mag\n"));

    std::fs::remove_file(dir.path().join("fam.json")).unwrap();
    let r = scs(dir.path(), &["replay", "fam.json.config.json"]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("fam.json")).unwrap(), first);

    let family: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(
        (
            family["L"].as_u64(),
            family["K"].as_u64(),
            family["M"].as_u64()
        ),
        (Some(30), Some(4), Some(5))
    );
    assert_eq!(family["provenance"]["construction"], "c4");
}

#[test]
fn bounds_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = scs(
        dir.path(),
        &["bounds", "--M", "4", "--L", "240", "--n", "15"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!((leading_json(&o)["theta_opti"].as_f64().unwrap() - 14.0073).abs() < 5e-5);
    assert_eq!(
        scs(
            dir.path(),
            &["bounds", "--M", "1", "--L", "10", "--n", "10"]
        )
        .status
        .code(),
        Some(1)
    );

    scs(
        dir.path(),
        &[
            "gen-scs",
            "c4",
            "--cfr",
            &fixture("flo15.txt"),
            "--s0",
            "4",
            "--out",
            "ex4.json",
        ],
    );
    let o = scs(dir.path(), &["bounds", "--family", "ex4.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("interset: optimal (= L/√(L−n))"));

    let o = scs(dir.path(), &["bounds", "--table", "15:4,57:7"]);
    let text = stdout(&o);
    assert!(text.contains("1.1423") && text.contains("53.7758") && text.contains("1.0786"));
    let o = scs(dir.path(), &["bounds", "--ladder", "5,7,11"]);
    assert!(stdout(&o).contains("eta strictly decreasing: true"));
}

#[test]
fn verify_detects_an_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    scs(
        dir.path(),
        &[
            "gen-scs",
            "c1",
            "--cfr",
            &fixture("flo15.txt"),
            "--out",
            "ex1.json",
        ],
    );
    let ok = scs(dir.path(), &["verify", "--family", "ex1.json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(leading_json(&ok)["pass"], true);

    let mut family: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("ex1.json")).unwrap()).unwrap();
    let re = family["sets"][0][0]["values"][3][0].as_f64().unwrap();
    family["sets"][0][0]["values"][3][0] = Value::from(re + 1e-3);
    std::fs::write(dir.path().join("bad.json"), family.to_string()).unwrap();
    let bad = scs(dir.path(), &["verify", "--family", "bad.json"]);
    assert_eq!(bad.status.code(), Some(4));
    let report = leading_json(&bad);
    let power = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "uniform_power")
        .unwrap();
    assert_eq!(power["pass"], false);

    assert_eq!(
        scs(dir.path(), &["verify", "--cfr", &fixture("flo15.txt")])
            .status
            .code(),
        Some(0)
    );
    std::fs::write(dir.path().join("dup.txt"), "3 2\n0 1 2\n0 1 2\n").unwrap();
    assert_eq!(
        scs(dir.path(), &["verify", "--cfr", "dup.txt"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        scs(dir.path(), &["verify", "--family", "missing.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn tolerance_override() {
    let dir = tempfile::tempdir().unwrap();
    scs(
        dir.path(),
        &["gen-scs", "c1", "--prime", "5", "--out", "f.json"],
    );
    let o = Command::new(env!("CARGO_BIN_EXE_scs"))
        .args(["verify", "--family", "f.json"])
        .current_dir(dir.path())
        .env("SCS_TOL", "1e-30")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
    let o = Command::new(env!("CARGO_BIN_EXE_scs"))
        .args(["verify", "--family", "f.json"])
        .current_dir(dir.path())
        .env("SCS_TOL", "bogus")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
