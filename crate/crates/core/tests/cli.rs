use std::fs;
use std::process::{Command, Output};

fn posentropy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posentropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(posentropy(&["--help"]).status.code(), Some(0));
    assert_eq!(posentropy(&["profile", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        posentropy(&["synth", "--length", "x", "--sentences", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn exit_codes_for_data_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    let run = |input: &str| {
        posentropy(&["profile", "--input", input, "--out", out.to_str().unwrap()])
            .status
            .code()
    };
    assert_eq!(run(empty.to_str().unwrap()), Some(2));
    assert_eq!(run(dir.path().join("missing").to_str().unwrap()), Some(3));

    let bad_medial = posentropy(&[
        "profile",
        "--input",
        empty.to_str().unwrap(),
        "--medial",
        "custom:5:2",
    ]);
    assert_eq!(bad_medial.status.code(), Some(1));
}

#[test]
fn synth_then_profile() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("stair.txt");
    let synth = posentropy(&[
        "synth",
        "--length",
        "10",
        "--sentences",
        "400",
        "--seed",
        "3",
        "--out",
        corpus.to_str().unwrap(),
    ]);
    assert!(synth.status.success());
    assert_eq!(fs::read_to_string(&corpus).unwrap().lines().count(), 400);

    let stdout = posentropy(&[
        "synth",
        "--length",
        "10",
        "--sentences",
        "400",
        "--seed",
        "3",
    ]);
    assert_eq!(stdout.stdout, fs::read(&corpus).unwrap());

    let out = dir.path().join("out");
    let profile = posentropy(&[
        "profile",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--high-cutoff",
        "5",
        "--low-cutoff",
        "5",
        "--emit",
        "csv,json",
        "--workers",
        "3",
    ]);
    assert!(
        profile.status.success(),
        "{}",
        String::from_utf8_lossy(&profile.stderr)
    );
    assert!(out.join("profiles.csv").exists());
    assert!(out.join("summary.json").exists());
    assert!(!out.join("entropy_L10.svg").exists());

    let rerun = dir.path().join("rerun");
    let from_config = posentropy(&[
        "profile",
        "--config",
        out.join("summary.json").to_str().unwrap(),
        "--out",
        rerun.to_str().unwrap(),
    ]);
    assert!(from_config.status.success());
    assert_eq!(
        fs::read(out.join("summary.json")).unwrap(),
        fs::read(rerun.join("summary.json")).unwrap()
    );
}

#[test]
fn synth_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"[{"position": 1, "distribution": [["hello", 1.0]]},
            {"position": 2, "distribution": [["world", 0.5], ["there", 0.5]]}]"#,
    )
    .unwrap();
    let out = posentropy(&[
        "synth",
        "--length",
        "2",
        "--sentences",
        "50",
        "--spec",
        spec.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .all(|l| l == "hello world" || l == "hello there"));

    fs::write(&spec, r#"[{"position": 1, "distribution": [["a", 0.3]]}]"#).unwrap();
    let bad = posentropy(&[
        "synth",
        "--length",
        "1",
        "--sentences",
        "5",
        "--spec",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}
