//! CLI acceptance: byte-identical output across reruns and thread counts,
//! plus the documented exit codes.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_latticeprop"))
}

fn out_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("latticeprop-acceptance-{}-{}", std::process::id(), name));
    p
}

fn run_to_file(args: &[&str], threads: Option<&str>, name: &str) -> Vec<u8> {
    let path = out_path(name);
    let mut cmd = bin();
    cmd.args(args).arg("--out").arg(&path);
    match threads {
        Some(k) => {
            cmd.arg("--threads").arg(k);
        }
        None => {
            cmd.env("LATTICEPROP_THREADS", "2");
        }
    }
    let status = cmd.status().expect("binary runs");
    assert!(status.success(), "command failed: {args:?}");
    let bytes = std::fs::read(&path).expect("output file exists");
    let _ = std::fs::remove_file(&path);
    bytes
}

/// Criterion: all CLI outputs byte-identical across runs and thread counts.
#[test]
fn determinism() {
    let cases: Vec<(&str, Vec<&str>)> = vec![
        (
            "profile-csv",
            vec!["propagate", "--t", "8", "--n", "5", "--mass", "1.0", "--profile"],
        ),
        (
            "profile-json",
            vec![
                "propagate", "--t", "8", "--n", "5", "--mass", "1.0", "--profile", "--format",
                "json",
            ],
        ),
        ("triples", vec!["triples", "--max-hyp", "200", "--format", "json"]),
        ("metric-svg", vec!["metric", "--n", "5", "--max-dt", "8", "--format", "svg"]),
        (
            "coulomb",
            vec![
                "coulomb", "--xq", "1.0", "--mass", "1.0", "--t", "1.0", "--refine", "8",
            ],
        ),
    ];
    for (name, args) in &cases {
        let first = run_to_file(args, Some("1"), name);
        let second = run_to_file(args, Some("1"), name);
        assert_eq!(first, second, "rerun differs for {name}");
        for k in ["2", "4"] {
            let threaded = run_to_file(args, Some(k), name);
            assert_eq!(first, threaded, "threads={k} differs for {name}");
        }
        let from_env = run_to_file(args, None, name);
        assert_eq!(first, from_env, "env-threaded run differs for {name}");
    }
    println!("acceptance cli_determinism: PASS ({} commands byte-identical)", cases.len());
}

#[test]
fn exit_codes() {
    // Unknown flag: usage error, exit 2.
    let status = bin().args(["propagate", "--no-such-flag"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2));
    // Over the enumeration cap wherever enumeration is mandatory: the
    // interacting DP guards capacity with exit 3.
    let status = bin()
        .args(["coulomb", "--t", "100.0", "--refine", "24"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
    // Unwritable output path: IO error, exit 4.
    let status = bin()
        .args(["triples", "--max-hyp", "10", "--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(4));
    println!("acceptance cli_exit_codes: PASS");
}

#[test]
fn csv_schema_matches_contract() {
    let out = bin()
        .args(["propagate", "--t", "4", "--mass", "1.0", "--profile"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re,im,mag"));
    assert_eq!(lines.count(), 9); // endpoints -4..=4
}
