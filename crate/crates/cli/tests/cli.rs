use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn gks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gks"))
        .args(args)
        .output()
        .unwrap()
}

fn gks_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gks"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn table_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../tables/gks_12_3.ucode")
}

#[test]
fn verify_canonical_table() {
    let o = gks(&["verify", "--table", table_path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2200 distinct"));
}

#[test]
fn verify_json_reports_counts() {
    let o = gks(&[
        "verify",
        "--table",
        table_path().to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["table_report"]["disjointness"]["distinct_members"], 2200);
    assert_eq!(v["structural"]["cases"], 7920);
}

#[test]
fn verify_rejects_broken_tables() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(table_path()).unwrap();

    let dropped = dir.path().join("dropped.ucode");
    let lines: Vec<&str> = text.lines().collect();
    std::fs::write(&dropped, lines[..lines.len() - 1].join("\n") + "\n").unwrap();
    assert_eq!(
        gks(&["verify", "--table", dropped.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let garbled = dir.path().join("garbled.ucode");
    std::fs::write(
        &garbled,
        text.replacen("111000100000 ^^^", "111000100000 ^^x", 1),
    )
    .unwrap();
    assert_eq!(
        gks(&["verify", "--table", garbled.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn exponent_prints_ten_digits() {
    let o = gks(&["exponent", "--k", "9", "--n", "108"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.4692787260");
    assert_eq!(
        gks(&["exponent", "--k", "0", "--n", "5"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_theorem2() {
    let o = gks(&[
        "simulate",
        "--strategy",
        "theorem2:@canonical",
        "--trials",
        "500",
        "--seed",
        "3",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["wins"], 500);
    assert_eq!(v["max_set_size"], 9);
}

#[test]
fn simulate_sweep_composition() {
    let o = gks(&[
        "simulate",
        "--strategy",
        "compose(flood:3,block:@canonical)",
        "--trials",
        "64",
        "--seed",
        "0",
        "--adversary",
        "sweep",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        gks(&[
            "simulate",
            "--strategy",
            "nope",
            "--trials",
            "1",
            "--seed",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(gks(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        gks(&[
            "search",
            "--m",
            "40",
            "--u",
            "3",
            "--seed",
            "0",
            "--budget-ms",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn search_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.ucode");
    let o = gks(&[
        "search",
        "--m",
        "3",
        "--u",
        "3",
        "--seed",
        "0",
        "--budget-ms",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    // u = m leaves no free position, so only the table checks can pass.
    let v: serde_json::Value = serde_json::from_slice(
        &gks(&["verify", "--table", out.to_str().unwrap(), "--json"]).stdout,
    )
    .unwrap();
    assert_eq!(v["table_report"]["coverage"]["pass"], true);
    assert_eq!(v["table_report"]["disjointness"]["pass"], true);

    assert_eq!(
        gks(&[
            "search",
            "--m",
            "3",
            "--u",
            "1",
            "--seed",
            "0",
            "--budget-ms",
            "1000"
        ])
        .status
        .code(),
        Some(1)
    );
    let o = gks(&[
        "search",
        "--m",
        "12",
        "--u",
        "3",
        "--seed",
        "0",
        "--budget-ms",
        "50",
        "--parallel",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn play_records_a_game() {
    let dir = tempfile::tempdir().unwrap();
    let rec = dir.path().join("game.json");
    let o = gks_stdin(
        &[
            "play",
            "--strategy",
            "flood:4",
            "--record",
            rec.to_str().unwrap(),
        ],
        "2,4,1,bit=1\n",
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("S=[3]"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(rec).unwrap()).unwrap();
    assert_eq!(
        v["transcript"]["arrival_order"],
        serde_json::json!([2, 4, 1, 3])
    );
    assert_eq!(v["win"], true);
}

#[test]
fn play_aborts_on_eof() {
    let o = gks_stdin(&["play", "--strategy", "flood:3"], "1\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("aborted"));
}

#[test]
fn selftest_quick() {
    let o = gks(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}
