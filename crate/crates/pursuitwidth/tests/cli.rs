use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pursuitwidth")).current_dir(dir).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const UNCERTAIN: &str = "positions 4 actions a b\n0 2 1\n1 2 0\n2 2 0\n3 1 1\n\
move 0 a 1\nmove 0 a 2\nmove 1 a 0\nmove 1 b 3\nmove 2 a 3\nmove 2 b 0\nmove 3 a 3\ninit 0\n";

#[test]
fn width_reports_values() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c3.edges", "3\n0 1\n1 2\n2 0\n");
    write(dir.path(), "single.edges", "# one vertex\n1\n");
    let out = run(dir.path(), &["width", "c3.edges", "--measure", "dw"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["value"], 2);
    assert_eq!(json(&run(dir.path(), &["width", "single.edges", "--measure", "dw"]))["results"]["value"], 1);
    assert!(run(dir.path(), &["generate", "grk", "--r", "1", "--k", "2", "-o", "g12.edges"]).status.success());
    let out = run(dir.path(), &["width", "g12.edges", "--measure", "dpw"]);
    assert_eq!(json(&out)["results"]["value"], 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.edges", "3\n2 5\n");
    write(dir.path(), "c3.edges", "3\n0 1\n1 2\n2 0\n");
    let out = run(dir.path(), &["width", "bad.edges"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(run(dir.path(), &["width", "missing.edges"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["nonsense"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["width", "c3.edges", "--budget", "5"]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_pursuitwidth"))
        .current_dir(dir.path())
        .args(["width", "c3.edges"])
        .env("PURSUITWIDTH_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["generate", "thm7", "--n", "2"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().next(), Some("30"));
    let out = run(dir.path(), &["generate", "grk", "--r", "1", "--k", "2"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().next(), Some("8"));
    let a = run(dir.path(), &["generate", "random", "--n", "5", "--p", "0.4", "--seed", "7"]);
    let b = run(dir.path(), &["generate", "random", "--n", "5", "--p", "0.4", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run(dir.path(), &["generate", "grk", "--r", "1"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c3.edges", "3\n0 1\n1 2\n2 0\n");
    let out = run(dir.path(), &["verify", "hierarchy", "--nmax", "4", "--random", "0", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["instances"], 90);
    let out = run(dir.path(), &["verify", "thm10", "--graph", "c3.edges", "--r", "2", "-o", "thm10.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("thm10.json")).unwrap()).unwrap();
    let trace = report["results"]["artifacts"][0].as_str().unwrap().to_string();
    let lines = std::fs::read_to_string(dir.path().join(trace)).unwrap();
    assert!(lines.lines().all(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["invariant_report"]["violations"]
        .as_array()
        .unwrap()
        .is_empty()));
    let out = run(dir.path(), &["verify", "thm7", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn parity_commands() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "u.pg", UNCERTAIN);
    write(dir.path(), "u.obs", "1 2\n");
    let perfect = json(&run(dir.path(), &["parity", "solve", "u.pg"]));
    let identity = json(&run(dir.path(), &["parity", "solve-imperfect", "u.pg"]));
    assert_eq!(perfect["results"]["winner_from_init"], 0);
    assert_eq!(identity["results"]["winner"], 0);
    let hidden = json(&run(dir.path(), &["parity", "solve-imperfect", "u.pg", "u.obs"]));
    assert_eq!(hidden["results"]["winner"], 1);
    assert!(run(dir.path(), &["parity", "powerset", "u.pg", "u.obs", "-o", "pow.pg"]).status.success());
    let pow = std::fs::read_to_string(dir.path().join("pow.pg")).unwrap();
    let game = pursuitwidth::parity::ParityGame::parse(&pow).unwrap();
    assert_eq!(game.n(), 3);
    assert_eq!(json(&run(dir.path(), &["parity", "solve", "pow.pg"]))["results"]["winner_from_init"], 1);
}
