use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TRIANGLE_K1: &str = "c triangle\np kforest 3 3 1\ne 1 2\ne 2 3\ne 3 1\n";

fn kforest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kforest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_then_verify_triangle() {
    let dir = TempDir::new().unwrap();
    let graph = put(&dir, "tri.txt", TRIANGLE_K1);
    let sol = dir.path().join("tri.sol");
    let stats = dir.path().join("tri.json");

    let out = kforest(&[
        "solve",
        "--in",
        s(&graph),
        "--out",
        s(&sol),
        "--stats",
        s(&stats),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&sol).unwrap();
    assert!(text.starts_with("s kforest 2\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("a ")).count(), 2);

    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["size"], 2);
    assert!(doc["iterations"].as_u64().unwrap() >= 1);
    assert!(doc["components"][0]["iterations"][0]["pseudoforest"].is_number());

    let out = kforest(&[
        "verify",
        "--graph",
        s(&graph),
        "--solution",
        s(&sol),
        "--check-optimal",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS"));
}

#[test]
fn truncated_solution_fails_optimality() {
    let dir = TempDir::new().unwrap();
    let graph = put(&dir, "tri.txt", TRIANGLE_K1);
    let sol = put(&dir, "short.sol", "s kforest 1\na 3 1\n");

    let out = kforest(&["verify", "--graph", s(&graph), "--solution", s(&sol)]);
    assert_eq!(out.status.code(), Some(0));

    let out = kforest(&[
        "verify",
        "--graph",
        s(&graph),
        "--solution",
        s(&sol),
        "--check-optimal",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("optimality"), "{text}");
    assert!(text.contains("gap 1"), "{text}");
}

#[test]
fn verify_names_the_failed_check() {
    let dir = TempDir::new().unwrap();
    let graph = put(&dir, "tri.txt", TRIANGLE_K1);
    let cases = [
        ("s kforest 3\na 1 1\na 2 1\na 3 1\n", "acyclicity"),
        ("s kforest 2\na 1 1\na 1 1\n", "disjointness"),
        ("s kforest 1\na 1 2\n", "forest index"),
        ("s kforest 1\na 9 1\n", "existence"),
    ];
    for (i, (text, check)) in cases.iter().enumerate() {
        let sol = put(&dir, &format!("bad{i}.sol"), text);
        let out = kforest(&["verify", "--graph", s(&graph), "--solution", s(&sol)]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(stdout(&out).contains(check), "{}", stdout(&out));
    }
}

#[test]
fn oracle_methods_agree_on_triangle() {
    let dir = TempDir::new().unwrap();
    let graph = put(&dir, "tri2.txt", "p kforest 3 3 2\ne 1 2\ne 2 3\ne 3 1\n");
    let out = kforest(&["oracle", "--in", s(&graph), "--method", "partition"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("3"));
    assert!(stdout(&out).contains("partition"));
    let out = kforest(&["oracle", "--in", s(&graph), "--method", "augment"]);
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = put(&dir, "bad.txt", "p kforest 3 1 1\ne 0 1\n");
    let out = kforest(&["solve", "--in", s(&bad), "--out", s(&dir.path().join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = dir.path().join("missing.txt");
    let out = kforest(&[
        "solve",
        "--in",
        s(&missing),
        "--out",
        s(&dir.path().join("y")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn self_loop_warns_and_solves() {
    let dir = TempDir::new().unwrap();
    let graph = put(&dir, "loop.txt", "p kforest 2 3 1\ne 1 2\ne 2 2\ne 2 1\n");
    let sol = dir.path().join("loop.sol");
    let out = kforest(&["solve", "--in", s(&graph), "--out", s(&sol)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-loop"));
    assert!(fs::read_to_string(&sol)
        .unwrap()
        .starts_with("s kforest 1\n"));
}

#[test]
fn generate_is_deterministic_and_solvable() {
    let dir = TempDir::new().unwrap();
    let a = kforest(&[
        "generate", "--model", "gnm", "-n", "4", "-m", "6", "--seed", "7",
    ]);
    let b = kforest(&[
        "generate", "--model", "gnm", "-n", "4", "-m", "6", "--seed", "7",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let empty = kforest(&["generate", "--model", "gnm", "-n", "1", "-m", "0"]);
    let text = stdout(&empty);
    assert_eq!(text.lines().filter(|l| l.starts_with('e')).count(), 0);
    assert!(text.contains("p kforest 1 0"));

    let path = dir.path().join("trees.txt");
    let out = kforest(&[
        "generate",
        "--model",
        "ktrees",
        "-n",
        "5",
        "-k",
        "2",
        "--seed",
        "1",
        "--out",
        s(&path),
    ]);
    assert!(out.status.success());
    let sol = dir.path().join("trees.sol");
    assert!(kforest(&["solve", "--in", s(&path), "--out", s(&sol)])
        .status
        .success());
    assert!(fs::read_to_string(&sol)
        .unwrap()
        .starts_with("s kforest 8\n"));
}

#[test]
fn repeated_solves_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.txt");
    let out = kforest(&[
        "generate",
        "--model",
        "gnm",
        "-n",
        "300",
        "-m",
        "1200",
        "-k",
        "3",
        "--seed",
        "9",
        "--out",
        s(&graph),
    ]);
    assert!(out.status.success());
    let first = dir.path().join("1.sol");
    let second = dir.path().join("2.sol");
    assert!(kforest(&["solve", "--in", s(&graph), "--out", s(&first)])
        .status
        .success());
    assert!(kforest(&["solve", "--in", s(&graph), "--out", s(&second)])
        .status
        .success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    let out = kforest(&[
        "verify",
        "--graph",
        s(&graph),
        "--solution",
        s(&first),
        "--check-optimal",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bench_prints_csv() {
    let out = kforest(&[
        "bench", "--model", "gnm", "--sizes", "20,40", "--seed", "3", "-k", "2", "--jobs", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("model,n,m,k"));
    assert!(lines[1].starts_with("gnm,20,"));
    assert!(lines[2].starts_with("gnm,40,"));
}
