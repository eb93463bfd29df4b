use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_rankenum");

fn write_running_example(dir: &Path) {
    let files = [
        ("r1.csv", "A,B\n1,1\n2,1\n1,2\n3,2\n"),
        ("r2.csv", "B,C\n1,1\n2,1\n"),
        ("r3.csv", "C,D\n1,1\n1,2\n"),
        ("r4.csv", "D,E\n1,1\n1,2\n"),
    ];
    for (name, body) in files {
        std::fs::write(dir.join(name), body).unwrap();
    }
    let q = r#"{
        "relations": [
            {"name": "R1", "file": "r1.csv"},
            {"name": "R2", "file": "r2.csv"},
            {"name": "R3", "file": "r3.csv"},
            {"name": "R4", "file": "r4.csv"}
        ],
        "project": ["A", "E"],
        "order": {"type": "sum"}
    }"#;
    std::fs::write(dir.join("q.json"), q).unwrap();
}

fn rankenum(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn run_streams_ranked_csv() {
    let dir = tempfile::tempdir().unwrap();
    write_running_example(dir.path());
    let q = dir.path().join("q.json");
    let (code, out, err) = rankenum(&["run", "--query", q.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["A,E,rank", "1,1,2", "1,2,3", "2,1,3", "2,2,4", "3,1,4", "3,2,5"]);
}

#[test]
fn limit_and_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    write_running_example(dir.path());
    let q = dir.path().join("q.json");
    let (code, out, _) = rankenum(&["run", "--query", q.to_str().unwrap(), "--limit", "2", "--format", "jsonl"]);
    assert_eq!(code, 0);
    let rows: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["A"], 1);
    assert_eq!(rows[0]["E"], 1);
    assert_eq!(rows[1]["rank"], 3.0);

    let (code, out, _) = rankenum(&["run", "--query", q.to_str().unwrap(), "--limit", "100"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 7);
}

#[test]
fn validate_reports_match() {
    let dir = tempfile::tempdir().unwrap();
    write_running_example(dir.path());
    let q = dir.path().join("q.json");
    for mode in ["acyclic", "star"] {
        let (code, out, err) = rankenum(&["validate", "--query", q.to_str().unwrap(), "--mode", mode]);
        if mode == "star" {
            // a 4-path is not a star
            assert_eq!(code, 1, "{out}{err}");
            continue;
        }
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.trim(), "MATCH (6 rows)");
    }
}

#[test]
fn oracle_profile_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    write_running_example(dir.path());
    let q = dir.path().join("q.json");
    let q = q.to_str().unwrap();
    let (_, engine, _) = rankenum(&["run", "--query", q]);
    let (code, oracle, _) = rankenum(&["oracle", "--query", q]);
    assert_eq!(code, 0);
    assert_eq!(engine, oracle);

    let (code, hist, _) = rankenum(&["profile", "--query", q]);
    assert_eq!(code, 0);
    let total: usize = hist.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 6);

    let (code, bench, err) = rankenum(&["bench", "--query", q, "--modes", "acyclic,oracle,baseline"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(bench.lines().count(), 4);
    assert!(bench.lines().skip(1).all(|l| l.split(',').nth(3) == Some("6")));
}

#[test]
fn gen_honors_seed_env() {
    let a = Command::new(BIN)
        .args(["gen", "--kind", "zipf", "--n", "50", "--seed", "1"])
        .env("RANKENUM_SEED", "42")
        .output()
        .unwrap();
    let b = Command::new(BIN)
        .args(["gen", "--kind", "zipf", "--n", "50", "--seed", "2"])
        .env("RANKENUM_SEED", "42")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("src,dst\n"));
}

#[test]
fn user_errors_exit_with_one() {
    let (code, _, err) = rankenum(&["run", "--query", "/nonexistent/q.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
    let (code, _, _) = rankenum(&["run", "--bogus"]);
    assert_eq!(code, 1);

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("e.csv"), "x,y\n1,2\n2,3\n3,1\n").unwrap();
    let q = r#"{"relations": [
        {"name": "E", "file": "e.csv", "as": "R", "attrs": ["a", "b"]},
        {"name": "E", "file": "e.csv", "as": "S", "attrs": ["b", "c"]},
        {"name": "E", "file": "e.csv", "as": "T", "attrs": ["c", "a"]}
    ], "project": ["a"]}"#;
    std::fs::write(dir.path().join("tri.json"), q).unwrap();
    let (code, _, err) = rankenum(&["run", "--query", dir.path().join("tri.json").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("cyclic"), "{err}");
}
