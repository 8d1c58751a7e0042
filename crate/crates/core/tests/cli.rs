use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn atc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atc"))
        .args(args)
        .env_remove("ATC_THREADS")
        .output()
        .expect("spawn atc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

/// K5 on 1..=5 tagged db, K4 on 5..=8 untagged.
fn small_graph(dir: &Path) -> (String, String) {
    let mut edges = String::new();
    for block in [[1, 2, 3, 4, 5].as_slice(), &[5, 6, 7, 8]] {
        for (i, u) in block.iter().enumerate() {
            for v in &block[i + 1..] {
                edges.push_str(&format!("{u} {v}\n"));
            }
        }
    }
    let attrs: String = (1..=5).map(|v| format!("{v}\tdb\n")).collect();
    let (g, a) = (p(dir, "g.txt"), p(dir, "a.txt"));
    fs::write(&g, edges).unwrap();
    fs::write(&a, attrs).unwrap();
    (g, a)
}

#[test]
fn missing_nodes_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (g, _) = small_graph(dir.path());
    let o = atc(&["query", "--graph", &g]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--nodes"));
}

#[test]
fn unknown_algorithm_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let (g, _) = small_graph(dir.path());
    let o = atc(&["query", "--graph", &g, "--nodes", "1", "--algo", "magic"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn version_and_help() {
    let o = atc(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("index format 1"));
    let o = atc(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["index", "decompose", "query", "gen", "eval"] {
        assert!(stdout(&o).contains(sub), "{sub} missing from help");
    }
}

#[test]
fn query_json_on_small_graph() {
    let dir = TempDir::new().unwrap();
    let (g, a) = small_graph(dir.path());
    let o = atc(&[
        "query",
        "--graph",
        &g,
        "--attr-file",
        &a,
        "--nodes",
        "1",
        "--attrs",
        "db",
        "--algo",
        "bulk",
        "--k",
        "4",
        "--d",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["vertices"], serde_json::json!([1, 2, 3, 4, 5]));
    assert_eq!(v["score"], "5.000000");
    assert_eq!(v["k"], 4);
    assert_eq!(v["algo"], "bulk");
}

#[test]
fn empty_result_and_fail_on_empty() {
    let dir = TempDir::new().unwrap();
    let (g, a) = small_graph(dir.path());
    let base = [
        "query",
        "--graph",
        &g,
        "--attr-file",
        &a,
        "--nodes",
        "1",
        "--k",
        "6",
    ];
    let o = atc(&base);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "infeasible");
    assert_eq!(v["vertices"], serde_json::json!([]));
    let mut strict = base.to_vec();
    strict.push("--fail-on-empty");
    assert_eq!(atc(&strict).status.code(), Some(3));
}

#[test]
fn missing_and_corrupt_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let (g, a) = small_graph(dir.path());
    let missing = p(dir.path(), "nope.txt");
    assert_eq!(
        atc(&["decompose", "--graph", &missing]).status.code(),
        Some(2)
    );

    let idx = p(dir.path(), "g.idx");
    let o = atc(&["index", "--graph", &g, "--attrs", &a, "--out", &idx]);
    assert_eq!(o.status.code(), Some(0));
    let mut bytes = fs::read(&idx).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] = if bytes[mid] == b'7' { b'8' } else { b'7' };
    fs::write(&idx, bytes).unwrap();
    let o = atc(&["query", "--index", &idx, "--nodes", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn full_pipeline() {
    let dir = TempDir::new().unwrap();
    let prefix = p(dir.path(), "syn");
    let o = atc(&[
        "gen",
        "--n",
        "200",
        "--communities",
        "8",
        "--out-prefix",
        &prefix,
        "--queries",
        "10",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for ext in ["edges", "attrs", "truth", "queries"] {
        assert!(Path::new(&format!("{prefix}.{ext}")).exists());
    }
    let (edges, attrs) = (format!("{prefix}.edges"), format!("{prefix}.attrs"));
    let idx = p(dir.path(), "syn.idx");
    let o = atc(&["index", "--graph", &edges, "--attrs", &attrs, "--out", &idx]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("entries"));

    let first_query = fs::read_to_string(format!("{prefix}.queries")).unwrap();
    let nodes = first_query
        .lines()
        .next()
        .unwrap()
        .split('\t')
        .next()
        .unwrap()
        .to_string();
    let o = atc(&["query", "--index", &idx, "--nodes", &nodes, "--auto-kd"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["algo"], "local");

    let report = p(dir.path(), "report.tsv");
    let o = atc(&[
        "eval",
        "--index",
        &idx,
        "--truth",
        &format!("{prefix}.truth"),
        "--queries",
        &format!("{prefix}.queries"),
        "--algo",
        "local",
        "--report",
        &report,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("query\tcommunity\talgo\tstatus"));
    assert!(text.lines().last().unwrap().starts_with("mean\t"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let prefix = p(dir.path(), "syn");
    atc(&[
        "gen",
        "--n",
        "150",
        "--communities",
        "6",
        "--out-prefix",
        &prefix,
        "--queries",
        "8",
    ]);
    let args = [
        "eval",
        "--graph",
        &format!("{prefix}.edges"),
        "--attrs",
        &format!("{prefix}.attrs"),
        "--truth",
        &format!("{prefix}.truth"),
        "--queries",
        &format!("{prefix}.queries"),
        "--algo",
        "bulk",
    ]
    .map(String::from);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_atc"))
            .args(&args)
            .env("ATC_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("0").status.code(), Some(1));
}
