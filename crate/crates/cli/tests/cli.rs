use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn coreres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coreres")).args(args).env("RUST_LOG", "off").output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_graph(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn decompose_triangle_with_pendant() {
    let tmp = TempDir::new().unwrap();
    let g = write_graph(&tmp, "g.txt", "# comment\n10 20\n20 30\n30 10\n30 40\n");
    let out = tmp.path().join("out");
    let o = coreres(&["decompose", "--graph", s(&g), "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cores = fs::read_to_string(out.join("cores.csv")).unwrap();
    assert_eq!(cores, "node,core,shell,subcore\n10,2,2,10\n20,2,2,10\n30,2,2,10\n40,1,1,40\n");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["max_core"], 2);
    assert_eq!(summary["edges"], 4);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn removal_strengths_on_csx() {
    let tmp = TempDir::new().unwrap();
    let g = write_graph(&tmp, "csx.txt", "0 1\n0 2\n0 3\n0 4\n1 2\n3 4\n");
    let out = tmp.path().join("out");
    let o = coreres(&["strengths", "--mode", "removal", "--verify", "--graph", s(&g), "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("removal_strengths.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("node,core,cs,rs_id,rs_od"));
    assert_eq!(lines.next(), Some("0,2,3,inf,4"));
    assert_eq!(lines.next(), Some("1,2,1,0.5,1"));
    let coronas = fs::read_to_string(out.join("coronas.csv")).unwrap();
    assert_eq!(coronas.lines().count(), 3);
}

#[test]
fn empty_file_is_a_parse_error() {
    let tmp = TempDir::new().unwrap();
    let g = write_graph(&tmp, "empty.txt", "");
    let o = coreres(&["decompose", "--graph", s(&g), "--out-dir", s(&tmp.path().join("out"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn strict_parse_rejects_garbage() {
    let tmp = TempDir::new().unwrap();
    let g = write_graph(&tmp, "bad.txt", "0 1\nfoo bar\n1 2\n");
    let out = tmp.path().join("out");
    assert!(coreres(&["decompose", "--graph", s(&g), "--out-dir", s(&out)]).status.success());
    let o = coreres(&["decompose", "--strict-parse", "--graph", s(&g), "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_file_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let o = coreres(&["decompose", "--graph", s(&tmp.path().join("nope.txt"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn parameter_errors() {
    let tmp = TempDir::new().unwrap();
    let g = write_graph(&tmp, "g.txt", "0 1\n1 2\n2 0\n2 3\n");
    let out = tmp.path().join("out");
    let o = coreres(&[
        "critical-edges",
        "--mode",
        "removal",
        "--methods",
        "pagerank",
        "--graph",
        s(&g),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pagerank"));
    let o = coreres(&["spreaders", "--fraction", "1.5", "--graph", s(&g), "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(4));
    let o = coreres(&["strengths", "--mode", "insertion", "--b", "0", "--graph", s(&g), "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(coreres(&["strengths"]).status.code(), Some(2));
    assert_eq!(coreres(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn critical_edges_table() {
    let tmp = TempDir::new().unwrap();
    let g = tmp.path().join("er.txt");
    let out = tmp.path().join("out");
    let o = coreres(&["generate", "--n", "60", "--p", "0.1", "--seed", "2", "--out", s(&g)]);
    assert!(o.status.success());
    let o = coreres(&[
        "critical-edges",
        "--mode",
        "removal",
        "--methods",
        "rs_id,random",
        "--budgets",
        "5,10",
        "--random-runs",
        "4",
        "--graph",
        s(&g),
        "--out-dir",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("critical_edges.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "method,budget,F");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().any(|l| l.starts_with("random,10,")));
}

#[test]
fn replay_reproduces_outputs() {
    let tmp = TempDir::new().unwrap();
    let g = tmp.path().join("ba.txt");
    assert!(coreres(&["generate", "--model", "ba", "--n", "80", "--m", "2", "--seed", "9", "--out", s(&g)])
        .status
        .success());
    let out = tmp.path().join("first");
    let o = coreres(&["spreaders", "--methods", "rs_od,degree", "--runs", "5", "--graph", s(&g), "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let again = tmp.path().join("again");
    let o = coreres(&["replay", "--manifest", s(&out.join("manifest.json")), "--out-dir", s(&again)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["seeds.csv", "sir.csv"] {
        assert_eq!(fs::read(out.join(name)).unwrap(), fs::read(again.join(name)).unwrap(), "{name}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["invocation"]["command"], "spreaders");
    assert!(manifest["resolved"]["beta"].is_number());
}

#[test]
fn corrupt_manifest_is_a_parse_error() {
    let tmp = TempDir::new().unwrap();
    let m = write_graph(&tmp, "manifest.json", "{not json");
    assert_eq!(coreres(&["replay", "--manifest", s(&m)]).status.code(), Some(3));
}
