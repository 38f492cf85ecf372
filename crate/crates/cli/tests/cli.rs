use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::Deserialize;
use serde_json::Value;

#[derive(Deserialize)]
struct Expect {
    pointer: String,
    equals: Value,
}

#[derive(Deserialize)]
struct Fixture {
    name: String,
    args: Vec<String>,
    exit: i32,
    expect: Vec<Expect>,
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subfactor"))
        .args(args)
        .env("SUBFACTOR_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn corpus_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.ndjson");
    let mut paths: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    assert!(paths.len() >= 10);
    for p in paths {
        let fx: Fixture = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
        let args: Vec<&str> = fx.args.iter().map(String::as_str).collect();
        let out = run(&args, &cache);
        assert_eq!(
            out.status.code(),
            Some(fx.exit),
            "{}: stderr {}",
            fx.name,
            String::from_utf8_lossy(&out.stderr)
        );
        if fx.expect.is_empty() {
            continue;
        }
        let v = json_of(&out);
        for e in &fx.expect {
            assert_eq!(v.pointer(&e.pointer), Some(&e.equals), "{}: {}", fx.name, e.pointer);
        }
    }
}

#[test]
fn reports_echo_config_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.ndjson");
    let args = ["project", "--rank", "3", "--a", "a,b", "--b", "ab,c", "--seed", "5"];
    let first = run(&args, &cache);
    let second = run(&args, &cache);
    assert_eq!(first.stdout, second.stdout);
    let v = json_of(&first);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["splittings"], 8);
}

#[test]
fn cold_and_warm_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.ndjson");
    let args = ["classify", "--rank", "3", "--a", "abC", "--b", "b,c"];
    let cold = run(&args, &cache);
    let lines = fs::read_to_string(&cache).unwrap();
    assert_eq!(lines.lines().count(), 2);
    let warm = run(&args, &cache);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(fs::read_to_string(&cache).unwrap(), lines, "warm run appends nothing");
}

#[test]
fn torn_cache_line_is_tolerated() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.ndjson");
    fs::write(&cache, "{\"key\":\"F3:r3v1:0a0\",\"verd").unwrap();
    let out = run(&["classify", "--rank", "3", "--a", "a", "--b", "b"], &cache);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&cache).unwrap();
    let parsed = text
        .lines()
        .filter(|l| serde_json::from_str::<Value>(l).is_ok())
        .count();
    assert_eq!(parsed, 2, "{text}");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.ndjson");
    for args in [
        vec!["classify", "--rank", "3", "--a", "a,b"],
        vec!["classify", "--rank", "2", "--a", "a,x", "--b", "b"],
        vec!["verify", "--suite", "nope"],
        vec!["farey", "--u", "aa", "--v", "b"],
        vec!["pingpong", "--f", "b,ab,c", "--g", "a,c,bc", "--syllables", "1,0"],
    ] {
        assert_eq!(run(&args, &cache).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn certificate_file_is_a_marked_graph() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.ndjson");
    let cert = dir.path().join("cert.json");
    let out = run(
        &["classify", "--rank", "3", "--a", "a,b", "--b", "c", "--certificate", cert.to_str().unwrap()],
        &cache,
    );
    assert_eq!(out.status.code(), Some(0));
    let g: subfactor_core::marked::MarkedGraphRecord = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let g = g.to_graph().unwrap();
    let a = subfactor_core::FactorClass::parse(3, "a,b").unwrap();
    let c = subfactor_core::FactorClass::parse(3, "c").unwrap();
    assert!(subfactor_core::projection::disjointly_embedded(&a, &c, &g).unwrap());
}
