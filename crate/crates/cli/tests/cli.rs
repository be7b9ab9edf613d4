use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn symdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn spec(name: &str) -> String {
    specs().join(name).to_string_lossy().into_owned()
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

#[test]
fn halting_on_the_full_shift() {
    let out = symdyn(&[
        "check",
        "--system",
        &spec("fullshift.json"),
        "--query",
        "halting",
        "--u",
        "[0]",
        "--v",
        "[1]",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = &lines(&out)[0];
    assert_eq!(v["outcome"], "holds");
    assert_eq!(v["evidence"]["word"], serde_json::json!(["U", "V"]));
    assert_eq!(v["point"]["word"], "0 1");
}

/// Binary words of length at most `n` avoiding `11`, by brute force.
fn golden_words(n: usize) -> usize {
    (0..=n)
        .map(|len| (0..1u32 << len).filter(|&x| x & (x >> 1) == 0).count())
        .sum()
}

#[test]
fn golden_mean_language_count() {
    let out = symdyn(&[
        "lang",
        "--system",
        &spec("golden.json"),
        "--partition",
        "depth1",
        "--maxlen",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0];
    assert_eq!(v["count"].as_u64().unwrap() as usize, golden_words(4));
    let words = v["words"].as_array().unwrap();
    assert!(words.iter().all(|w| !w.as_str().unwrap().contains("1 1")));
}

#[test]
fn schema_errors_exit_one_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"kind": "sft", "space": {"alphabet": "01"}, "forbidden": [1]}"#,
    )
    .unwrap();
    let out = symdyn(&[
        "check",
        "--system",
        bad.to_str().unwrap(),
        "--query",
        "basin",
        "--u",
        "[1]",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("forbidden[0]"));
    let out = symdyn(&[
        "check",
        "--system",
        &spec("golden.json"),
        "--query",
        "halting",
        "--u",
        "[2]",
        "--v",
        "[1]",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_exits_two() {
    let out = symdyn(&[
        "check",
        "--system",
        &spec("fullshift.json"),
        "--query",
        "io",
        "--u",
        "[1]",
        "--budget-iter",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(lines(&out)[0]["outcome"], "unknown");
}

#[test]
fn batch_is_deterministic() {
    let file = spec("queries/golden_batch.json");
    let a = symdyn(&["check", "--query", &file]);
    let b = symdyn(&["check", "--query", &file]);
    assert_eq!(a.stdout, b.stdout);
    let verdicts = lines(&a);
    let outcomes: Vec<&str> = verdicts
        .iter()
        .map(|v| v["outcome"].as_str().unwrap())
        .collect();
    assert_eq!(
        outcomes,
        ["holds", "fails", "fails", "holds", "holds", "unknown"]
    );
    assert_eq!(a.status.code(), Some(2));
}

#[test]
fn canon_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.json");
    let once = dir.path().join("once.json");
    let twice = dir.path().join("twice.json");
    std::fs::write(
        &raw,
        r#"{"space": {"alphabet": "01", "two_sided": true}, "cylinders": [{"anchor": -1, "word": "10"}, {"anchor": -1, "word": "11"}, {"anchor": 2, "word": "0"}]}"#,
    )
    .unwrap();
    for (from, to) in [(&raw, &once), (&once, &twice)] {
        let out = symdyn(&[
            "canon",
            from.to_str().unwrap(),
            "--out",
            to.to_str().unwrap(),
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    assert_eq!(
        std::fs::read(&once).unwrap(),
        std::fs::read(&twice).unwrap()
    );
}

#[test]
fn halting_figure_dot_drops_the_sink() {
    let out = symdyn(&["export", "automaton", "--automaton", "halting"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        dot.matches("shape=circle").count() + dot.matches("shape=doublecircle").count(),
        3
    );
    assert!(!dot.contains("sink"));
}

#[test]
fn ball_graph_json_export() {
    let out = symdyn(&[
        "export",
        "ball-graph",
        "--system",
        &spec("golden.json"),
        "--partition",
        "depth1",
        "--level",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    // start plus the three allowed words of length 2
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
    assert_eq!(v["exact"], true);
}

/// Direct simulation from the machine JSON: steps to halt, if within `cutoff`.
fn simulate(machine: &Value, n: usize, cutoff: u64) -> Option<u64> {
    let rules: HashMap<(String, String), (String, String, String)> = machine["rules"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let f = |i: usize| r[i].as_str().unwrap().to_string();
            ((f(0), f(1)), (f(2), f(3), f(4)))
        })
        .collect();
    let blank = machine["alphabet"][0].as_str().unwrap().to_string();
    let halting: Vec<&str> = machine["halting"]
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h.as_str().unwrap())
        .collect();
    let mut tape: HashMap<i64, String> = (0..n as i64).map(|i| (i, "1".to_string())).collect();
    let (mut state, mut head) = (machine["initial"].as_str().unwrap().to_string(), 0i64);
    for t in 0..=cutoff {
        if halting.contains(&state.as_str()) {
            return Some(t);
        }
        let read = tape.get(&head).cloned().unwrap_or_else(|| blank.clone());
        let (write, mv, next) = rules.get(&(state.clone(), read))?.clone();
        tape.insert(head, write);
        head += match mv.as_str() {
            "L" => -1,
            "R" => 1,
            _ => 0,
        };
        state = next;
    }
    None
}

#[test]
fn build_table_matches_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    let out = symdyn(&[
        "gallery",
        "build-table",
        "--machine",
        &spec("machines/bb3.json"),
        "--cutoff",
        "200",
        "--max-input",
        "5",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&table).unwrap()).unwrap();
    let entries = v["entries"].as_object().unwrap();
    assert_eq!(entries.len(), 5);
    for (n, entry) in entries {
        let n: usize = n.parse().unwrap();
        match simulate(&v["machine"], n, 200) {
            Some(t) => assert_eq!(entry["halts"].as_u64(), Some(t), "input {n}"),
            None => assert!(entry.get("halts").is_none(), "input {n}"),
        }
    }
}

#[test]
fn shipped_machine_files_match_the_library() {
    for name in ["parity4", "bb3"] {
        let out = symdyn(&["gallery", "machine", name]);
        let shipped =
            std::fs::read_to_string(specs().join(format!("machines/{name}.json"))).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), shipped, "{name}");
    }
}

#[test]
fn gallery_systems_from_a_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("parity.json");
    let out = symdyn(&[
        "gallery",
        "build-table",
        "--machine",
        "parity4",
        "--cutoff",
        "50",
        "--max-input",
        "4",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let system = dir.path().join("universal.json");
    std::fs::write(
        &system,
        r#"{"kind": "gallery", "name": "universal", "table": "parity.json"}"#,
    )
    .unwrap();
    // input 2 halts, input 1 does not
    for (n, expected) in [(2, "holds"), (1, "fails")] {
        let u = format!("[0{}0]", "1".repeat(n));
        let out = symdyn(&[
            "check",
            "--system",
            system.to_str().unwrap(),
            "--query",
            "halting",
            "--u",
            &u,
            "--v",
            "[001]",
        ]);
        let v = &lines(&out)[0];
        assert_eq!(v["outcome"], expected, "input {n}: {v}");
    }
}

#[test]
fn basin_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("z.json");
    std::fs::write(&z, r#"{"kind": "prepend_zero"}"#).unwrap();
    let z = z.to_str().unwrap();
    let out = symdyn(&["basin", "--system", z, "--u", "[0]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &lines(&out)[0];
    assert_eq!(v["query"], "basin");
    assert_eq!(v["evidence"]["iterations"], 2);
    let out = symdyn(&["basin", "--system", z, "--u", "[1]"]);
    assert_eq!(lines(&out)[0]["evidence"]["set"], "[1]");
    let out = symdyn(&["basin", "--system", z, "--u", "[1]", "--io"]);
    assert_eq!(lines(&out)[0]["query"], "io");
    assert_eq!(lines(&out)[0]["evidence"]["set"], "∅");
}

#[test]
fn selftest_honors_the_seed() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_symdyn"))
            .args(["selftest", "--cases", "10"])
            .env("SYMDYN_SEED", seed)
            .output()
            .expect("binary runs")
    };
    let out = run("7");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(text.starts_with("selftest (seed 7)"));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    assert_eq!(run("0x7").stdout, out.stdout);
    assert_eq!(run("seven").status.code(), Some(1));
}
