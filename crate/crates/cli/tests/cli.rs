use std::path::Path;
use std::process::{Command, Output};

fn devassist(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_devassist"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn route_default_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = devassist(&["route", "--complexity", "low", "--device", "cpu", "--network", "good", "--battery", "ok"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("edge"));
    assert!(stdout(&o).contains("latency_ms: 300"));

    let o = devassist(&["route", "--complexity", "high", "--device", "cpu", "--network", "good", "--battery", "ok"], dir.path());
    assert_eq!(stdout(&o).lines().next(), Some("cloud"));
    assert!(stdout(&o).contains("latency_ms: 3000"));

    for c in ["low", "medium", "high"] {
        for d in ["cpu", "gpu"] {
            let o = devassist(&["route", "--complexity", c, "--device", d, "--network", "offline", "--battery", "low"], dir.path());
            assert_eq!(stdout(&o).lines().next(), Some("edge"));
        }
    }
}

#[test]
fn route_with_saved_policy() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["route", "--complexity", "high", "--device", "cpu", "--network", "good", "--battery", "ok"];
    let mut save = args.to_vec();
    save.extend(["--save-policy", "p.json"]);
    assert_eq!(devassist(&save, dir.path()).status.code(), Some(0));
    let mut load = args.to_vec();
    load.extend(["--policy", "p.json"]);
    let o = devassist(&load, dir.path());
    assert_eq!(stdout(&o).lines().next(), Some("cloud"));

    std::fs::write(dir.path().join("c.yaml"), "router:\n  good_rtt_ms: 100\n").unwrap();
    let mut other = load.clone();
    other.extend(["--config", "c.yaml"]);
    assert_eq!(devassist(&other, dir.path()).status.code(), Some(2));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = devassist(&["route", "--complexity", "extreme", "--device", "cpu", "--network", "good", "--battery", "ok"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(devassist(&["frobnicate"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.yaml"), "router:\n  gamma: [1,\n").unwrap();
    let o = devassist(&["simulate", "--config", "bad.yaml", "--out", "r.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));
    assert_eq!(devassist(&["simulate", "--config", "missing.yaml"], dir.path()).status.code(), Some(3));
}

#[test]
fn simulate_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.yaml"), "workload:\n  n_tasks: 3000\nsimulation:\n  seed: 5\n").unwrap();
    for out in ["a.json", "b.json"] {
        let o = devassist(&["simulate", "--config", "c.yaml", "--seed", "42", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["metrics"]["seed"], 42);
    assert_eq!(v["metrics"]["n_tasks"], 3000);
}

#[test]
fn simulate_event_log_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.yaml"), "workload:\n  n_tasks: 1000\n").unwrap();
    let o = devassist(&["simulate", "--config", "c.yaml", "--policy", "all-cloud", "--out", "r.json", "--events", "e.jsonl"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    let events = std::fs::read_to_string(dir.path().join("e.jsonl")).unwrap();
    let parsed: Vec<serde_json::Value> = events.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(parsed.len(), 1000);
    let failed = parsed.iter().filter(|e| e["failed"] == true).count();
    assert_eq!(report["metrics"]["failed_tasks"], failed);
    assert_eq!(report["metrics"]["cloud_call_fraction"], 1.0);
}

#[test]
fn compare_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.yaml"), "workload:\n  n_tasks: 2000\nsimulation:\n  policies: [all_cloud, mdp]\n").unwrap();
    let o = devassist(&["compare", "--config", "c.yaml", "--out", "cmp.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("cmp.json")).unwrap()).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
    assert!(v["deltas"][1]["cloud_call_fraction"].as_f64().unwrap() < 0.0);
    let csv = std::fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("all_cloud,"));
}

#[test]
fn index_caps_at_500_files() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    std::fs::create_dir(&src).unwrap();
    for i in 0..600 {
        std::fs::write(
            src.join(format!("F{i:03}.java")),
            format!("class F{i} {{ void run() {{ helper{}(); }} }}\n", i % 7),
        )
        .unwrap();
    }
    let o = devassist(&["index", "src", "--out", "index.bin"], dir.path());
    assert_eq!(o.status.code(), Some(1), "degraded run exits 1");
    assert!(stdout(&o).contains("indexed 500 files"));
    let err = stderr(&o);
    assert!(err.contains("skipped 100 files"), "{err}");
    let listed: Vec<&str> = err.lines().filter(|l| l.trim_start().ends_with(".java")).collect();
    assert_eq!(listed.len(), 100);
    assert!(listed[0].contains("F500.java") && listed[99].contains("F599.java"));

    let q = devassist(&["query", "class F3 { void run() { helper3(); } }", "--index", "index.bin", "--top-k", "5", "--budget", "60"], dir.path());
    assert_eq!(q.status.code(), Some(0), "{}", stderr(&q));
    let v: serde_json::Value = serde_json::from_str(&stdout(&q)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(v["total_tokens"].as_u64().unwrap() <= 60);
    let total: f64 = entries.iter().map(|e| e["weight"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert!(entries.iter().all(|e| e["source"] == "code_context"));

    let o = devassist(&["index", "src", "--max-files", "1000", "--out", "all.bin"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("indexed 600 files"));
}

#[test]
fn index_output_is_order_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    std::fs::create_dir_all(src.join("pkg")).unwrap();
    for i in 0..40 {
        std::fs::write(src.join(format!("pkg/M{i}.java")), format!("class M{i} extends Base {{ }}")).unwrap();
    }
    std::fs::write(src.join("README.md"), "free text, not code").unwrap();
    devassist(&["index", "src", "--out", "a.bin"], dir.path());
    devassist(&["index", "src", "--out", "b.bin"], dir.path());
    assert_eq!(std::fs::read(dir.path().join("a.bin")).unwrap(), std::fs::read(dir.path().join("b.bin")).unwrap());
}

#[test]
fn query_with_extra_context() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("src")).unwrap();
    std::fs::write(dir.path().join("src/A.java"), "class A { void f() { g(); } }").unwrap();
    devassist(&["index", "src", "--out", "i.bin"], dir.path());
    std::fs::write(
        dir.path().join("ctx.json"),
        r#"[{"source": "ide_interaction", "text": "opened A.java at f", "timestamp": 100},
            {"source": "runtime_log", "text": "NullPointerException in f", "timestamp": 90, "near_breakpoint": true}]"#,
    )
    .unwrap();
    let q = devassist(&["query", "why does f crash", "--index", "i.bin", "--context", "ctx.json"], dir.path());
    assert_eq!(q.status.code(), Some(0), "{}", stderr(&q));
    let v: serde_json::Value = serde_json::from_str(&stdout(&q)).unwrap();
    let sources: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["source"].as_str().unwrap()).collect();
    assert_eq!(sources.len(), 3);
    for s in ["ide_interaction", "runtime_log", "code_context"] {
        assert!(sources.contains(&s));
    }

    let o = devassist(&["query", "x", "--index", "i.bin", "--budget", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = devassist(&["query", "x", "--index", "nope.bin"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(dir.path().join("junk.bin"), "not an index").unwrap();
    let o = devassist(&["query", "x", "--index", "junk.bin"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn describe_layout_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("ok.xml"),
        r#"<ConstraintLayout><TextView id="B"/><Button id="A" onClick="go" layout_centeredBelow="B"/></ConstraintLayout>"#,
    )
    .unwrap();
    let o = devassist(&["describe-layout", "ok.xml"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["statements"][0]["text"], "Button A is centered below TextView B");
    assert_eq!(v["findings"].as_array().unwrap().len(), 0);

    std::fs::write(dir.path().join("bad.xml"), r#"<L><Button id="A"/></L>"#).unwrap();
    let o = devassist(&["describe-layout", "bad.xml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["findings"][0]["kind"], "MissingClickHandler");

    std::fs::write(dir.path().join("broken.xml"), "<L><A></L>").unwrap();
    assert_eq!(devassist(&["describe-layout", "broken.xml"], dir.path()).status.code(), Some(2));
    assert_eq!(devassist(&["describe-layout", "absent.xml"], dir.path()).status.code(), Some(3));
}
