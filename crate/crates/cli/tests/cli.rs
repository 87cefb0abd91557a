use std::fs;
use std::path::Path;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["hamcover"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = hamcover_cli::run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_hamilton_on_k10() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k10.txt");
    let (code, _, _) = run(&["gen", "--n", "10", "--p", "1.0", "--out", s(&g)]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["hamilton", "--graph", s(&g)]);
    assert_eq!(code, 0);
    let mut vs: Vec<usize> = out.split_whitespace().map(|t| t.parse().unwrap()).collect();
    vs.sort_unstable();
    assert_eq!(vs, (0..10).collect::<Vec<_>>());
}

#[test]
fn hamilton_keeps_forced_edges() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let f = dir.path().join("f.txt");
    run(&["gen", "--n", "40", "--p", "0.5", "--seed", "2", "--out", s(&g)]);
    let first_edge = fs::read_to_string(&g).unwrap().lines().nth(1).unwrap().to_string();
    fs::write(&f, format!("40 1\n{first_edge}\n")).unwrap();
    let (code, out, _) = run(&["hamilton", "--graph", s(&g), "--forbid", s(&f)]);
    assert_eq!(code, 0);
    let vs: Vec<usize> = out.split_whitespace().map(|t| t.parse().unwrap()).collect();
    let e: Vec<usize> = first_edge.split_whitespace().map(|t| t.parse().unwrap()).collect();
    let n = vs.len();
    assert!((0..n).any(|i| {
        let (a, b) = (vs[i], vs[(i + 1) % n]);
        (a, b) == (e[0], e[1]) || (b, a) == (e[0], e[1])
    }));
}

#[test]
fn verify_accepts_walecki_k5() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k5.txt");
    let c = dir.path().join("cover.txt");
    run(&["gen", "--n", "5", "--p", "1.0", "--out", s(&g)]);
    fs::write(&c, "0 1 2 4 3\n0 2 3 1 4\n").unwrap();
    let (code, out, _) = run(&["verify", "--graph", s(&g), "--cover", s(&c)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("valid"));

    fs::write(&c, "0 1 2 4 3\n").unwrap();
    let (code, out, _) = run(&["verify", "--graph", s(&g), "--cover", s(&c), "--json"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["ok"], false);
    assert_eq!(v["uncovered"].as_array().unwrap().len(), 5);
}

#[test]
fn cover_on_petersen_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("petersen.txt");
    let mut text = String::from("10 15\n");
    for i in 0..5 {
        text += &format!("{} {}\n{} {}\n{} {}\n", i, (i + 1) % 5, i, i + 5, i + 5, (i + 2) % 5 + 5);
    }
    fs::write(&g, text).unwrap();
    let (code, out, _) = run(&["cover", "--graph", s(&g), "--alpha", "0.5"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["valid"], false);
    assert!(v["error"].is_string());
}

#[test]
fn cover_writes_report_and_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let report = dir.path().join("report.json");
    let cycles = dir.path().join("cycles.txt");
    run(&["gen", "--n", "60", "--p", "0.5", "--seed", "1", "--out", s(&g)]);
    let (code, _, err) = run(&[
        "cover", "--graph", s(&g), "--alpha", "0.5", "--out", s(&report), "--cycles", s(&cycles),
    ]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["config"]["subcommand"], "cover");
    assert!(v["cover_size"].as_u64().unwrap() >= v["lower_bound"].as_u64().unwrap());
    let (code, _, _) = run(&["verify", "--graph", s(&g), "--cover", s(&cycles)]);
    assert_eq!(code, 0);
}

#[test]
fn gen_is_deterministic() {
    let (_, a, _) = run(&["gen", "--n", "50", "--p", "0.3", "--seed", "7", "--stream", "2"]);
    let (_, b, _) = run(&["gen", "--n", "50", "--p", "0.3", "--seed", "7", "--stream", "2"]);
    let (_, c, _) = run(&["gen", "--n", "50", "--p", "0.3", "--seed", "7", "--stream", "3"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("50 "));
}

#[test]
fn report_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    run(&["gen", "--n", "12", "--p", "0.6", "--out", s(&g)]);
    let (code, out, _) = run(&["check", "--graph", s(&g), "--s", "1.5", "--g", "2", "--l", "2", "--exhaustive"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["config"]["subcommand"], "check");
    assert_eq!(v["config"]["s"], 1.5);
    assert_eq!(v["config"]["exhaustive"], true);
    assert!(v["exhaustive"]["small_holds"].is_boolean());
}

#[test]
fn experiment_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("runs.csv");
    let (code, _, err) = run(&["experiment", "--n", "64", "--p", "0.5", "--seeds", "3", "--out", s(&out)]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n,p,seed,stream,"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn bad_flag_exits_2() {
    let (code, _, err) = run(&["gen", "--n", "5", "--p", "0.5", "--bogus"]);
    assert_eq!(code, 2);
    assert!(err.contains("--bogus"));
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn malformed_graph_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.txt");
    fs::write(&g, "4 2\n0 1\n1 x\n").unwrap();
    let (code, _, err) = run(&["hamilton", "--graph", s(&g)]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
    let (code, _, err) = run(&["hamilton", "--graph", s(&dir.path().join("missing.txt"))]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gen.conf");
    fs::write(&cfg, "# sample\nn = 30\np = 0.4\nseed = 11\n").unwrap();
    let (code, from_cfg, _) = run(&["gen", "--config", s(&cfg)]);
    assert_eq!(code, 0);
    let (_, direct, _) = run(&["gen", "--n", "30", "--p", "0.4", "--seed", "11"]);
    assert_eq!(from_cfg, direct);
    let (_, overridden, _) = run(&["gen", "--config", s(&cfg), "--seed", "12"]);
    let (_, direct12, _) = run(&["gen", "--n", "30", "--p", "0.4", "--seed", "12"]);
    assert_eq!(overridden, direct12);
    assert_eq!(run(&["gen", "--config", s(&dir.path().join("none"))]).0, 2);
}
