use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fx(name: &str) -> String {
    fixtures().join(name).display().to_string()
}

fn prefdial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prefdial")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = prefdial(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn simulate(out: &Path, n: &str, seed: &str, jobs: &str) {
    let (scenes, ontology, policy) = (fx("scenes.json"), fx("ontology.json"), fx("policy.json"));
    ok(&[
        "simulate", "--scenes", &scenes, "--ontology", &ontology, "--policy", &policy, "--n", n, "--seed", seed, "--out",
        p(out), "--jobs", jobs,
    ]);
}

#[test]
fn validate_accepts_the_fixture_pack() {
    let (scenes, meta, ontology) = (fx("scenes.json"), fx("metadata.json"), fx("ontology.json"));
    let out = ok(&[
        "validate", "--scenes", &scenes, "--metadata", &meta, "--ontology", &ontology, "--policy", &fx("policy.json"),
        "--templates", &fx("templates.json"),
    ]);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["scenes"], 10);
}

#[test]
fn validate_rejects_broken_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("ontology.json");
    std::fs::write(&bad, r#"[{"attribute": "color", "concepts": [{"concept_id": "x", "values": ["plaid"], "surface_forms": ["x"]}]}]"#)
        .unwrap();
    let out = prefdial(&["validate", "--scenes", &fx("scenes.json"), "--ontology", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let flows = dir.path().join("d.jsonl");
    simulate(&flows, "5", "1", "1");
    let text = std::fs::read_to_string(&flows).unwrap().replacen("\"target_object_id\":", "\"target_object_id\":1", 1);
    std::fs::write(&flows, text).unwrap();
    let out = prefdial(&["validate", "--scenes", &fx("scenes.json"), "--ontology", &fx("ontology.json"), "--flows", p(&flows)]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(prefdial(&[]).status.code(), Some(2));
    assert_eq!(prefdial(&["simulate", "--n", "3"]).status.code(), Some(2));
    let out = prefdial(&["eval", "--task", "mr", "--pred", "a", "--gold", "b"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("possible values"));
    assert_eq!(prefdial(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_twice_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    simulate(&a, "100", "7", "1");
    simulate(&b, "100", "7", "3");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read_to_string(&a).unwrap().lines().count(), 100);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "simulate");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["outputs"][0], p(&a));
}

#[test]
fn pipeline_scores_gold_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (scenes, ontology) = (fx("scenes.json"), fx("ontology.json"));
    simulate(&d.join("d.jsonl"), "60", "3", "0");
    ok(&[
        "realize", "--scenes", &scenes, "--ontology", &ontology, "--templates", &fx("templates.json"), "--flows",
        p(&d.join("d.jsonl")), "--out", p(&d.join("r.jsonl")),
    ]);
    for task in ["spd", "rru", "act", "response", "recommend"] {
        let gold = d.join(format!("{task}.jsonl"));
        ok(&["gold", "--scenes", &scenes, "--ontology", &ontology, "--flows", p(&d.join("r.jsonl")), "--task", task, "--out", p(&gold)]);
        let report = d.join(format!("{task}.report.json"));
        ok(&["eval", "--task", task, "--pred", p(&gold), "--gold", p(&gold), "--out", p(&report)]);
        let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(r["task"], task);
        let headline = if task == "response" { &r["bleu"] } else { &r["micro"]["f1"] };
        assert_eq!(headline.as_f64(), Some(1.0), "{task}: {r}");
        if task == "spd" {
            assert_eq!(r["mode"], "cumulative");
        }
    }
    let csv = ok(&["eval", "--task", "spd", "--pred", p(&d.join("spd.jsonl")), "--gold", p(&d.join("spd.jsonl")), "--format", "csv"]);
    let csv = String::from_utf8(csv.stdout).unwrap();
    assert!(csv.starts_with("metric,value\n") && csv.contains("micro.f1,1\n"));
}

#[test]
fn missing_predictions_lower_recall() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    simulate(&d.join("d.jsonl"), "20", "5", "1");
    ok(&[
        "gold", "--scenes", &fx("scenes.json"), "--ontology", &fx("ontology.json"), "--flows", p(&d.join("d.jsonl")), "--task", "spd",
        "--mode", "scene-only", "--out", p(&d.join("g.jsonl")),
    ]);
    let gold = std::fs::read_to_string(d.join("g.jsonl")).unwrap();
    let half: String = gold.lines().step_by(2).map(|l| format!("{l}\n")).collect();
    std::fs::write(d.join("p.jsonl"), half).unwrap();
    let out = ok(&["eval", "--task", "spd", "--pred", p(&d.join("p.jsonl")), "--gold", p(&d.join("g.jsonl"))]);
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["micro"]["precision"], 1.0);
    assert!(r["micro"]["recall"].as_f64().unwrap() < 1.0);
    assert_eq!(r["mode"], "scene_only");
}

#[test]
fn split_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    simulate(&d.join("d.jsonl"), "100", "9", "1");
    ok(&["split", "--flows", p(&d.join("d.jsonl")), "--seed", "4", "--out-dir", p(&d.join("parts"))]);
    let sizes: Vec<usize> = ["train", "dev", "devtest", "teststd"]
        .iter()
        .map(|n| std::fs::read_to_string(d.join("parts").join(format!("{n}.jsonl"))).unwrap().lines().count())
        .collect();
    assert_eq!(sizes, [65, 5, 15, 15]);
    assert!(d.join("parts/split.manifest.json").exists());
    assert_eq!(prefdial(&["split", "--flows", p(&d.join("d.jsonl")), "--ratios", "0.5,0.6,0,0", "--out-dir", p(d)]).status.code(), Some(1));

    let out = ok(&["stats", "--flows", p(&d.join("d.jsonl"))]);
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["dialogs"], 100);
    ok(&["stats", "--flows", p(&d.join("d.jsonl")), "--format", "csv", "--out", p(&d.join("stats.csv"))]);
    let csv = std::fs::read_to_string(d.join("stats.csv")).unwrap();
    assert!(csv.starts_with("section,round,from,to,count,value\n"));
    assert!(csv.lines().any(|l| l.starts_with("transition,1,START,ASK_PREFERENCE,")));
    assert!(d.join("stats.csv.manifest.json").exists());
}

#[test]
fn outputs_may_not_overwrite_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let flows = dir.path().join("d.jsonl");
    simulate(&flows, "5", "1", "1");
    let before = std::fs::read(&flows).unwrap();
    let out = prefdial(&["stats", "--flows", p(&flows), "--out", p(&flows)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(std::fs::read(&flows).unwrap(), before);
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.jsonl");
    simulate(&out, "200", "11", "1");
    let first = std::fs::read(&out).unwrap();
    std::fs::remove_file(&out).unwrap();
    ok(&["replay", "--manifest", p(&dir.path().join("d.jsonl.manifest.json")), "--jobs", "8"]);
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.jsonl.manifest.json")).unwrap()).unwrap();
    let args: Vec<&str> = manifest["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap()).collect();
    assert_eq!(&args[args.len() - 2..], ["--jobs", "8"]);
}
