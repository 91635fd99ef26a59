use std::path::Path;
use std::process::{Command, Output};

use bitprobe::report::ExperimentReport;

fn bitprobe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bitprobe")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report_at(path: &Path) -> ExperimentReport {
    ExperimentReport::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn build_prints_the_table() {
    let out = bitprobe(&["scheme", "build", "--kind", "bitvector", "--m", "4", "--set", "2"]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "0010"));
}

#[test]
fn query_absent_and_present() {
    let absent = bitprobe(&["scheme", "query", "--kind", "bitvector", "--m", "4", "--set", "2", "--q", "3"]);
    assert_eq!(code(&absent), 0);
    assert!(stdout(&absent).starts_with("absent"));
    let present = bitprobe(&["scheme", "query", "--kind", "bitvector", "--m", "4", "--set", "2", "--q", "2"]);
    assert!(stdout(&present).starts_with("present"));
}

#[test]
fn table_file_round_trip_through_query() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.table");
    let t = table.to_str().unwrap();
    let base = ["--kind", "perfect-hash", "--m", "300", "--set", "5,77,299", "--seed", "3"];
    let built = bitprobe(&[&["scheme", "build"][..], &base, &["--out", t]].concat());
    assert_eq!(code(&built), 0);
    assert!(std::fs::read_to_string(&table).unwrap().starts_with("bitprobe-table v1 s="));
    for (q, want) in [(77, "present"), (78, "absent")] {
        let qs = q.to_string();
        let out = bitprobe(&[&["scheme", "query"][..], &base, &["--q", &qs, "--table", t]].concat());
        assert!(stdout(&out).starts_with(want), "query {q}");
    }
}

#[test]
fn oneprobe_bench_meets_its_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.json");
    let out = bitprobe(&[
        "scheme", "bench", "--kind", "oneprobe", "--m", "1024", "--n", "8", "--epsilon", "0.1",
        "--trials", "100000", "--seed", "7", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let r = report_at(&path);
    let m = &r.outcomes[0].measured;
    assert!(m["false_positive_rate"].as_f64().unwrap() <= 0.1);
    assert_eq!(m["false_negative_rate"].as_f64().unwrap(), 0.0);
}

#[test]
fn tradeoff_certifies_none() {
    let out = bitprobe(&["verify", "tradeoff", "--m", "3", "--n", "1", "--s", "2", "--t", "1"]);
    assert_eq!(code(&out), 0);
    let r = ExperimentReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(r.outcomes[0].detail, "none exists");
    assert_eq!(r.outcomes[0].measured["inequality_holds"], false);
}

#[test]
fn quantum_bitvector_rank() {
    let out = bitprobe(&["verify", "quantum", "--preset", "bitvector", "--m", "3", "--n", "1"]);
    assert_eq!(code(&out), 0);
    let r = ExperimentReport::from_json(&stdout(&out)).unwrap();
    let m = &r.outcomes[0].measured;
    assert_eq!((m["rank"].as_u64(), m["dimension_bound"].as_str()), (Some(4), Some("4")));
}

#[test]
fn quantum_scheme_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("q.json");
    let s = saved.to_str().unwrap();
    let a = bitprobe(&["verify", "quantum", "--preset", "random", "--s", "3", "--t", "2", "--seed", "4", "--save", s]);
    assert_eq!(code(&a), 0);
    let b = bitprobe(&["verify", "quantum", "--preset", "file", "--scheme", s]);
    assert_eq!(code(&b), 0);
    let (ra, rb) = (ExperimentReport::from_json(&stdout(&a)).unwrap(), ExperimentReport::from_json(&stdout(&b)).unwrap());
    assert_eq!(ra.outcomes[0].measured["rank"], rb.outcomes[0].measured["rank"]);
}

#[test]
fn family_and_gram_pass() {
    let out = bitprobe(&["verify", "family", "--m", "256", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let r = ExperimentReport::from_json(&stdout(&out)).unwrap();
    assert!(r.outcomes[0].measured["size"].as_u64().unwrap() >= 256);
    assert!(r.outcomes[0].measured["max_intersection"].as_u64().unwrap() <= 2);
    assert_eq!(code(&bitprobe(&["verify", "gram"])), 0);
}

#[test]
fn classical_sweep_passes() {
    let out = bitprobe(&["verify", "classical", "--m", "3", "--n", "2", "--s", "3", "--t", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    // header plus one row per (m, n, s, t): (1 + 2 + 2) * 3 * 2
    assert_eq!(stdout(&out).lines().count(), 1 + 30);
}

#[test]
fn exit_statuses() {
    let usage = bitprobe(&["scheme", "build", "--kind", "bitvector", "--m", "4", "--set", "9"]);
    assert_eq!(code(&usage), 2);
    assert_eq!(String::from_utf8(usage.stderr).unwrap().lines().count(), 1);
    assert_eq!(code(&bitprobe(&["verify", "tradeoff", "--m", "3"])), 2);
    assert_eq!(code(&bitprobe(&["verify", "tradeoff", "--m", "6", "--n", "1", "--s", "6", "--t", "1"])), 3);
    assert_eq!(code(&bitprobe(&["verify", "tradeoff", "--m", "3", "--n", "1", "--s", "3", "--t", "1", "--max-space", "2"])), 3);
    assert_eq!(
        code(&bitprobe(&["verify", "tradeoff", "--m", "5", "--n", "2", "--s", "5", "--t", "2", "--node-budget", "10"])),
        3
    );
    // A relative tolerance above 1 discards every singular value, so independence fails.
    let fail = bitprobe(&["verify", "quantum", "--preset", "bitvector", "--m", "3", "--n", "1", "--tolerance", "2"]);
    assert_eq!(code(&fail), 1);
}

#[test]
fn identical_runs_give_identical_payloads() {
    let args = ["verify", "acceptance", "--criteria", "5,7,8"];
    let a = ExperimentReport::from_json(&stdout(&bitprobe(&args))).unwrap();
    let b = ExperimentReport::from_json(&stdout(&bitprobe(&args))).unwrap();
    assert_eq!(a.payload(), b.payload());
    let bench = ["scheme", "bench", "--kind", "oneprobe", "--m", "64", "--n", "2", "--trials", "500", "--seed", "9"];
    assert_eq!(
        ExperimentReport::from_json(&stdout(&bitprobe(&bench))).unwrap().payload(),
        ExperimentReport::from_json(&stdout(&bitprobe(&bench))).unwrap().payload()
    );
}

#[test]
fn merge_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let run = |args: &[&str], out: &str| {
        let o = bitprobe(&[args, &["--out", out]].concat());
        assert_eq!(code(&o), 0, "{args:?}");
    };
    run(&["verify", "family", "--m", "64", "--n", "2"], &p("a.json"));
    run(&["verify", "family", "--m", "64", "--n", "2", "--limit", "5"], &p("b.json"));
    let merged = bitprobe(&["report", "merge", &p("a.json"), &p("b.json"), "--out", &p("m.json")]);
    assert_eq!(code(&merged), 0);
    assert_eq!(report_at(Path::new(&p("m.json"))).outcomes.len(), 2);

    // Same key, different measurement.
    let mut altered = report_at(Path::new(&p("a.json")));
    altered.outcomes[0].measured.insert("size".into(), serde_json::json!(0));
    std::fs::write(p("c.json"), altered.to_json()).unwrap();
    assert_eq!(code(&bitprobe(&["report", "merge", &p("a.json"), &p("c.json")])), 2);

    let mut old = report_at(Path::new(&p("a.json")));
    old.schema = "bitprobe-report/0".into();
    std::fs::write(p("old.json"), old.to_json()).unwrap();
    assert_eq!(code(&bitprobe(&["report", "merge", &p("a.json"), &p("old.json")])), 2);

    run(&["verify", "acceptance"], &p("acc.json"));
    let csv = bitprobe(&["report", "render", &p("acc.json")]);
    let text = stdout(&csv);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "suite,criterion,key,passed,tolerance,measured,detail");
    assert_eq!(lines.len(), 11);
    for (i, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with(&format!("acceptance,{},criterion-{},true,", i + 1, i + 1)), "{line}");
    }
}
