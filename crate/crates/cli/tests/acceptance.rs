//! End-to-end acceptance run against the `pentatile` binary.
//!
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use pentatile_core::spec_file::corpus;
use pentatile_core::{corollary1_applies, tentative_3valent_profile, Tolerance};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_pentatile");
const TYPES: [&str; 8] = ["1", "2", "4", "5", "6", "7", "8", "9"];

fn corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/corpus.pent")
}

struct Run {
    code: i32,
    report: Value,
    text: String,
    elapsed: Duration,
}

fn run(dir: &Path, tag: &str, args: &[&str]) -> Run {
    let out = dir.join(format!("{tag}.json"));
    let start = Instant::now();
    let status = Command::new(BIN)
        .args(args)
        .arg("-o")
        .arg(&out)
        .env_remove("PENTATILE_WORKERS")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    Run {
        code: status.status.code().unwrap_or(-1),
        report: serde_json::from_str(&text).unwrap_or(Value::Null),
        text,
        elapsed,
    }
}

/// The report with timing fields removed.
fn stable(r: &Run) -> String {
    let mut v = r.report.clone();
    if let Some(o) = v.as_object_mut() {
        o.remove("metadata");
        if let Some(res) = o.get_mut("result").and_then(Value::as_object_mut) {
            res.remove("metadata");
        }
    }
    serde_json::to_string(&v).unwrap()
}

type Criterion = fn(&mut Ctx) -> Outcome;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

struct Ctx {
    dir: tempfile::TempDir,
    corpus: String,
    certs: Vec<(String, Run)>,
}

impl Ctx {
    fn run(&self, tag: &str, args: &[&str]) -> Run {
        run(self.dir.path(), tag, args)
    }
}

fn pattern_count(cx: &mut Ctx) -> Outcome {
    let r = cx.run("enumerate", &["enumerate"]);
    let n = r.report["result"]["count"].as_u64();
    check(
        r.code == 0 && n == Some(465) && r.elapsed < Duration::from_secs(1),
        format!("{n:?} patterns in {:?}", r.elapsed),
    )
}

fn raw_count(cx: &mut Ctx) -> Outcome {
    let r = cx.run("enumerate-raw", &["enumerate"]);
    let n = r.report["result"]["raw_multisets"].as_u64();
    check(n == Some(35), format!("{n:?} multisets"))
}

fn certification(cx: &mut Ctx) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for t in TYPES {
        let name = format!("type{t}");
        let r = cx.run(&format!("certify-{name}"), &["certify", &cx.corpus, "--name", &name]);
        let res = &r.report["result"];
        let cert = &res["certificate"];
        let area_ok = cert["checks"]["area_identity"].as_bool() == Some(true);
        let depth = cert["search"]["depth"].as_u64().unwrap_or(0);
        let nodes_ok = cert["nodes"]
            .as_array()
            .is_some_and(|ns| ns.iter().all(|n| (n["angle_sum"].as_f64().unwrap_or(0.0) - 360.0).abs() <= 1e-6));
        let cell = cert["lattice"].is_object();
        let tiles = cert["tiles"].as_array().map_or(0, Vec::len) as f64;
        let area = cert["prototile"]["area"].as_f64().unwrap_or(0.0);
        let t1 = &cert["lattice"]["t1"];
        let t2 = &cert["lattice"]["t2"];
        let det = t1["x"].as_f64().unwrap_or(0.0) * t2["y"].as_f64().unwrap_or(0.0)
            - t1["y"].as_f64().unwrap_or(0.0) * t2["x"].as_f64().unwrap_or(0.0);
        let area_rel = (det.abs() - tiles * area).abs() / det.abs().max(f64::MIN_POSITIVE);
        let ok = r.code == 0
            && res["status"] == "certified"
            && depth >= 3
            && cell
            && area_ok
            && area_rel <= 1e-6
            && nodes_ok;
        if !ok {
            bad.push(format!("{name} (exit {}, depth {depth}, area rel {area_rel:.1e})", r.code));
        }
        cx.certs.push((name, r));
    }
    let total = start.elapsed();
    check(
        bad.is_empty() && total < Duration::from_secs(300),
        if bad.is_empty() {
            format!("8/8 certified in {total:?}")
        } else {
            format!("failed: {}", bad.join(", "))
        },
    )
}

fn classification(cx: &mut Ctx) -> Outcome {
    let r = cx.run("classify", &["classify", &cx.corpus]);
    let entries = r.report["result"].as_array().cloned().unwrap_or_default();
    let mut bad = Vec::new();
    for e in &entries {
        let got: Vec<&str> = e["classification"]["types"]
            .as_array()
            .map(|ts| ts.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default();
        let name = e["name"].as_str().unwrap_or("?");
        let ok = match name.strip_prefix("type") {
            Some("15") => got.is_empty(),
            Some(t) => got.contains(&t),
            None if name == "regular" => got.is_empty(),
            None => e["expect_ok"].as_bool() != Some(false),
        };
        if !ok {
            bad.push(format!("{name} -> {got:?}"));
        }
    }
    check(
        r.code == 0 && entries.len() == 11 && bad.is_empty(),
        format!("{} entries, mismatches {bad:?}", entries.len()),
    )
}

fn negative_control(cx: &mut Ctx) -> Outcome {
    let r = cx.run("tile-regular", &["tile", &cx.corpus, "--name", "regular", "--depth", "2"]);
    let outcome = r.report["result"]["outcome"].as_str().unwrap_or("").to_string();
    check(
        r.code == 10 && outcome == "exhausted" && r.elapsed < Duration::from_secs(1),
        format!("{outcome} (exit {}) in {:?}", r.code, r.elapsed),
    )
}

fn torus_properties(cx: &mut Ctx) -> Outcome {
    let mut bad = Vec::new();
    for (name, r) in &cx.certs {
        if r.code == 70 {
            bad.push(format!("{name}: FALSIFICATION {}", r.report["result"]["check"]));
            continue;
        }
        let cert = &r.report["result"]["certificate"];
        let witness = cert["checks"]["bagina_witness"].is_u64();
        let lemma = cert["checks"]["lemma1"]["result"].as_str().unwrap_or("");
        let corner = cert["density"]["corner_sum"] == "5" && cert["density"]["corner_identity"] == true;
        if !(witness && matches!(lemma, "vacuous" | "witness") && corner) {
            bad.push(format!("{name}: witness {witness}, lemma1 {lemma}, corner sum {}", cert["density"]["corner_sum"]));
        }
    }
    check(
        bad.is_empty() && cx.certs.len() == 8,
        if bad.is_empty() {
            format!("{} tori checked", cx.certs.len())
        } else {
            bad.join("; ")
        },
    )
}

fn corollary1(cx: &mut Ctx) -> Outcome {
    let mut seen = Vec::new();
    let mut bad = Vec::new();
    for spec in corpus() {
        if !corollary1_applies(&tentative_3valent_profile(&spec.angles, &Tolerance::default())) {
            continue;
        }
        let Some((_, r)) = cx.certs.iter().find(|(n, _)| *n == spec.name) else {
            continue;
        };
        let census: Vec<u64> = r.report["result"]["certificate"]["density"]["counts"]
            .as_object()
            .map(|m| m.keys().filter_map(|k| k.parse().ok()).collect())
            .unwrap_or_default();
        if census.is_empty() || census.iter().any(|&k| k != 3 && k != 4) {
            bad.push(format!("{}: valences {census:?}", spec.name));
        }
        seen.push(spec.name);
    }
    check(
        bad.is_empty() && !seen.is_empty(),
        if bad.is_empty() {
            format!("only 3/4-valent nodes on {seen:?}")
        } else {
            bad.join("; ")
        },
    )
}

fn first_stage_sort(cx: &mut Ctx) -> Outcome {
    let r = cx.run("sort", &["sort"]);
    let res = &r.report["result"];
    let counts = res["counts"].as_object().cloned().unwrap_or_default();
    let total: u64 = counts.values().filter_map(Value::as_u64).sum();
    let uncertain = counts.get("uncertain").and_then(Value::as_u64).unwrap_or(0);
    let d = &res["discrepancy"];
    let refined = d["refined"].as_u64();
    let explained = if uncertain == 34 && refined == Some(42) {
        true
    } else {
        d["per_pattern"].as_array().is_some_and(|p| p.len() as u64 == uncertain)
    };
    check(
        r.code == 0 && total == 465 && explained && r.elapsed < Duration::from_secs(7200),
        format!(
            "{} in {:?}; uncertain {uncertain} (reference 34), refined {refined:?} (reference 42)",
            serde_json::to_string(&counts).unwrap(),
            r.elapsed
        ),
    )
}

fn determinism(cx: &mut Ctx) -> Outcome {
    let mut runs: Vec<(String, Vec<String>)> = vec![
        ("enumerate".into(), vec!["enumerate".into()]),
        ("classify".into(), vec!["classify".into(), cx.corpus.clone()]),
        (
            "tile-regular".into(),
            vec!["tile".into(), cx.corpus.clone(), "--name".into(), "regular".into(), "--depth".into(), "2".into()],
        ),
        ("tile-cairo".into(), vec!["tile".into(), cx.corpus.clone(), "--name".into(), "cairo".into()]),
    ];
    for t in TYPES {
        runs.push((
            format!("certify-type{t}"),
            vec!["certify".into(), cx.corpus.clone(), "--name".into(), format!("type{t}")],
        ));
    }
    let mut differ = Vec::new();
    for (tag, args) in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = cx.run(tag, &args);
        let b = cx.run(tag, &args);
        if a.text.is_empty() || stable(&a) != stable(&b) {
            differ.push(tag.clone());
        }
    }
    check(
        differ.is_empty(),
        if differ.is_empty() {
            format!("{} commands repeated byte-identically", runs.len())
        } else {
            format!("differ: {differ:?}")
        },
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let dir = tempfile::tempdir().expect("tempdir");
    let mut cx = Ctx {
        dir,
        corpus: corpus_path().to_string_lossy().into_owned(),
        certs: Vec::new(),
    };
    let criteria: [(&str, Criterion); 9] = [
        ("1 pattern count", pattern_count),
        ("2 raw condition count", raw_count),
        ("3 eight-type certification", certification),
        ("4 round-trip classification", classification),
        ("5 negative control", negative_control),
        ("6 torus property suite", torus_properties),
        ("7 corollary 1 consistency", corollary1),
        ("8 first-stage sort", first_stage_sort),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f(&mut cx);
        println!("{} criterion {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
