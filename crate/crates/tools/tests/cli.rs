use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crn_core::dynamics::dynamically_equivalent;
use crn_core::families::golden_tables;
use crn_core::network::Complex;
use crn_core::MassActionSystem;
use crn_tools::io::{read_system, NetworkJson};
use serde_json::Value;
use tempfile::TempDir;

fn crn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crn"))
        .args(args)
        .env_remove("CRN_SEED")
        .output()
        .expect("spawn crn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a family network into `dir` and returns its path.
fn generate(dir: &TempDir, family: &str, n: usize, relative: bool) -> PathBuf {
    let path = dir.path().join(format!("{family}{n}{}.crn", if relative { "r" } else { "" }));
    let n = n.to_string();
    let mut args = vec!["generate", "--family", family, "--n", &n, "--out", arg(&path)];
    if relative {
        args.push("--relative");
    }
    assert_eq!(code(&crn(&args)), 0);
    path
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

type Row = (Complex, Complex, Option<String>);

fn rows(sys: &MassActionSystem) -> BTreeSet<Row> {
    sys.network().reactions().iter().map(|r| (r.source.clone(), r.target.clone(), r.label.clone())).collect()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = format!("{}/schemas/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let s: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(name: &str, v: &Value) {
    let validator = schema(name);
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn generate_prints_the_table_one_network() {
    let out = crn(&["generate", "--family", "rep-recomb", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let printed = MassActionSystem::parse(&stdout(&out)).unwrap();
    assert_eq!(rows(&printed), rows(&golden_tables().unwrap()[0].network));

    let h = MassActionSystem::parse(&stdout(&crn(&["generate", "--family", "hypercycle", "--n", "3"]))).unwrap();
    let expected = MassActionSystem::parse("X1 + X2 -> X1 + 2X2\nX2 + X3 -> X2 + 2X3\nX3 + X1 -> X3 + 2X1").unwrap();
    let unlabeled = |s: &MassActionSystem| -> BTreeSet<_> { rows(s).into_iter().map(|(a, b, _)| (a, b)).collect() };
    assert_eq!(unlabeled(&h), unlabeled(&expected));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&crn(&["generate", "--family", "recomb", "--n", "2"])), 2);
    assert_eq!(code(&crn(&["generate", "--family", "spiral", "--n", "3"])), 2);
    assert_eq!(code(&crn(&["analyze", "/nonexistent/file.crn"])), 2);
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.crn", "X1 -> -> X2\n");
    let out = crn(&["analyze", arg(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn generate_json_round_trips() {
    let out = crn(&["--json", "generate", "--family", "recomb", "--n", "4", "--relative"]);
    let v = json(&out);
    assert_valid("network", &v);
    let parsed: NetworkJson = serde_json::from_value(v).unwrap();
    assert_eq!(parsed.to_system().unwrap().len(), 24);
}

#[test]
fn analyze_verdicts() {
    let dir = TempDir::new().unwrap();
    let right = generate(&dir, "rep-recomb", 3, true);
    let v = json(&crn(&["--json", "analyze", arg(&right)]));
    assert_valid("analysis", &v);
    assert_eq!(v["geometry"]["strongly_endotactic"]["value"], true);
    assert_eq!(v["geometry"]["endotactic_sweep"]["verdict"], "no_violation_found");

    let growth = write(&dir, "growth.crn", "X1 -> 2X1\n");
    let v = json(&crn(&["--json", "analyze", arg(&growth)]));
    assert_valid("analysis", &v);
    let sweep = &v["geometry"]["endotactic_sweep"];
    assert_eq!(sweep["verdict"], "refuted");
    assert_eq!(sweep["direction"], serde_json::json!(["-1"]));
    // Undecided verdicts say why.
    assert!(v["flags"]["property_x"]["value"].is_null());
    assert!(v["flags"]["property_x"]["reason"].is_string());

    let h3 = generate(&dir, "hypercycle", 3, false);
    let v = json(&crn(&["--json", "analyze", arg(&h3)]));
    assert_valid("analysis", &v);
    assert_eq!(v["flags"]["weakly_reversible"], false);
    // No hypercycle reaction has a single-species source.
    assert_eq!(v["production_graph"]["edges"], serde_json::json!([]));

    let text = stdout(&crn(&["analyze", arg(&h3)]));
    assert!(text.contains("weakly reversible: no"), "{text}");
}

#[test]
fn analyze_reports_the_counterexample_witness() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "cx.crn", "3X1 -> 2X1 + X2\n3X2 -> 2X2 + X1\n3X3 -> 2X3 + X1\n");
    let v = json(&crn(&["--json", "analyze", arg(&f)]));
    assert_valid("analysis", &v);
    let se = &v["geometry"]["strongly_endotactic"];
    assert_eq!(se["value"], false);
    let face = &se["certificate"]["witness_face"];
    let mut on: Vec<Value> = face["vertices"].as_array().unwrap().clone();
    on.sort_by_key(|c| c.to_string());
    assert_eq!(on, [serde_json::json!([0, 3, 0]), serde_json::json!([3, 0, 0])]);
    // On the face the offset is attained by both vertices.
    let dot = |c: &Value| -> i64 {
        let n: Vec<i64> = face["normal"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse().unwrap()).collect();
        c.as_array().unwrap().iter().zip(&n).map(|(a, b)| a.as_i64().unwrap() * b).sum()
    };
    let offset: i64 = face["offset"].as_str().unwrap().parse().unwrap();
    assert!(on.iter().all(|c| dot(c) == offset));
}

#[test]
fn project_reproduces_tables_one_and_three() {
    let tables = golden_tables().unwrap();
    let dir = TempDir::new().unwrap();
    for (t, family) in [(&tables[0], "rep-recomb"), (&tables[2], "recomb")] {
        let left = generate(&dir, family, 3, false);
        let out_path = dir.path().join(format!("{family}.rel.crn"));
        assert_eq!(code(&crn(&["project", arg(&left), "--out", arg(&out_path)])), 0);
        let projected = rows(&read_system(&out_path).unwrap());
        let mut printed = rows(&t.relative);
        for r in t.missing_rows().unwrap() {
            printed.insert((r.source, r.target, r.label));
        }
        assert_eq!(projected, printed, "table {}", t.id);
    }
}

#[test]
fn project_rejects_non_bimolecular_input() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "tri.crn", "3X1 -> X2\nX2 -> X1\n");
    let out = crn(&["project", arg(&f)]);
    assert_eq!(code(&out), 3);
    assert!(!out.stderr.is_empty());
}

#[test]
fn field_output() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "h.crn", "X1 + X2 -> X1 + 2X2\nX2 + X1 -> X2 + 2X1\n");
    let text = stdout(&crn(&["field", arg(&f)]));
    assert!(text.starts_with("dx1/dt = "), "{text}");
    let v = json(&crn(&["--json", "field", arg(&f), "--projectivize", "--homogenized"]));
    assert_valid("field", &v);

    let mixed = write(&dir, "mixed.crn", "X1 -> 2X1\n2X1 -> X1\n");
    assert_eq!(code(&crn(&["field", arg(&mixed), "--projectivize"])), 3);
    assert_eq!(code(&crn(&["field", arg(&mixed)])), 0);
}

#[test]
fn equivalence_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = generate(&dir, "recomb", 4, true);
    let same = crn(&["--json", "equiv", arg(&a), arg(&a)]);
    assert_eq!(code(&same), 0);
    assert_valid("equivalence", &json(&same));

    let scaled = write(&dir, "scaled.crn", &fs::read_to_string(&a).unwrap().replace("; k", "; k=2 ; k"));
    let differ = crn(&["--json", "equiv", arg(&a), arg(&scaled)]);
    assert_eq!(code(&differ), 1);
    let v = json(&differ);
    assert_valid("equivalence", &v);
    assert!(!v["failing"].as_array().unwrap().is_empty());

    // Species order does not matter when the names agree.
    let ab = write(&dir, "ab.crn", "A -> B ; k=2\n");
    let ba = write(&dir, "ba.crn", "# species: B A\nA -> B ; k=2\n");
    assert_eq!(code(&crn(&["equiv", arg(&ab), arg(&ba)])), 0);
    let ac = write(&dir, "ac.crn", "A -> C ; k=2\n");
    assert_eq!(code(&crn(&["equiv", arg(&ab), arg(&ac)])), 3);
}

#[test]
fn realization_certificates() {
    let dir = TempDir::new().unwrap();
    for n in [4, 5, 6] {
        let input = generate(&dir, "recomb", n, true);
        let cert_path = dir.path().join(format!("cert{n}.json"));
        let out = crn(&["--json", "wr-realize", arg(&input), "--out", arg(&cert_path)]);
        assert_eq!(code(&out), 0, "recomb({n})");
        let v: Value = serde_json::from_str(&fs::read_to_string(&cert_path).unwrap()).unwrap();
        assert_eq!(v, json(&out));
        assert_valid("realization", &v);
        assert_eq!(v["weakly_reversible"], true);
        assert_eq!(v["linkage_classes"], 1);
        assert_eq!(v["equivalent"], true);

        // Independently: the realized network, read back from the file,
        // passes the equivalence command against the input.
        let realized: NetworkJson = serde_json::from_value(v["realized"].clone()).unwrap();
        let realized = realized.to_system().unwrap();
        assert!(dynamically_equivalent(&read_system(&input).unwrap(), &realized).unwrap().equivalent);
        let realized_path = write(&dir, &format!("real{n}.json"), &v["realized"].to_string());
        assert_eq!(code(&crn(&["equiv", arg(&input), arg(&realized_path)])), 0);
    }
}

#[test]
fn exhausted_search_exits_four() {
    let dir = TempDir::new().unwrap();
    let g = generate(&dir, "rep-recomb", 3, false);
    let out = crn(&["wr-realize", "--budget", "0", arg(&g)]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("does not prove"));
    let out = crn(&["--json", "wr-realize", "--budget", "0", arg(&g)]);
    assert_eq!(code(&out), 4);
    assert_valid("realization", &json(&out));
}

#[test]
fn simulate_blow_up() {
    let dir = TempDir::new().unwrap();
    let h3 = generate(&dir, "hypercycle", 3, false);
    let out = crn(&["--json", "simulate", arg(&h3), "--x0", "1,1,1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_valid("simulation", &v);
    let o = &v["runs"][0]["outcome"];
    assert_eq!(o["kind"], "blow_up");
    // x(t) = 1/(1 - t) for the symmetric start.
    assert!((o["t"].as_f64().unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn simulate_input_errors() {
    let dir = TempDir::new().unwrap();
    let h3 = generate(&dir, "hypercycle", 3, false);
    assert_eq!(code(&crn(&["simulate", arg(&h3), "--x0", "1,1"])), 2);
    assert_eq!(code(&crn(&["simulate", arg(&h3), "--x0", "1,-1,1"])), 2);
    assert_eq!(code(&crn(&["simulate", arg(&h3)])), 2);
    assert_eq!(code(&crn(&["simulate", arg(&h3), "--x0", "1,1,1", "--variable-k", "2"])), 2);
    // The probe needs a system that keeps the simplex invariant.
    assert_eq!(code(&crn(&["simulate", arg(&h3), "--probe-permanence", "--simplex-random", "3"])), 3);
}

#[test]
fn simulate_csv_columns_and_precision() {
    let dir = TempDir::new().unwrap();
    let decay = write(&dir, "decay.crn", "A -> B\n");
    let csv_path = dir.path().join("decay.csv");
    let out = crn(&["simulate", arg(&decay), "--x0", "1,0.5", "--t-max", "2", "--out", arg(&csv_path)]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x1,x2"));
    let mut last = Vec::new();
    for line in lines {
        last = line.split(',').map(|s| s.parse::<f64>().unwrap()).collect();
        let (t, a, b) = (last[0], last[1], last[2]);
        assert!((a - (-t).exp()).abs() < 1e-6, "t = {t}");
        assert!((a + b - 1.5).abs() < 1e-9);
    }
    assert_eq!(last[0], 2.0);

    let json_path = dir.path().join("decay.json");
    let out = crn(&["simulate", arg(&decay), "--x0", "1,0.5", "--t-max", "2", "--out", arg(&json_path)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_valid("trajectory", &v);
    assert_eq!(v["species"], serde_json::json!(["A", "B"]));
}

#[test]
fn simulate_is_seeded() {
    let dir = TempDir::new().unwrap();
    let rel = generate(&dir, "rep-recomb", 3, true);
    let args = ["--json", "simulate", arg(&rel), "--simplex-random", "4", "--variable-k", "0.5", "--t-max", "3"];
    let with_seed = |seed: &str| {
        let mut a = args.to_vec();
        a.extend(["--seed", seed]);
        crn(&a).stdout
    };
    assert_eq!(with_seed("7"), with_seed("7"));
    assert_ne!(with_seed("7"), with_seed("8"));

    // CRN_SEED is the fallback and is recorded in the report.
    let out = Command::new(env!("CARGO_BIN_EXE_crn")).args(args).env("CRN_SEED", "7").output().unwrap();
    assert_eq!(out.stdout, with_seed("7"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid("simulation", &v);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["variable_k"], 0.5);
}

#[test]
fn permanence_probe_verdicts() {
    let dir = TempDir::new().unwrap();
    let rel = generate(&dir, "rep-recomb", 3, true);
    let out = crn(&["--json", "simulate", arg(&rel), "--probe-permanence", "--simplex-random", "20"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_valid("simulation", &v);
    let p = &v["permanence"];
    assert_eq!(p["verdict"]["kind"], "consistent_with_permanence");
    assert!(p["delta_hat"].as_f64().unwrap() >= 1e-3);
    assert_eq!(p["runs"].as_array().unwrap().len(), 20);
    assert!(p["caveat"].as_str().unwrap().contains("empirical"));

    let out = crn(&["--json", "simulate", arg(&rel), "--probe-permanence", "--simplex-random", "5", "--variable-k", "0.5"]);
    assert_eq!(code(&out), 0);
    assert_valid("simulation", &json(&out));

    let drain = write(&dir, "drain.crn", "2X1 + X2 -> 3X1\n");
    let out = crn(&["simulate", arg(&drain), "--probe-permanence", "--simplex-random", "10"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("persistence failure observed"));
}
