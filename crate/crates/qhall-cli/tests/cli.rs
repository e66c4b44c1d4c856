use qhall::double::basis::DoubleBasis;
use qhall::double::{DoubleAlgebra, PbwElt};
use qhall::ihall::{IHallElt, SplitRankOne};
use qhall::nks::irank1_l;
use qhall::{QuiverShape, ScalarHalf};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, Output};

fn qhall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhall")).args(args).env_remove("QHALL_CACHE_DIR").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = qhall(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rows(v: &Value) -> &Vec<Value> {
    v["rows"].as_array().unwrap()
}

fn scalar(v: &Value) -> ScalarHalf {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn hall_mult_a2_two_terms() {
    // Ext(S1, S2) is one-dimensional for 1 -> 2: the zero class gives S1+S2,
    // the q-1 nonzero classes give P1; Hom(S1, S2) = 0 and <a1, a2> = -1.
    let v = json(&["hall", "mult", "A2", "--x", "a1", "--y", "a2"]);
    let got: BTreeMap<String, ScalarHalf> = rows(&v).iter().map(|r| (r["class"].as_str().unwrap().to_string(), scalar(&r["coeff"]))).collect();
    let want = BTreeMap::from([
        ("(1,0)+(0,1)".to_string(), ScalarHalf::v_pow(-1)),
        ("(1,1)".to_string(), &ScalarHalf::v_pow(1) - &ScalarHalf::v_pow(-1)),
    ]);
    assert_eq!(got, want);
}

fn load_elements(d: &DoubleAlgebra, v: &Value) -> Vec<PbwElt> {
    let mut groups: BTreeMap<i64, Vec<Value>> = BTreeMap::new();
    for r in rows(v) {
        groups.entry(r["index"].as_i64().unwrap()).or_default().push(r.clone());
    }
    groups.into_values().map(|terms| d.from_json(&Value::Array(terms)).unwrap()).collect()
}

#[test]
fn double_basis_table_loads_back() {
    let v = json(&["tu", "double-basis", "A1", "--window", "4"]);
    assert!(rows(&v).iter().all(|r| r["source"] == "two-stage triangularization"));
    let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
    let loaded: BTreeSet<String> = load_elements(&d, &v).iter().map(|x| format!("{:?}", x)).collect();
    let closed: BTreeSet<String> = qhall::verify::sl2_closed_family(&d, 4).unwrap().iter().map(|x| format!("{:?}", x)).collect();
    assert_eq!(loaded, closed);
    let direct: BTreeSet<String> = DoubleBasis::new(&d).window(4).unwrap().iter().map(|e| format!("{:?}", e.element)).collect();
    assert_eq!(loaded, direct);
}

#[test]
fn element_json_round_trip() {
    let v = json(&["tu", "nf", "A2", "--word", "E1 F2 E2 K1^-1 F1"]);
    let d = DoubleAlgebra::new(QuiverShape::linear_a(2));
    let loaded = d.from_json(&v["rows"]).unwrap();
    let direct = d.normal_form(&qhall::double::parse_word("E1 F2 E2 K1^-1 F1", 2).unwrap()).unwrap();
    assert_eq!(loaded, direct);
    assert_eq!(d.from_json(&d.to_json(&direct)).unwrap(), direct);
}

#[test]
fn ihall_dual_basis_matches_closed_form() {
    let v = json(&["ihall", "dual-basis", "A1", "--rho", "id", "--m", "6"]);
    let r = SplitRankOne::new();
    let mut got: BTreeMap<i64, IHallElt> = BTreeMap::new();
    for row in rows(&v) {
        assert_eq!(row["source"], "bar-invariant triangularization");
        let k = row["k"].as_i64().unwrap();
        let term = r.diamond(row["basis k"].as_i64().unwrap(), &r.big_u(row["basis a"].as_i64().unwrap() as u32));
        got.entry(k).or_insert_with(IHallElt::zero).add_scaled(&term, &scalar(&row["coeff"]));
    }
    assert_eq!(got.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
    for (k, x) in got {
        assert_eq!(x, r.transport(&irank1_l(k, 6).unwrap()).unwrap(), "L({}, 6)", k);
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["tu", "double-basis", "A1", "--window", "3"];
    let a = qhall(&[&["--jobs", "1"], &args[..]].concat());
    let b = qhall(&[&["--jobs", "4"], &args[..]].concat());
    let c = qhall(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn cache_hit_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--cache-dir", dir.path().to_str().unwrap(), "canon", "A3", "--degree", "1,2,1", "--dual"];
    let first = qhall(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let entries = walk(dir.path());
    assert!(entries > 0, "cache stayed empty");
    let second = qhall(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(walk(dir.path()), entries);
    let cold = qhall(&args[2..]);
    assert_eq!(first.stdout, cold.stdout);
}

fn walk(p: &std::path::Path) -> usize {
    std::fs::read_dir(p)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            if e.file_type().unwrap().is_dir() {
                walk(&e.path())
            } else {
                1
            }
        })
        .sum()
}

#[test]
fn stale_cache_schema_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--cache-dir", dir.path().to_str().unwrap(), "hall", "mult", "A2", "--x", "a1", "--y", "a2"];
    assert!(qhall(&args).status.success());
    let mut files = Vec::new();
    for sub in std::fs::read_dir(dir.path()).unwrap() {
        for f in std::fs::read_dir(sub.unwrap().path()).unwrap() {
            files.push(f.unwrap().path());
        }
    }
    assert!(!files.is_empty());
    for f in &files {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap();
        v["schema"] = Value::from(0);
        std::fs::write(f, v.to_string()).unwrap();
    }
    let out = qhall(&args);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
}

#[test]
fn parse_errors_carry_positions() {
    let out = qhall(&["roots", "A3: 1->2, 2-3"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position 10"), "{}", err);
    let out = qhall(&["hall", "mult", "A2", "--x", "a3", "--y", "a1"]);
    assert!(!out.status.success());
    let out = qhall(&["nks", "ldominant", "A2", "--twist", "squared", "--w", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("w needs 4"));
}

#[test]
fn ihall_outside_coverage_is_reported() {
    let out = qhall(&["ihall", "mult", "A2", "--x", "1,0", "--y", "1,0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("coverage"));
}

#[test]
fn csv_and_latex_render_the_same_rows() {
    let csv = qhall(&["--format", "csv", "rank1", "il", "--k", "1", "--m", "4"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text, "B,K,coeff\n0,2,-1\n2,1,1\n");
    let tex = String::from_utf8(qhall(&["--format", "latex", "rank1", "il", "--k", "1", "--m", "4"]).stdout).unwrap();
    assert!(tex.contains("\\begin{tabular}{lll}") && tex.contains("0 & 2 & $-1$ \\\\"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roots.json");
    let out = qhall(&["roots", "D4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows(&v).len(), 12);
}

#[test]
fn verify_targets() {
    let v = json(&["verify", "nks"]);
    assert_eq!(rows(&v)[0]["status"], "PASS");
    let v = json(&["verify", "--list"]);
    assert_eq!(rows(&v).len(), 12);
    let out = qhall(&["verify", "nope"]);
    assert!(!out.status.success());
}

#[test]
fn iqg_relations_all_hold_for_a3_flip() {
    let v = json(&["iqg", "relations", "A3: 1->2, 3->2", "--rho", "(1 3)"]);
    assert!(!rows(&v).is_empty());
    assert!(rows(&v).iter().all(|r| r["holds"] == "true"));
    assert!(rows(&v).iter().any(|r| r["relation"].as_str().unwrap().starts_with("split Serre")));
}
