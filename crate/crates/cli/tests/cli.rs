use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nclin_core::factorizer::factor;
use nclin_core::format::{chain_from_json, factorization_from_json, poly_from_json, poly_to_json};
use nclin_core::matrix::spectral_norm;
use nclin_core::MatPoly;

const POLY: &str = r#"{
  "rows": 2, "cols": 1,
  "terms": [
    { "word": "x1 x2* x1", "coeff": [[[0.5, 0.0]], [[0.0, -1.0]]] },
    { "word": "1",          "coeff": [[[1.0, 0.0]], [[0.25, 0.0]]] },
    { "word": "x2",         "coeff": [[[0.0, 0.5]], [[0.0, 0.0]]] }
  ]
}"#;

const DEGREE_ONE: &str = r#"{
  "rows": 1, "cols": 1,
  "terms": [
    { "word": "1",   "coeff": [[[0.3, 0.0]]] },
    { "word": "x1",  "coeff": [[[0.5, 0.1]]] },
    { "word": "x2*", "coeff": [[[-0.2, 0.0]]] }
  ]
}"#;

fn nclin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nclin")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout_value(out: &Output, key: &str) -> String {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{key}` in output"))
}

#[test]
fn factorize_then_expand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", POLY);
    let f = dir.path().join("f.json");
    let back = dir.path().join("back.json");
    let out = nclin(&["factorize", "--in", path(&p), "--out", path(&f)]);
    assert!(out.status.success());
    assert_eq!(stdout_value(&out, "m"), "3");

    let fact = factorization_from_json(&std::fs::read_to_string(&f).unwrap(), 16).unwrap();
    let printed: f64 = stdout_value(&out, "cost").parse().unwrap();
    let recomputed: f64 = fact.alphas().iter().map(spectral_norm).product();
    assert!((printed - recomputed).abs() <= 1e-9);

    assert!(nclin(&["expand", "--in", path(&f), "--out", path(&back)]).status.success());
    let original = poly_from_json(POLY, 16).unwrap();
    let expanded = poly_from_json(&std::fs::read_to_string(&back).unwrap(), 16).unwrap();
    assert!(expanded.max_coeff_diff(&original).unwrap() <= 1e-9);
}

#[test]
fn rewrite_flags_keep_the_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", POLY);
    let f = dir.path().join("f.json");
    let out = nclin(&["factorize", "--in", path(&p), "--out", path(&f), "--single-block", "--equal-sizes"]);
    assert!(out.status.success());
    let fact = factorization_from_json(&std::fs::read_to_string(&f).unwrap(), 16).unwrap();
    assert!(fact.diags().iter().all(|d| d.is_single()));
    let sizes = fact.sizes();
    assert!(sizes.windows(2).all(|w| w[0] == w[1]));
    assert!(fact.expand().max_coeff_diff(&poly_from_json(POLY, 16).unwrap()).unwrap() <= 1e-9);
}

#[test]
fn absorb_on_degree_one_gives_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DEGREE_ONE);
    let c = dir.path().join("c.json");
    assert!(nclin(&["factorize", "--absorb", "--in", path(&p), "--out", path(&c)]).status.success());
    let chain = chain_from_json(&std::fs::read_to_string(&c).unwrap(), 16).unwrap();
    assert_eq!(chain.len(), 1);
    assert!(chain[0].max_coeff_diff(&poly_from_json(DEGREE_ONE, 16).unwrap()).unwrap() <= 1e-12);

    let back = dir.path().join("back.json");
    assert!(nclin(&["expand", "--in", path(&c), "--out", path(&back)]).status.success());
}

#[test]
fn corrupted_factorization_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = factor(&poly_from_json(POLY, 16).unwrap());
    let mut doc: serde_json::Value = serde_json::from_str(&nclin_core::format::factorization_to_json(&f)).unwrap();
    doc["alphas"][0][0][0] = serde_json::json!([9.0, 0.0]);
    let bad = write(dir.path(), "bad.json", &doc.to_string());
    let out = nclin(&["expand", "--in", path(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verification"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{ \"rows\": 1,");
    assert_eq!(nclin(&["factorize", "--in", path(&broken)]).status.code(), Some(2));
    let bad_word = write(
        dir.path(),
        "w.json",
        r#"{"rows":1,"cols":1,"terms":[{"word":"y1","coeff":[[[1,0]]]}]}"#,
    );
    assert_eq!(nclin(&["factorize", "--in", path(&bad_word)]).status.code(), Some(2));
    assert_eq!(nclin(&["factorize", "--in", path(&broken), "--nope"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(nclin(&["expand", "--in", path(&missing)]).status.code(), Some(2));
    assert_eq!(nclin(&["norm", "--poly", path(&bad_word), "--kind", "gue"]).status.code(), Some(2));
}

#[test]
fn version_and_help() {
    assert!(nclin(&["--version"]).status.success());
    for cmd in ["factorize", "expand", "eval", "norm", "balance", "probe-m", "transfer", "sample", "selftest"] {
        let out = nclin(&[cmd, "--help"]);
        assert!(out.status.success(), "{cmd} --help");
    }
}

#[test]
fn sample_then_eval_matches_ensemble_eval() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DEGREE_ONE);
    let rep = dir.path().join("rep.json");
    let args = ["--kind", "perm", "--dim", "5", "--gens", "2", "--seed", "4", "--samples", "3"];
    let mut sample = vec!["sample", "--index", "2", "--out", path(&rep)];
    sample.extend(args);
    assert!(nclin(&sample).status.success());
    let from_file = nclin(&["eval", "--poly", path(&p), "--rep", path(&rep)]);
    let mut direct = vec!["eval", "--poly", path(&p), "--index", "2"];
    direct.extend(args);
    let drawn = nclin(&direct);
    assert!(from_file.status.success() && drawn.status.success());
    assert_eq!(from_file.stdout, drawn.stdout);
}

#[test]
fn norm_of_symmetric_shift_is_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = MatPoly::monomial(nclin_core::matrix::identity(1), "x1".parse().unwrap());
    let p = p.add(&p.adjoint()).unwrap();
    let file = write(dir.path(), "p.json", &poly_to_json(&p));
    let out = nclin(&["norm", "--poly", path(&file), "--kind", "shift", "--dim", "7", "--samples", "2"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("kind,N,sample_index,norm"));
    for line in lines {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }
}

#[test]
fn balance_and_transfer_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", POLY);
    let f = dir.path().join("f.json");
    assert!(nclin(&["factorize", "--in", path(&p), "--out", path(&f)]).status.success());
    let fb = dir.path().join("fb.json");
    let report = dir.path().join("r.csv");
    let out = nclin(&[
        "balance", "--in", path(&f), "--dim", "12", "--samples", "2", "--rounds", "5", "--tol", "1e-8",
        "--out", path(&fb), "--report", path(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let initial: f64 = stdout_value(&out, "initial_cost").parse().unwrap();
    let fin: f64 = stdout_value(&out, "final_cost").parse().unwrap();
    assert!(fin <= initial + 1e-8);
    assert!(std::fs::read_to_string(&report).unwrap().starts_with("round,cost\n"));
    let balanced = factorization_from_json(&std::fs::read_to_string(&fb).unwrap(), 16).unwrap();
    assert!(balanced.expand().max_coeff_diff(&poly_from_json(POLY, 16).unwrap()).unwrap() <= 1e-9);

    let t = dir.path().join("t.csv");
    let s = dir.path().join("s.csv");
    let out = nclin(&[
        "transfer", "--poly", path(&p), "--kind", "haar", "--sizes", "4,8", "--samples", "3", "--seed", "1",
        "--self-adjoint", "--out", path(&t), "--summary", path(&s),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&t).unwrap();
    assert!(csv.starts_with("N,sample,direct_norm,bound,max_factor_norm,exceed_flag\n"));
    assert_eq!(csv.lines().count(), 1 + 6);
    assert_eq!(nclin(&["transfer", "--poly", path(&p), "--sizes", "8,4"]).status.code(), Some(2));
}

#[test]
fn probe_m_table() {
    let out = nclin(&["probe-m", "--d", "1", "--n", "2", "--eps", "0.2", "--count", "3", "--dim", "8", "--samples", "2"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("instance,d,n,eps,achieved_m,achieved_cost,chain_product,max_factor_norm\n"));
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').nth(4), Some("1"));
    }
}

#[test]
fn selftest_passes_and_is_stable() {
    let a = nclin(&["--threads", "1", "selftest"]);
    let b = nclin(&["--threads", "3", "selftest"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("8/8 suites passed"));
}
