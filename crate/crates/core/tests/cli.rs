use std::path::Path;
use std::process::{Command, Output};

fn smoothlab(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_smoothlab"));
    cmd.args(args).env_remove("SMOOTHLAB_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"{
  "schema": 1,
  "functions": ["abs_pow_1.5", "poly_cheb_2"],
  "emit": ["csv", "json", "svg"],
  "checks": [
    {"id": "direct", "params": {"k": 2, "r": 1, "p": 2, "n_range": {"lo": 16, "hi": 48, "step": 8}}},
    {"id": "hierarchy", "functions": ["exp"], "params": {"k": 2, "r": 1, "p": 2, "t_grid": {"lo": 0.0625, "hi": 0.5}}}
  ]
}"#;

#[test]
fn corpus_list_prints_every_id() {
    let o = smoothlab(&["corpus", "list"], &[]);
    assert!(o.status.success());
    let out = stdout(&o);
    for id in ["abs_pow_0.5", "abs_pow_1.5", "one_minus_x_pow_0.5", "exp", "poly_cheb_2"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("{id}\t"))), "{id} missing\n{out}");
    }
}

#[test]
fn modulus_table() {
    let o = smoothlab(&["modulus", "abs_pow_1", "--k", "1", "--t", "0.2"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    let v: f64 = row.split('\t').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.4 / 4.04f64.sqrt()).abs() < 1e-9, "{row}");
}

#[test]
fn bestapprox_table() {
    let o = smoothlab(&["bestapprox", "abs_pow_1", "--n", "2,4"], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "2");
    assert!((row[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(row[3], "true");
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn unknown_check_is_a_usage_error() {
    let o = smoothlab(&["verify", "hierarchical"], &[]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("hierarchical"));
}

#[test]
fn unknown_function_is_a_numerical_error() {
    let o = smoothlab(&["modulus", "no_such_function", "--k", "1", "--t", "0.1"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_config_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, SMALL.replace("\"k\": 2, \"r\": 1, \"p\": 2, \"t_grid\"", "\"k\": 2, \"rr\": 1, \"p\": 2, \"t_grid\"")).unwrap();
    let o = smoothlab(&["run", path.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("line 7"), "{}", stderr(&o));

    let o = smoothlab(&["run", dir.path().join("missing.json").to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn workers_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.json");
    std::fs::write(&path, SMALL).unwrap();
    for bad in ["0", "two", "-1"] {
        let o = smoothlab(&["run", path.to_str().unwrap()], &[("SMOOTHLAB_WORKERS", bad)]);
        assert_eq!(o.status.code(), Some(64), "{bad}");
        assert!(stderr(&o).contains("SMOOTHLAB_WORKERS"));
    }
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn run_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.json");
    std::fs::write(&path, SMALL).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = smoothlab(
        &["run", path.to_str().unwrap(), "--output-dir", a.to_str().unwrap(), "--quiet"],
        &[("SMOOTHLAB_WORKERS", "1")],
    );
    let ob = smoothlab(
        &["run", path.to_str().unwrap(), "--output-dir", b.to_str().unwrap(), "--quiet"],
        &[("SMOOTHLAB_WORKERS", "2")],
    );
    assert_eq!(oa.status.code(), Some(0), "{}", stdout(&oa));
    assert_eq!(ob.status.code(), Some(0));
    assert_eq!(stdout(&oa), stdout(&ob));
    let (fa, fb) = (listing(&a), listing(&b));
    assert!(fa.iter().any(|f| f.0 == "summary.json"));
    assert!(fa.iter().any(|f| f.0 == "direct__abs_pow_1.5__main.svg"));
    assert_eq!(fa, fb);
    let table = String::from_utf8(fa.iter().find(|f| f.0 == "summary.csv").unwrap().1.clone()).unwrap();
    assert!(table.contains("DEGENERATE") && table.contains("PASS"), "{table}");
}
