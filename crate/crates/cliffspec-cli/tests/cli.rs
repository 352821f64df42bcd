use std::path::Path;
use std::process::{Command, Output};

use cliffspec::linalg::CMat;
use cliffspec::spectrum::{decomplexify, jordan_block};
use cliffspec::Complex64;
use cliffspec_cli::format::MatrixFile;
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffspec")).current_dir(dir).args(args).output().expect("binary runs")
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn points(v: &Value) -> Vec<(f64, f64, u64)> {
    v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["u"][0].as_f64().unwrap(), p["u"][1].as_f64().unwrap(), p["k"].as_u64().unwrap()))
        .collect()
}

#[test]
fn pauli_spectrum_and_svg() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["spectrum", "--example", "pauli", "--out", "p.json", "--svg", "p.svg"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(d.path(), "p.json");
    assert_eq!(points(&v), vec![(0.0, 0.0, 0), (0.0, 0.0, 1)]);
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["meta"]["tolerances"]["cluster_tol"].is_number());
    let svg = std::fs::read_to_string(d.path().join("p.svg")).unwrap();
    assert_eq!(svg.matches("class=\"marker\"").count(), 2);
}

#[test]
fn example_spectrum_has_ten_points() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["spectrum", "--example", "fig1", "--out", "f.json"]).status.code(), Some(0));
    let v = json(d.path(), "f.json");
    assert_eq!(points(&v).len(), 10);
    let mut sizes: Vec<u64> = v["blocks"].as_array().unwrap().iter().map(|b| b["sizes"][0].as_u64().unwrap()).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, [1, 2, 3, 4]);
}

#[test]
fn input_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("bad.json"), "{\"n\": 2,").unwrap();
    assert_eq!(run(d.path(), &["spectrum", "--matrices", "bad.json"]).status.code(), Some(1));
    std::fs::write(d.path().join("asym.json"), r#"{"n":2,"d":2,"A":[[[1,0],[-1,0]],[[0,1],[1,0]]]}"#).unwrap();
    let o = run(d.path(), &["spectrum", "--matrices", "asym.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not symmetric"));
    assert_eq!(run(d.path(), &["spectrum", "--matrices", "missing.json"]).status.code(), Some(1));
    assert_eq!(run(d.path(), &["spectrum", "--example", "pauli", "--cluster-tol", "-1"]).status.code(), Some(1));
}

#[test]
fn ambiguous_clusters_exit_two() {
    // Q (J4(0) + 1e-12 E30) Q^H next to 4e-3, with Q = (I + iK)/sqrt 2
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let q = CMat::from_fn(4, 4, |i, j| {
        let mut z = Complex64::new(0.0, 0.0);
        if i == j {
            z.re += h;
        }
        if i + j == 3 {
            z.im += h;
        }
        z
    });
    let mut b = jordan_block(4, Complex64::new(0.0, 0.0));
    b[(3, 0)] = Complex64::new(1e-12, 0.0);
    let s = q.matmul(&b).matmul(&q.adjoint());
    let m = CMat::block_diag(&[s, jordan_block(1, Complex64::new(4e-3, 0.0))]);
    let t = decomplexify(&m).unwrap();
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("a.json"), serde_json::to_string(&MatrixFile::from_tuple(&t)).unwrap()).unwrap();
    let o = run(d.path(), &["spectrum", "--matrices", "a.json", "--out", "diag.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(d.path(), "diag.json")["error"], "ambiguity");
}

#[test]
fn specmap_verify_and_degenerate_map() {
    let d = tempfile::tempdir().unwrap();
    run(d.path(), &["spectrum", "--example", "fig1", "--out", "f.json"]);
    let o = run(
        d.path(),
        &["specmap", "--spectrum", "f.json", "--phi", "identity", "--verify-example", "fig1", "--out", "i.json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(d.path(), "i.json");
    assert_eq!(v["verify"]["passed"], true);
    assert!(v["verify"]["distance"].as_f64().unwrap() < 1e-12);
    let o = run(
        d.path(),
        &[
            "specmap",
            "--spectrum",
            "f.json",
            "--phi",
            "example",
            "--verify-example",
            "fig1",
            "--out",
            "m.json",
            "--svg",
            "m.svg",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(d.path(), "m.json");
    assert_eq!(v["verify"]["passed"], true);
    let mut sizes: Vec<Vec<u64>> = v["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["sizes"].as_array().unwrap().iter().map(|s| s.as_u64().unwrap()).collect())
        .collect();
    sizes.sort();
    assert_eq!(sizes, vec![vec![1], vec![1, 1], vec![2, 1, 1], vec![3]]);
    let o = run(d.path(), &["specmap", "--spectrum", "f.json", "--phi", "poly:0.25", "--out", "c.json"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(d.path(), &["specmap", "--spectrum", "f.json", "--phi", "cos", "--out", "c.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn specmap_against_the_wrong_matrix_fails_verification() {
    let d = tempfile::tempdir().unwrap();
    run(d.path(), &["spectrum", "--example", "pauli", "--out", "p.json"]);
    let o = run(
        d.path(),
        &["specmap", "--spectrum", "p.json", "--phi", "identity", "--verify-example", "fig1", "--out", "x.json"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(d.path(), "x.json")["verify"]["passed"], false);
}

#[test]
fn resolvent_grid_excludes_only_the_origin() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["resolvent", "--example", "pauli", "--grid", "101", "--out", "grid.csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(d.path().join("grid.csv")).unwrap();
    assert!(text.starts_with("# cliffspec"));
    let outside: Vec<&str> = text.lines().filter(|l| l.ends_with(",0")).collect();
    assert_eq!(outside, vec!["0,0,0"]);
}

#[test]
fn cauchy_reproduces_cube() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["cauchy", "--dim", "2", "--fn", "z^3", "--point", "0.3,0.4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let z = [v["complex"][0].as_f64().unwrap(), v["complex"][1].as_f64().unwrap()];
    assert!((z[0] + 0.117).abs() < 1e-8 && (z[1] - 0.044).abs() < 1e-8);
    let o = run(d.path(), &["cauchy", "--dim", "3", "--fn", "const:1+e12", "--point", "0.95,0,0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn moeb_operations() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["moeb", "apply", "--g", "0.3,-0.1", "--x", "0.3,-0.1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["point"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap().abs() < 1e-12));
    let o = run(d.path(), &["moeb", "inv", "--g", "0.3,-0.1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["element"]["u"][0].as_f64().unwrap(), -0.3);
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    let o = run(d.path(), &["moeb", "compose", "--g", "0.3,0.1;0.6+0.8*e12", "--h", "0.1,0.2,0.3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let a = run(d.path(), &["check", "--suite", "moebius", "--seed", "7"]);
    let b = Command::new(env!("CARGO_BIN_EXE_cliffspec"))
        .env("CLIFFSPEC_THREADS", "1")
        .args(["check", "--suite", "moebius", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("seed=7"));
    assert_eq!(run(d.path(), &["check", "--suite", "nope"]).status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical() {
    let d = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let json = format!("{name}.json");
        let svg = format!("{name}.svg");
        run(d.path(), &["spectrum", "--example", "fig1", "--out", &json, "--svg", &svg, "--seed", "3"]);
    }
    let read = |n: &str| std::fs::read(d.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));
    assert_eq!(read("a.svg"), read("b.svg"));
}
