use std::path::Path;
use std::process::Command;

use latticeqmc::cli::run;
use latticeqmc::points::lattice_points;
use latticeqmc::wce::wce_korobov_lattice;
use latticeqmc::{LatticeRule, TruncationPolicy};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("latticeqmc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {line:?}"))
        .parse()
        .unwrap()
}

fn write_vector(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn cbc_example_writes_a_vector_file() {
    let (code, out, err) = call(&["cbc", "--n", "1021", "--s", "10", "--alpha", "1", "--gamma", "1/j^2"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.is_empty());
    let rule: LatticeRule = out.parse().unwrap();
    assert_eq!(rule.modulus(), 1021);
    assert_eq!(rule.dim(), 10);
    assert_eq!(rule.generator()[0], 1);
}

#[test]
fn wce_example_prints_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let v = write_vector(dir.path(), "v.txt", "4 1\n1\n");
    let (code, out, _) = call(&["wce", "--space", "cosine-tent", "--vector-file", &v, "--alpha", "1", "--gamma", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(out.ends_with(" method=theorem-equivalence\n"), "{out}");
    let e2 = field(&out, "e2");
    assert!((e2 - std::f64::consts::PI.powi(2) / 48.0).abs() < 1e-15);
    assert_eq!(field(&out, "tail"), 0.0);

    let (code, out, _) = call(&["wce", "--space", "cosine-sym", "--vector-file", &v]);
    assert_eq!(code, 0);
    assert!((field(&out, "e2") - std::f64::consts::PI.powi(2) / 192.0).abs() < 1e-15);
}

#[test]
fn converge_example_is_csv_and_repeatable() {
    let exe = env!("CARGO_BIN_EXE_latticeqmc");
    let args = ["converge", "--family", "g", "--s", "8", "--w", "0.9", "--variants", "plain,tent,sym", "--nmin", "6", "--nmax", "14"];
    let first = Command::new(exe).args(args).output().unwrap();
    assert!(first.status.success());
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("variant,N,nodes,estimate,abs_error"));
    assert_eq!(lines.count(), 27);
    assert!(!text.contains('\r'));
    let second = Command::new(exe).args(["--threads", "1"]).args(args).output().unwrap();
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.txt");
    let v = v.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["cbc", "--n", "127", "--s", "4", "--gamma", "0.5,0.25,0.125,0.0625", "--output", v],
        vec!["points", "--vector-file", v, "--variant", "sym"],
        vec!["wce", "--space", "double-sum", "--kernel", "korcos", "--vector-file", v, "--variant", "sym", "--gamma", "1/j^2"],
        vec!["integrate", "--vector-file", v, "--variant", "tent", "--family", "h", "--w", "0.5"],
        vec!["bound", "--alpha", "2", "--gamma", "1/j^2", "--s", "5", "--tau", "1.5"],
    ];
    for args in &runs {
        let a = call(args);
        let b = call(args);
        assert_eq!(a.0, 0, "{args:?}: {}", a.2);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn points_round_trip_through_double_sum() {
    let dir = tempfile::tempdir().unwrap();
    let v = write_vector(dir.path(), "v.txt", "61 3\n1 11 24\n");
    let rule: LatticeRule = "61 3\n1 11 24\n".parse().unwrap();
    let gam = [1.0, 0.5, 0.25];
    let direct = wce_korobov_lattice(&rule, 2.0, &gam, &TruncationPolicy::default()).unwrap().e2;

    for variant in ["plain", "tent", "sym"] {
        let pts = dir.path().join(format!("{variant}.txt"));
        let pts = pts.to_str().unwrap();
        let (code, _, err) = call(&["points", "--vector-file", &v, "--variant", variant, "--output", pts]);
        assert_eq!(code, 0, "{err}");
        let via_vector = call(&[
            "wce", "--space", "double-sum", "--kernel", "korobov", "--alpha", "2", "--gamma", "1,0.5,0.25",
            "--vector-file", &v, "--variant", variant,
        ]);
        let via_points = call(&[
            "wce", "--space", "double-sum", "--kernel", "korobov", "--alpha", "2", "--gamma", "1,0.5,0.25",
            "--points-file", pts,
        ]);
        assert_eq!(via_points.0, 0, "{}", via_points.2);
        let a = field(&via_vector.1, "e2");
        let b = field(&via_points.1, "e2");
        assert!((a - b).abs() <= 1e-12, "{variant}: {a} vs {b}");
        if variant == "plain" {
            assert!((b - direct).abs() <= 1e-12);
        }
    }

    // Points written by the library read back the same way.
    let file = dir.path().join("lib.txt");
    std::fs::write(&file, lattice_points(&rule).to_points_file()).unwrap();
    let (code, out, _) = call(&[
        "wce", "--space", "double-sum", "--kernel", "korobov", "--alpha", "2", "--gamma", "1,0.5,0.25",
        "--points-file", file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!((field(&out, "e2") - direct).abs() <= 1e-12);
}

#[test]
fn bound_prints_the_constant() {
    let (code, out, _) = call(&["bound", "--alpha", "1", "--gamma", "1", "--s", "2"]);
    assert_eq!(code, 0);
    assert!((field(&out, "C") - 4.171687).abs() < 1e-6);
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let v = write_vector(dir.path(), "v.txt", "8 2\n1 3\n");
    let bad = write_vector(dir.path(), "bad.txt", "8 2\n1 9\n");
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec!["cbc", "--n", "1", "--s", "2"],
        vec!["cbc", "--n", "16", "--s", "2", "--alpha", "1.5"],
        vec!["cbc", "--n", "16", "--s", "2", "--gamma", "1,2,3"],
        vec!["cbc", "--n", "16", "--s", "2", "--bogus"],
        vec!["wce", "--space", "korobov", "--vector-file", &bad],
        vec!["wce", "--space", "nowhere", "--vector-file", &v],
        vec!["wce", "--space", "korobov", "--vector-file", &v, "--alpha", "0.5"],
        vec!["wce", "--space", "korobov", "--vector-file", &v, "--gamma", "-1"],
        vec!["wce", "--space", "double-sum", "--vector-file", &v],
        vec!["points", "--vector-file", &v, "--variant", "twisted"],
        vec!["integrate", "--vector-file", &v, "--family", "q", "--w", "1"],
        vec!["converge", "--family", "g", "--s", "2", "--w", "0", "--nmin", "3", "--nmax", "4"],
        vec!["converge", "--family", "g", "--s", "2", "--w", "1", "--nmin", "5", "--nmax", "4"],
        vec!["bound", "--alpha", "1", "--gamma", "1", "--s", "2", "--tau", "2"],
        vec!["--threads", "0", "bound", "--s", "1"],
    ];
    for args in &cases {
        let (code, out, err) = call(args);
        assert_eq!(code, 1, "{args:?}: {out}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn computation_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let v = write_vector(dir.path(), "v.txt", "7 2\n1 3\n");
    let (code, out, err) = call(&[
        "wce", "--space", "korobov", "--vector-file", &v, "--alpha", "1.5", "--tol", "1e-12", "--max-terms", "100",
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(out.is_empty());
    assert!(err.contains("budget") || err.contains("terms"), "{err}");

    let (code, _, _) = call(&[
        "wce", "--space", "double-sum", "--kernel", "cosine", "--vector-file", &v, "--alpha", "1.5",
        "--tol", "1e-12", "--max-terms", "100",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn help_exits_with_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("cbc") && out.contains("converge"));
}
