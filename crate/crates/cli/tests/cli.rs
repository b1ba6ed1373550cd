use std::path::Path;
use std::process::{Command, Output};

fn srbbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srbbc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(|v| v.split_whitespace().next().unwrap().parse().unwrap()))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(srbbc(&["--help"]).status.code(), Some(0));
    assert_eq!(srbbc(&["compile", "--help"]).status.code(), Some(0));
    assert_eq!(srbbc(&["count", "--n", "2", "--bogus"]).status.code(), Some(1));
    assert_eq!(srbbc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(srbbc(&[]).status.code(), Some(1));
}

#[test]
fn bench_requires_seed() {
    let o = srbbc(&["bench", "--targets", "CNOT"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
}

#[test]
fn count_template_bounds() {
    for (n, bound) in [("2", 20.0), ("3", 112.0), ("4", 496.0)] {
        let o = srbbc(&["count", "--n", n, "--layers", "1"]);
        assert!(o.status.success());
        let out = stdout(&o);
        assert!(field(&out, "cnot ") <= bound);
        assert!(out.contains("within_bounds true"));
    }
}

#[test]
fn basis_listing() {
    let out = stdout(&srbbc(&["basis", "--n", "2"]));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 16);
    let out = stdout(&srbbc(&["basis", "--dim", "3"]));
    assert!(out.lines().last().unwrap().starts_with("9 identity"));
}

#[test]
fn compile_synth_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("s.json");
    let qasm = dir.path().join("c.qasm");
    let report = dir.path().join("r.json");
    let o = srbbc(&[
        "compile",
        "--target",
        "builtin:CNOT",
        "--layers",
        "1",
        "--epsilon",
        "1e-6",
        "--seed",
        "3",
        "--schedule-out",
        p(&sched),
        "--qasm-out",
        p(&qasm),
        "--report",
        p(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(field(&stdout(&o), "final_error ") <= 1e-6);
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["converged"], serde_json::Value::Bool(true));

    let v = srbbc(&["verify", "--circuit", p(&qasm), "--target", "builtin:CNOT", "--phase-invariant", "--tol", "1e-6"]);
    assert!(v.status.success(), "{}", stdout(&v));

    let again = dir.path().join("again.qasm");
    assert!(srbbc(&["synth", "--schedule", p(&sched), "--out", p(&again)]).status.success());
    assert_eq!(std::fs::read_to_string(&again).unwrap(), std::fs::read_to_string(&qasm).unwrap());

    let c = srbbc(&["count", "--circuit", p(&qasm)]);
    assert!(stdout(&c).contains("within_bounds true"));

    let wrong =
        srbbc(&["verify", "--circuit", p(&qasm), "--target", "builtin:SWAP", "--phase-invariant", "--tol", "1e-6"]);
    assert_eq!(wrong.status.code(), Some(1));
}

#[test]
fn strict_non_convergence_exits_2() {
    let o = srbbc(&[
        "compile",
        "--target",
        "builtin:QFT2",
        "--epsilon",
        "1e-300",
        "--restarts",
        "1",
        "--max-evals",
        "5",
        "--optimizer",
        "nelder-mead",
        "--strict",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o =
        srbbc(&["compile", "--target", "builtin:QFT2", "--epsilon", "1e-300", "--restarts", "1", "--max-evals", "5"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn validation_errors_exit_1() {
    assert_eq!(srbbc(&["compile", "--target", "builtin:NoSuchGate"]).status.code(), Some(1));
    assert_eq!(srbbc(&["compile", "--target", "builtin:CNOT", "--epsilon", "0"]).status.code(), Some(1));
    assert_eq!(srbbc(&["compile", "--target", "builtin:CNOT", "--optimizer", "simplex"]).status.code(), Some(1));
    assert_eq!(srbbc(&["synth", "--schedule", "/nonexistent/s.json", "--out", "/tmp/x"]).status.code(), Some(1));
}

#[test]
fn lift_template_and_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.json");
    let big = dir.path().join("big.json");
    let out = dir.path().join("lift.qasm");
    let haar = |n: &str, path: &Path| {
        let o = srbbc(&[
            "compile",
            "--target",
            &format!("haar({n},1)"),
            "--restarts",
            "1",
            "--max-evals",
            "50",
            "--schedule-out",
            p(path),
        ]);
        assert!(o.status.success());
    };
    haar("2", &small);
    haar("3", &big);

    let o = srbbc(&["lift", "--schedule", p(&small), "--out", p(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("n 3 cnot 112 rz 77"));

    let o = srbbc(&["lift", "--schedule", p(&small), "--angles", p(&big), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let direct = dir.path().join("direct.qasm");
    assert!(srbbc(&["synth", "--schedule", p(&big), "--out", p(&direct)]).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), std::fs::read_to_string(&direct).unwrap());

    assert_eq!(
        srbbc(&["lift", "--schedule", p(&small), "--angles", p(&small), "--out", p(&out)]).status.code(),
        Some(1)
    );
}

#[test]
fn bench_table_is_bitwise_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    let args = |path: &Path| {
        srbbc(&["bench", "--seed", "7", "--targets", "CNOT,SWAP,bogus", "--restarts", "4", "--out", p(path)])
    };
    assert!(args(&a).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_srbbc"))
        .env("SRBBC_THREADS", "1")
        .args(["bench", "--seed", "7", "--targets", "CNOT,SWAP,bogus", "--restarts", "4", "--out", p(&b)])
        .output()
        .unwrap();
    assert!(o.status.success());
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# srbbc bench config-sha256="));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("CNOT\t2\t1\t") && rows[0].ends_with("\tok"));
    assert!(rows[2].contains("failed"));
}

#[test]
fn bad_thread_count() {
    let o = Command::new(env!("CARGO_BIN_EXE_srbbc"))
        .env("SRBBC_THREADS", "many")
        .args(["count", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
