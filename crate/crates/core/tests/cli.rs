use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multient"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn measure(file: &str, kind: &str) -> (i32, String, String) {
    let path = data(file);
    run(&["measure", "--state", path.to_str().unwrap(), "--measure", kind])
}

#[test]
fn ghz_concurrence_is_one() {
    let (code, out, _) = measure("ghz3.state", "concurrence");
    assert_eq!(code, 0);
    assert!(out.starts_with("dims: 2 2 2\nkind: pure\nmeasure: concurrence\n"));
    assert!(out.contains("cut_count: 3\n"));
    assert!(out.ends_with("E_bar = 1.000000000000\n"), "{out}");
}

#[test]
fn product_state_is_zero() {
    for kind in ["concurrence", "entropy", "negativity"] {
        let (code, out, _) = measure("product3.state", kind);
        assert_eq!(code, 0);
        assert!(out.ends_with("E_bar = 0.000000000000\n"), "{kind}: {out}");
    }
}

#[test]
fn mixed_state_rejects_pure_only_measures() {
    for kind in ["concurrence", "entropy"] {
        let (code, out, err) = measure("bell_mixed.state", kind);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("negativity"), "{err}");
    }
    let (code, out, _) = measure("bell_mixed.state", "negativity");
    assert_eq!(code, 0);
    assert!(out.ends_with("E_bar = 0.500000000000\n"));
}

#[test]
fn classify_verdicts() {
    for (file, verdict) in [
        ("ghz3.state", "fully-inseparable-consistent"),
        ("product3.state", "semiseparable-consistent"),
        ("zero_bell.state", "incompletely-separable"),
    ] {
        let path = data(file);
        let (code, out, _) = run(&["classify", "--state", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(out.starts_with(&format!("verdict: {verdict}\n")), "{file}: {out}");
    }
}

#[test]
fn csv_output() {
    let path = data("zero_bell.state");
    let (code, out, _) = run(&[
        "measure",
        "--state",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "cut,side1,side2,value");
    assert_eq!(lines[1], "1,0,1;2,0.000000000000");
    assert_eq!(lines[2], "2,1,0;2,1.000000000000");
    assert_eq!(lines[3], "3,2,0;1,1.000000000000");
    assert_eq!(lines[4], "E_bar,,,0.666666666667");
}

#[test]
fn distinct_cut_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ghz4.state");
    std::fs::write(
        &path,
        "dims: 2 2 2 2\nkind: pure\na 0 0.7071067811865476 0\na 15 0.7071067811865476 0\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (_, literal, _) = run(&["measure", "--state", p]);
    let (_, distinct, _) = run(&["measure", "--state", p, "--cut-mode", "distinct"]);
    assert!(literal.contains("cut_count: 10\n"));
    assert!(distinct.contains("cut_count: 7\n"));
    assert!(literal.ends_with("E_bar = 1.000000000000\n"));
    assert!(distinct.ends_with("E_bar = 1.000000000000\n"));
}

#[test]
fn three_qubit_family_agrees() {
    let (code, out, _) = run(&[
        "family",
        "three-qubit",
        "--coeffs",
        "0.7071067811865476",
        "0",
        "0",
        "0",
        "0",
        "0",
        "0.7071067811865476",
        "0",
        "0",
        "0",
        "0",
        "0",
        "0",
        "0",
        "0",
        "0",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("E_bar: closed = 1.000000000000 generic = 1.000000000000"));
    assert!(out.contains("status: agree"));
}

#[test]
fn isotropic_family_values() {
    let (code, out, _) = run(&["family", "isotropic", "--n", "3", "--x", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("closed = 0.500000000000 generic = 0.500000000000"), "{out}");
    let (code, out, _) = run(&["family", "isotropic", "--n", "3", "--x", "0.1"]);
    assert_eq!(code, 0);
    assert!(out.contains("closed = 0.000000000000 generic = 0.000000000000"), "{out}");
    let (code, _, _) = run(&["family", "isotropic", "--n", "9", "--x", "0.5"]);
    assert_eq!(code, 2);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let (code, out, _) = run(&[
        "sweep",
        "isotropic",
        "--n",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 22);
    assert_eq!(lines[0], "x,e_bar_closed,e_bar_generic");
    assert_eq!(lines[1], "0.000000000000,0.000000000000,0.000000000000");
    assert_eq!(lines[21], "1.000000000000,0.500000000000,0.500000000000");
}

#[test]
fn reruns_are_byte_identical() {
    let path = data("qutrit_qubit.state");
    let args = ["measure", "--state", path.to_str().unwrap(), "--measure", "negativity"];
    let first = bin().args(args).output().unwrap();
    let second = bin().args(args).output().unwrap();
    assert_eq!(first.stdout, second.stdout);
    let (_, a, _) = run(&["sweep", "isotropic", "--n", "4", "--steps", "11"]);
    let (_, b, _) = run(&["sweep", "isotropic", "--n", "4", "--steps", "11"]);
    assert_eq!(a, b);
}

#[test]
fn malformed_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.state");
    std::fs::write(&path, "dims: 2 2\nkind: pure\na 9 1 0\n").unwrap();
    let (code, _, err) = run(&["measure", "--state", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: "), "{err}");

    let (code, _, err) = run(&["measure", "--state", "/nonexistent/x.state"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"));

    let (code, _, _) = run(&["measure"]);
    assert_eq!(code, 2);
}
