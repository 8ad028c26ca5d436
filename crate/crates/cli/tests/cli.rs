use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wreath-embed"))
}

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn embed_z2_theorem5() {
    let o = run(&["embed", spec("z2.toml").to_str().unwrap(), "--theorem", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("verdict: pass"));
    assert!(text.contains("active-order: 16"));
}

#[test]
fn embed_heisenberg_theorem1_window() {
    let o = run(&[
        "embed",
        spec("heisenberg.toml").to_str().unwrap(),
        "--theorem",
        "1",
        "--window",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("mode: window [-16, 16]"));
}

#[test]
fn infinite_order_generator_is_rejected() {
    let o = run(&["embed", spec("z_times_z2.toml").to_str().unwrap(), "--theorem", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("finite orders required"));
}

#[test]
fn capacity_error_suggests_remedy() {
    let o = run(&["embed", spec("klein.toml").to_str().unwrap(), "--theorem", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("smallest admissible modulus is 32"), "{err}");
    assert!(err.contains("--c-order 32"));
    let o = run(&[
        "embed",
        spec("klein.toml").to_str().unwrap(),
        "--theorem",
        "5",
        "--c-order",
        "32",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn large_domains_need_the_flag() {
    let o = run(&["embed", spec("s3.toml").to_str().unwrap(), "--theorem", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("1679616 points") && err.contains("estimated memory"),
        "{err}"
    );
    assert!(err.contains("--allow-large"));
}

#[test]
fn certificates_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.txt");
    let z3 = spec("z3.toml");
    let args = [
        "embed",
        z3.to_str().unwrap(),
        "--theorem",
        "5",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(&out).unwrap());

    let o = run(&[
        "verify",
        z3.to_str().unwrap(),
        "--theorem",
        "5",
        "--seed",
        "11",
        "--certificate",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reproduced: yes"));
    let o = run(&[
        "verify",
        z3.to_str().unwrap(),
        "--theorem",
        "5",
        "--seed",
        "12",
        "--certificate",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("reproduced: no"));
}

#[test]
fn oracles() {
    let o = run(&["oracle", "uneven", "2", "4", "8", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "uneven: yes\n");
    let o = run(&["oracle", "uneven", "1", "2", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample: s_2 - s_1 = s_3 - s_2"));
    let o = run(&["oracle", "decompose", "S3", "(1 2 3)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("length: 1"));
    let o = run(&["oracle", "derived", "S3"]);
    assert!(stdout(&o).contains("derived-length: 2"));
}

#[test]
fn inspect_reports() {
    let o = run(&["inspect", spec("s3.toml").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("order: 6") && text.contains("derived-length: 2") && text.contains("abelianization: Z2"));
    let text = stdout(&run(&["inspect", spec("trivial.toml").to_str().unwrap()]));
    assert!(text.contains("order: 1") && text.contains("derived-length: 0"));
    let text = stdout(&run(&["inspect", spec("heisenberg.toml").to_str().unwrap()]));
    assert!(text.contains("backend: integer-matrix") && text.contains("rank 2"));
}

#[test]
fn parse_errors_point_at_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "backend = \"finite-permutation\"\ndegree = 3\ngenerators = [\"(1 4)\"]\n",
    )
    .unwrap();
    let o = run(&["inspect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 15"), "{}", stderr(&o));
}

#[test]
fn report_runs_applicable_constructions() {
    let o = run(&["report", spec("z2.toml").to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("theorem-1: not run"));
    assert!(text.contains("theorem-3 on Z2: pass"));
    assert!(text.contains("theorem-5 on Z2: pass"));
    assert!(text.contains("corollary-6 on Z2: pass"));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dump_prints_d() {
    let o = run(&["embed", spec("z2.toml").to_str().unwrap(), "--theorem", "5", "--dump"]);
    let text = stdout(&o);
    assert!(text.contains("[d]"));
    assert!(text.contains("(2, 0, 0) -> "), "{text}");
}
