use std::path::Path;
use std::process::{Command, Output};

fn deltasign(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltasign"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn delta_and_sign() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "f.anf", "nvars=4\nx1*x2*x3*x4 + 1\n");
    let o = deltasign(&["delta", "f.anf"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-14");

    let o = deltasign(&["sign", "f.anf", "--strategy", "brute"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "NEGATIVE");

    write(d.path(), "b.anf", "nvars=4\nx1*x2*x3 + x4\n");
    let o = deltasign(&["sign", "b.anf"], d.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "BALANCED");
}

#[test]
fn bad_input_exits_two() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.anf", "nvars=2\nx7\n");
    assert_eq!(deltasign(&["delta", "bad.anf"], d.path()).status.code(), Some(2));
    assert_eq!(deltasign(&["delta", "missing.anf"], d.path()).status.code(), Some(2));
}

#[test]
fn reduce3_then_verify() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "f.anf", "nvars=4\nx1*x2*x3*x4 + 1\n");
    let o = deltasign(&["reduce3", "f.anf", "--delta", "0.4", "-o", "cert.json"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "NEGATIVE");

    let o = deltasign(&["verify", "cert.json"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certificate OK"));

    // a flipped verdict must be rejected
    let text = std::fs::read_to_string(d.path().join("cert.json")).unwrap();
    write(d.path(), "bad.json", &text.replace("\"NEGATIVE\"", "\"POSITIVE\""));
    assert_eq!(deltasign(&["verify", "bad.json"], d.path()).status.code(), Some(2));
}

#[test]
fn circuit_pair_to_degree_four() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "q1.slp", "inputs x:1 y:2\nz1 = y1 AND y2\noutput z1\n");
    write(d.path(), "q2.slp", "inputs x:1 y:2\nz1 = y1 XOR x1\noutput z1\n");
    let o = deltasign(&["reduce-circuit", "q1.slp", "q2.slp", "--x", "1", "-o", "f.anf"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // one solution against two, each scaled by the same constant
    let o = deltasign(&["delta", "f.anf"], d.path());
    assert!(stdout(&o).trim().starts_with('-'));
}

#[test]
fn synth_and_qswe() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "f.anf", "nvars=2\nx1*x2\n");
    let o = deltasign(&["synth", "f.anf", "--delta", "0.3", "-o", "w.txt"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = deltasign(&["qswe", "w.txt"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("real_part_integer="));
}

#[test]
fn selftest_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = deltasign(&["selftest", "--seed", "3"], d.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}
