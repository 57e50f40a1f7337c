use std::fs;
use std::process::{Command, Output};

fn latgauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latgauss")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_basis(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn gen_then_hkz_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.txt");
    let o = latgauss(&["--seed", "7", "--out", inst.to_str().unwrap(), "gen", "-n", "3", "--mode", "deep"]);
    assert!(o.status.success());
    let text = fs::read_to_string(&inst).unwrap();
    assert!(text.starts_with("3\n") && text.contains("t:"));
    let o = latgauss(&["hkz", "--basis", inst.to_str().unwrap()]);
    assert!(o.status.success());
    let red = stdout(&o);
    assert_eq!(red.lines().count(), 5);
    assert_eq!(red.lines().last(), text.lines().last());
}

#[test]
fn cvp_prints_exact_distance_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_basis(&dir, "z2.txt", "2\n1 0\n0 1\nt: 3/10 -7/10\n");
    let o = latgauss(&["cvp", "--basis", &b, "--census"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    // dist² = 18/100 is not a rational square
    assert!(out.starts_with("distance=0.42426"), "{out}");
    assert!(out.contains("witness=0,-1"));
    assert!(out.contains("rank=2 calls="));
    let o = latgauss(&["cvp", "--basis", &b, "--target", "3/10 2/5"]);
    assert_eq!(stdout(&o), "distance=1/2 witness=0,0\n");
}

#[test]
fn approx_cvp_reports_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_basis(&dir, "b.txt", "3\n3 1 0\n-1 4 2\n0 2 5\nt: 1/3 7/5 -2/3\n");
    let o = latgauss(&["approx-cvp", "--basis", &b, "--f", "10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("witness=") && out.contains(" s=") && out.contains(" ell="), "{out}");
}

#[test]
fn sample_methods_emit_the_requested_count() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_basis(&dir, "z2.txt", "2\n1 0\n0 1\nt: 1/2 1/4\n");
    for method in ["exact", "klein", "dgs"] {
        let o = latgauss(&["sample", "--basis", &b, "-s", "6", "--count", "25", "--method", method, "--oracle"]);
        assert!(o.status.success(), "{method}: {}", String::from_utf8_lossy(&o.stderr));
        let out = stdout(&o);
        assert_eq!(out.lines().count(), 25);
        // every sample is y − (1/2, 1/4) for integer y
        for l in out.lines() {
            let xs: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(xs.len(), 2);
            assert!(xs[0].ends_with("/2") && xs[1].ends_with("/4"), "{l}");
        }
    }
}

#[test]
fn verify_writes_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let sum = dir.path().join("sum.json");
    let o = latgauss(&[
        "verify",
        "shift-count",
        "--dims",
        "2",
        "--trials",
        "3",
        "--summary",
        sum.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().all(|l| l.starts_with("experiment=shift-count ")));
    let json = fs::read_to_string(&sum).unwrap();
    assert!(json.contains("\"pass\": true"));
}

#[test]
fn bad_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let b = write_basis(&dir, "bad.txt", "2\n1 2\n2 4\n");
    let o = latgauss(&["cvp", "--basis", &b, "--target", "0 0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = latgauss(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
}
