//! End-to-end runs of the `qchaos` binary.

use std::process::Command;

fn qchaos() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qchaos"))
}

#[test]
fn identities_pass_with_exit_zero() {
    let out = qchaos().args(["identities", "--q", "0.3", "--instances", "5"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("same-parity-polarization") && text.contains("expected-nonzero"));
}

#[test]
fn q_one_warns_and_skips() {
    let out = qchaos().args(["identities", "--q", "1", "--instances", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("skipped"));
}

#[test]
fn sweep_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = qchaos()
            .args(["sweep", "--q", "0.5", "--kmax", "5", "--moments-up-to", "4", "--out-csv"])
            .arg(&path)
            .env_remove("QCHAOS_CACHE_DIR")
            .output()
            .unwrap();
        // five rows decay like 1/k, which is not yet below 0.05 of the first
        assert_eq!(out.status.code(), Some(1));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 6);
}

#[test]
fn cached_rows_reproduce_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |name: &str| {
        let path = dir.path().join(name);
        qchaos()
            .args(["sweep", "--q", "0.3", "--m", "2", "--n", "3", "--kmax", "3", "--moments-up-to", "4", "--out-csv"])
            .arg(&path)
            .env("QCHAOS_CACHE_DIR", &cache)
            .output()
            .unwrap();
        std::fs::read(path).unwrap()
    };
    let fresh = run("fresh.csv");
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 3);
    assert_eq!(fresh, run("cached.csv"));
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["sweep", "--m", "2", "--n", "2"][..],
        &["sweep", "--moments-up-to", "5"],
        &["--cap-elements", "100", "sweep", "--kmax", "12", "--moments-up-to", "2"],
        &["oracle", "--single", "--r-max", "14"],
    ] {
        let out = qchaos().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = qchaos().args(["--cap-elements", "100", "sweep", "--kmax", "12", "--moments-up-to", "2"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("largest feasible k"));
}

#[test]
fn fixed_family_is_flagged() {
    let out = qchaos().args(["sweep", "--family", "fixed", "--kmax", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("no-convergence"));
}

#[test]
fn oracle_tables() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("o.csv");
    let out = qchaos().args(["oracle", "--single", "--q", "0", "--out-csv"]).arg(&csv).output().unwrap();
    assert!(out.status.success());
    let moments: Vec<String> =
        std::fs::read_to_string(&csv).unwrap().lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(moments, ["1", "0", "1", "0", "2", "0", "5", "0", "14"]);
    let out = qchaos().args(["oracle", "--single", "--q", "1", "--r-max", "6"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).lines().last().unwrap().trim_end().ends_with("15"));
}

#[test]
fn kernel_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("f.json");
    let bin = dir.path().join("f.bin");
    let ok = |args: &[&std::ffi::OsStr]| {
        let out = qchaos().args(args).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    ok(&["kernel".as_ref(), "generate".as_ref(), "--family".as_ref(), "random-symmetric".as_ref(), "--m".as_ref(), "3".as_ref(), "--dim".as_ref(), "3".as_ref(), "--out".as_ref(), json.as_os_str()]);
    ok(&["kernel".as_ref(), "convert".as_ref(), json.as_os_str(), bin.as_os_str()]);
    let a = ok(&["kernel".as_ref(), "inspect".as_ref(), json.as_os_str()]);
    let b = ok(&["kernel".as_ref(), "inspect".as_ref(), bin.as_os_str()]);
    assert_eq!(a, b);
    assert!(a.contains("symmetry: full"));
}
