use std::fs;
use std::process::Command;

fn kelab() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kelab"));
    cmd.env_remove("KELAB_OUTPUT_DIR");
    cmd
}

#[test]
fn beta_at_endpoint_rejected_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[model]\ndelta_sweep = [0.125, 0.0625]\nbeta = -2.0\n").unwrap();
    let out = kelab().arg("--config").arg(&cfg).arg("--output-dir").arg(dir.path()).arg("node-bound").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("beta"), "{err}");
}

#[test]
fn beta_at_endpoint_rejected_from_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = kelab().args(["solve", "--beta", "-2"]).arg("--output-dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn node_bound_by_degree() {
    let out = kelab().args(["node-bound", "--degree", "3"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
    let out = kelab().args(["node-bound", "--degree", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = kelab().env("KELAB_OUTPUT_DIR", dir.path()).arg("node-bound").output().unwrap();
    assert!(out.status.success());
    let table = fs::read_to_string(dir.path().join("node_bound.csv")).unwrap();
    assert!(table.starts_with("degree,max_nodes\n"));
    assert!(table.contains("\n3,4\n") && table.contains("\n4,2\n"));
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn identities_reproducible_per_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = kelab().args(["--seed", "7", "verify-identities"]).arg("--output-dir").arg(dir.path()).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    }
    for name in ["identities.csv", "summary.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn failing_checks_exit_one() {
    // the default sweep includes delta = 1/8, where the gate rejects
    let dir = tempfile::tempdir().unwrap();
    let out = kelab().args(["solve", "--delta", "0.125"]).arg("--output-dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    assert!(text.contains("exceeds_contraction"), "{text}");
}
