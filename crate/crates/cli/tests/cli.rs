use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cqednet"));
    c.env("CQEDNET_THREADS", "2");
    c
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cqednet-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_versioned_csv_and_audit() {
    let out = scratch("run");
    let o = bin()
        .args(["run", scenarios().join("freeze_bd.toml").to_str().unwrap(), "--samples", "201", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("series.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# cqednet-csv v1"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for col in ["t", "cc", "qd", "gqd", "eof", "concurrence", "ge", "p_vac"] {
        assert!(header.contains(&col), "missing column {col}");
    }
    assert_eq!(lines.count(), 201);
    // relative entropy of entanglement is reserved and always empty
    let ree = header.iter().position(|h| *h == "ree").unwrap();
    assert!(csv.lines().skip(2).all(|l| l.split(',').nth(ree) == Some("")));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    for key in ["scenario: freeze_bd", "audit.max_trace_drift: ", "audit.min_eigenvalue: ", "wall_time_s: "] {
        assert!(summary.contains(key), "summary lacks {key}");
    }
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn runs_are_byte_identical() {
    let cfg = scenarios().join("chain_transmission.toml");
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    for d in [&a, &b] {
        let o = bin().args(["run", cfg.to_str().unwrap(), "--samples", "101", "--out"]).arg(d).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(a.join("series.csv")).unwrap(), std::fs::read(b.join("series.csv")).unwrap());
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
}

#[test]
fn missing_t_max_exits_2_naming_the_field() {
    let dir = scratch("bad");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.toml");
    std::fs::write(
        &cfg,
        "engine = \"chain\"\n[time_grid]\nn_samples = 11\n[initial_state]\nkind = \"site\"\nsite = 1\n",
    )
    .unwrap();
    let o = bin().args(["run", cfg.to_str().unwrap(), "--out"]).arg(dir.join("out")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t_max"), "{}", stderr(&o));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = scratch("typo");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("typo.toml");
    let text = std::fs::read_to_string(scenarios().join("chain_transmission.toml")).unwrap();
    std::fs::write(&cfg, text.replace("sites = 3", "sites = 3\nsitez = 4")).unwrap();
    let o = bin().args(["run", cfg.to_str().unwrap(), "--out"]).arg(dir.join("out")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sitez"), "{}", stderr(&o));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_initial_state_exits_2() {
    let o = bin()
        .args(["run", scenarios().join("double_transition.toml").to_str().unwrap(), "--out"])
        .arg(scratch("dt"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("negative eigenvalues"), "{}", stderr(&o));
}

#[test]
fn empty_sweep_exits_2() {
    let o = bin()
        .args(["sweep", scenarios().join("thermal_gain.toml").to_str().unwrap(), "--axis", "j", "--values", ""])
        .arg("--out")
        .arg(scratch("empty"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = scratch("sweep");
    let o = bin()
        .args([
            "sweep",
            scenarios().join("chain_transmission.toml").to_str().unwrap(),
            "--axis",
            "gamma",
            "--values",
            "0,0.01",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let sweep = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = sweep.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("gamma,status,") && rows[0].contains("transmission.percent"));
    let dirs = std::fs::read_dir(&dir).unwrap().filter(|e| e.as_ref().unwrap().path().is_dir()).count();
    assert_eq!(dirs, 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn selftest_passes() {
    let o = bin().arg("selftest").output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
