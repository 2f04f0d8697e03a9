use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_degenfrac"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn ml_prints_csv() {
    let out = bin().args(["ml", "--beta", "1", "--gamma", "1", "--z", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("beta,gamma,z_re,z_im,value_re,value_im"));
    assert!(text.contains("2.718281828459045"));
}

#[test]
fn unknown_model_is_config_error() {
    let out = bin().args(["dispersion", "--model", "rosby"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rossby"));
}

#[test]
fn bad_grid_is_config_error() {
    let out = bin().args(["solve", "--model", "rossby", "--grid", "16x16x16"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_snapshots() {
    let dir = scratch("solve");
    let status = bin()
        .args(["solve", "--model", "rossby", "--grid", "16x16", "--times", "0,0.5,1", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    for k in 0..3 {
        assert!(dir.join(format!("u_{k:03}.dfrc")).exists());
        assert!(dir.join(format!("u_{k:03}.csv")).exists());
    }
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary.is_object());
}

#[test]
fn verify_single_criterion() {
    let dir = scratch("verify");
    let report = dir.join("report.jsonl");
    let out = bin().args(["verify", "--criteria", "5", "--out"]).arg(&report).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(!text.is_empty());
    for line in text.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["criterion"], 5);
        assert_eq!(rec["pass"], true);
    }
}

#[test]
fn contour_second_order() {
    let dir = scratch("contour");
    let report = dir.join("contour.jsonl");
    let out = bin().args(["contour", "--scenario", "second_order", "--out"]).arg(&report).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.lines().any(|l| l.contains("\"kind\":\"pde\"")));
}

#[test]
fn config_file_supplies_arguments() {
    let dir = scratch("config");
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# dispersion run\nmodel = sobolev\ngrid = 4x4x4\n").unwrap();
    let csv = dir.join("disp.csv");
    let out = bin().args(["--config"]).arg(&cfg).args(["dispersion", "--out"]).arg(&csv).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 1);
}
