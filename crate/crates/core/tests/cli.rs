use rrpath::rough_path::{ReducedRoughPath, SecondLevelTableJson};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn rrpath(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrpath"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn last_csv_row(path: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect()
}

#[test]
fn lift_writes_a_reloadable_rough_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "lift.json",
        r#"{"driver": {"kind": "smooth", "curve": "circle", "steps": 128, "horizon": 6.283185307179586}, "alpha": 0.45}"#,
    );
    let out = rrpath(dir.path(), &["lift", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("lift_report.json"));
    assert_eq!(report["schema"], "rrpath.lift_report/1");
    assert_eq!(report["steps"], 128);
    let r = ReducedRoughPath::load(&dir.path().join("rough_path.json")).unwrap();
    assert_eq!(report["fingerprint"], r.fingerprint());
    assert!(report["norms"]["total"].as_f64().unwrap() > 0.0);
    assert_eq!(std::fs::read_to_string(dir.path().join("path.csv")).unwrap().lines().count(), 130);
}

#[test]
fn integrate_line_driver_gives_half_and_zero() {
    for (lift, exact) in [("geometric", 0.5), ("ito", 0.0)] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(
            dir.path(),
            "int.json",
            &format!(
                r#"{{"driver": {{"kind": "smooth", "curve": "line", "params": [1.0], "steps": 64, "horizon": 1.0}},
                    "lift": "{lift}", "alpha": 0.5, "integrand": "driver"}}"#
            ),
        );
        let out = rrpath(dir.path(), &["integrate", "--config", &cfg]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let row = last_csv_row(&dir.path().join("integral.csv"));
        assert!((row[1] - exact).abs() <= 1e-14, "{lift}: {row:?}");
        let report = json(&dir.path().join("integral_report.json"));
        assert!(report["norm_bound"]["bound"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn solve_matches_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "solve.json",
        r#"{"driver": {"kind": "smooth", "curve": "line", "params": [1.0], "steps": 4096, "horizon": 1.0},
            "beta": 0.5, "field": "linear:[[1]]", "xi": [1.0]}"#,
    );
    let out = rrpath(dir.path(), &["solve", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = last_csv_row(&dir.path().join("solution.csv"));
    assert!((row[1] - 1f64.exp()).abs() < 1e-6);
    let report = json(&dir.path().join("solve_report.json"));
    assert_eq!(report["schema"], "rrpath.solve_report/1");
    assert!(report["residual_norm"].as_f64().unwrap() < 1e-10);
    for step in report["steps"].as_array().unwrap() {
        assert!(step["final_contraction_ratio"].as_f64().unwrap() <= 0.5);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown_key = write_config(
        dir.path(),
        "bad.json",
        r#"{"driver": {"kind": "smooth", "curve": "circle", "steps": 8, "horizon": 1.0}, "alhpa": 0.4}"#,
    );
    assert_eq!(rrpath(dir.path(), &["lift", "--config", &unknown_key]).status.code(), Some(2));

    let low_alpha = write_config(
        dir.path(),
        "alpha.json",
        r#"{"driver": {"kind": "smooth", "curve": "circle", "steps": 8, "horizon": 1.0}, "alpha": 0.3}"#,
    );
    let out = rrpath(dir.path(), &["lift", "--config", &low_alpha]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(1/3, 1/2]"));

    let blow_up = write_config(
        dir.path(),
        "blow.json",
        r#"{"driver": {"kind": "smooth", "curve": "line", "params": [1.0], "steps": 256, "horizon": 2.0},
            "field": "square", "xi": [1.0], "solver": {"tau_min": 0.1}}"#,
    );
    assert_eq!(rrpath(dir.path(), &["solve", "--config", &blow_up]).status.code(), Some(3));

    assert_eq!(rrpath(dir.path(), &["convergence", "--scenario", "nope"]).status.code(), Some(2));
    assert_eq!(rrpath(dir.path(), &["fbm-gen", "--hurst", "0.7"]).status.code(), Some(2));
}

#[test]
fn table_check_accepts_lifts_and_rejects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let x = rrpath::drivers::gen_fbm(0.4, 2, 5, std::sync::Arc::new(rrpath::Grid::uniform(24, 1.0).unwrap())).unwrap();
    let r = ReducedRoughPath::geometric_lift(x, 0.4).unwrap();
    let mut table = SecondLevelTableJson::from_rough_path(&r);
    let good = dir.path().join("good.json");
    std::fs::write(&good, serde_json::to_string(&table).unwrap()).unwrap();
    let out = rrpath(dir.path(), &["check", "--table", good.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&dir.path().join("table_check.json"))["passed"], true);

    table.second_level_table[3][4][1][1] += 1e-4;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&table).unwrap()).unwrap();
    let out = rrpath(dir.path(), &["check", "--table", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Chen relation violated"));
}

#[test]
fn fbm_gen_is_seeded() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = rrpath(d.path(), &["fbm-gen", "--hurst", "0.45", "--steps", "100", "--dim", "2", "--seed", "11"]);
        assert!(out.status.success());
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("fbm.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(String::from_utf8(read(&a)).unwrap().lines().count(), 102);
}

#[test]
fn convergence_scenario_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "conv.json",
        r#"{"driver": {"kind": "smooth", "curve": "line", "params": [1.0], "steps": 8, "horizon": 1.0},
            "scenario": {"name": "linear_exp", "min_level": 4, "max_level": 9}}"#,
    );
    let out = rrpath(dir.path(), &["convergence", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = json(&dir.path().join("convergence.json"));
    assert_eq!(table["rows"].as_array().unwrap().len(), 6);
    assert!(table["fitted_order"].as_f64().unwrap() >= 1.0);
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("N,value,error\n16,"));
}
