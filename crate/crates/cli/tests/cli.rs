use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("minsurf-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn minsurf(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsurf"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("MINSURF_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn manifest(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.manifest.json"))).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_owned).collect()).collect();
    (header, rows)
}

#[test]
fn catenoid_table_for_rho_two() {
    let dir = scratch("cat");
    let o = minsurf(&["catenoid", "--rho", "2.0"], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&dir.join("catenoid.csv"));
    assert_eq!(header[..3], ["rho", "branch", "w"]);
    assert_eq!(rows.len(), 2);
    let w: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!((w[0] - 0.58939).abs() < 1e-5 && (w[1] - 2.12679).abs() < 1e-5, "{w:?}");
    assert_eq!([rows[0][6].as_str(), rows[1][6].as_str()], ["true", "false"]);
    // Seventeen significant digits: one leading digit and sixteen decimals.
    let mantissa = rows[0][2].split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "{}", rows[0][2]);
}

#[test]
fn catenoid_below_critical_ratio_has_no_rows() {
    let dir = scratch("cat12");
    let o = minsurf(&["catenoid", "--rho", "1.2"], &dir);
    assert_eq!(code(&o), 0);
    assert!(csv_rows(&dir.join("catenoid.csv")).1.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    let dir = scratch("usage");
    assert_eq!(code(&minsurf(&["catenoid", "--bogus", "1"], &dir)), 2);
    assert_eq!(code(&minsurf(&["catenoid", "--rho", "-1"], &dir)), 2);
    assert_eq!(code(&minsurf(&["catenoid", "--sweep", "1,2"], &dir)), 2);
    assert_eq!(code(&minsurf(&["detvar", "--chart", "svd", "--p", "4", "--q", "3"], &dir)), 2);
    assert_eq!(code(&minsurf(&["no-such-command"], &dir)), 2);
}

#[test]
fn failing_checks_exit_one() {
    let dir = scratch("fail");
    let o = minsurf(&["membrane", "--preset", "static-catenoid", "--dt", "0.5", "--steps", "50"], &dir);
    assert_eq!(code(&o), 1);
    let m = manifest(&dir, "membrane");
    assert_eq!(m["pass"], false);
}

#[test]
fn manifest_lists_every_check() {
    let dir = scratch("manifest");
    assert_eq!(code(&minsurf(&["stiefel", "--n", "3", "--k", "2", "--count", "5"], &dir)), 0);
    let m = manifest(&dir, "stiefel");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["command"]["stiefel"]["count"], 5);
    assert_eq!(m["config"]["common"]["seed"], 42);
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    let groups = m["checks"].as_array().unwrap();
    assert!(groups.iter().any(|g| g["group"].as_str().unwrap().starts_with("criterion 10")));
    for g in groups {
        for c in g["checks"].as_array().unwrap() {
            for key in ["name", "value", "tol", "pass"] {
                assert!(c.get(key).is_some(), "{c}");
            }
        }
    }
    assert_eq!(m["pass"], true);
}

#[test]
fn seed_determines_random_sweeps() {
    let (a, b, c) = (scratch("seed-a"), scratch("seed-b"), scratch("seed-c"));
    for (dir, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        assert_eq!(code(&minsurf(&["detvar", "--count", "10", "--seed", seed], dir)), 0);
    }
    let read = |d: &Path| fs::read(d.join("detvar.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn environment_overrides_output_dir() {
    let (flag, env) = (scratch("flag"), scratch("env"));
    let o = Command::new(env!("CARGO_BIN_EXE_minsurf"))
        .args(["rotate", "--n", "1", "--k", "3", "--sign", "plus", "--out"])
        .arg(&flag)
        .env("MINSURF_OUT", &env)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(env.join("rotate_n1_k3_plus.csv").exists());
    assert!(!flag.exists());
}

#[test]
fn collapsing_circle_preset_reports_blowup() {
    let dir = scratch("membrane");
    let o = minsurf(&["membrane", "--preset", "collapsing-circle", "--steps", "1000"], &dir);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&dir.join("membrane.csv"));
    assert_eq!(header[0], "t");
    assert!(rows.len() > 700);
    let m = manifest(&dir, "membrane");
    let est = m["summary"]["blowup_t_extrapolated"].as_f64().unwrap();
    assert!((est - std::f64::consts::FRAC_PI_2).abs() < 5e-3, "{est}");
    assert!(m["summary"]["blowup_t_termination"].as_f64().is_some());
}

#[test]
fn json_tables() {
    let dir = scratch("json");
    assert_eq!(code(&minsurf(&["spectrum", "--format", "json"], &dir)), 0);
    let t: Value = serde_json::from_str(&fs::read_to_string(dir.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(t["columns"][0], "quantity");
    let row = &t["rows"][0];
    assert_eq!(row[0], "rayleigh_quotient_sech");
    assert!((row[1].as_f64().unwrap() + 8.0 / 15.0).abs() < 1e-9);
}

#[test]
fn config_files_run_and_reject_unknown_keys() {
    let dir = scratch("config");
    fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    fs::write(&good, r#"{"subcommand": "s3-torus", "parameters": {"e": [0, 0.5], "grid": 8}, "format": "json"}"#)
        .unwrap();
    let o = minsurf(&["run", good.to_str().unwrap()], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t: Value = serde_json::from_str(&fs::read_to_string(dir.join("s3_torus.json")).unwrap()).unwrap();
    assert_eq!(t["rows"].as_array().unwrap().len(), 2);

    let bad_key = dir.join("bad_key.json");
    fs::write(&bad_key, r#"{"subcommand": "catenoid", "colour": "red"}"#).unwrap();
    assert_eq!(code(&minsurf(&["run", bad_key.to_str().unwrap()], &dir)), 2);
    let bad_param = dir.join("bad_param.json");
    fs::write(&bad_param, r#"{"subcommand": "catenoid", "parameters": {"rhoo": 2}}"#).unwrap();
    assert_eq!(code(&minsurf(&["run", bad_param.to_str().unwrap()], &dir)), 2);
}

#[test]
fn verify_all_quick_passes() {
    let dir = scratch("verify");
    let o = minsurf(&["verify-all", "--quick"], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let m = manifest(&dir, "verify-all");
    let groups = m["checks"].as_array().unwrap();
    assert_eq!(groups.len(), 15);
    assert!(groups.iter().all(|g| g["pass"] == true));
    assert_eq!(m["pass"], true);
}
