use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn default_config() -> Value {
    let text = fs::read_to_string(root().join("config/default.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Write `config` into `dir` with data paths pointing back at the shipped CSVs.
fn write_config(dir: &Path, mut config: Value) -> PathBuf {
    if let Some(scans) = config
        .pointer_mut("/fit/scans")
        .and_then(Value::as_array_mut)
    {
        for s in scans {
            let rel = s["csv_path"].as_str().unwrap().to_string();
            if !Path::new(&rel).is_absolute() {
                s["csv_path"] = json!(root().join("config").join(rel));
            }
        }
    }
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

fn squeeze(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeeze"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--no-timestamp")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn unknown_key_exits_2_with_line_number() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(root().join("config/default.json"))
        .unwrap()
        .replace("\"round_trip_loss\"", "\"round_trip_loss_pct\"");
    let path = dir.path().join("bad.json");
    fs::write(&path, &text).unwrap();
    let line = text
        .lines()
        .position(|l| l.contains("round_trip_loss_pct"))
        .unwrap()
        + 1;
    let o = squeeze(&["spectrum"], &path, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains(&format!("line {line}")),
        "{}",
        stderr(&o)
    );
}

#[test]
fn invalid_value_exits_2_naming_its_line() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    c["pump"]["alpha_mag"] = json!(1.2);
    let path = write_config(dir.path(), c);
    let o = squeeze(&["delay-scan"], &path, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let text = fs::read_to_string(&path).unwrap();
    let line = text
        .lines()
        .position(|l| l.contains("\"alpha_mag\""))
        .unwrap()
        + 1;
    assert!(
        stderr(&o).contains(&format!("config.json:{line}:")),
        "{}",
        stderr(&o)
    );
}

#[test]
fn missing_config_file_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = squeeze(&["budget"], &dir.path().join("nope.json"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_csv_exits_2() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let mut c = default_config();
    c["fit"]["scans"][1]["csv_path"] = json!(empty);
    let o = squeeze(&["fit"], &write_config(dir.path(), c), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty.csv"), "{}", stderr(&o));
}

#[test]
fn malformed_row_names_file_and_line() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(
        &bad,
        "excess_fiber_m,noise_db,std_dev_db\n0,-2.1,0.04\n4,oops,0.04\n8,-2.0,0.04\n",
    )
    .unwrap();
    let mut c = default_config();
    c["fit"]["scans"][0]["csv_path"] = json!(bad);
    let o = squeeze(&["fit"], &write_config(dir.path(), c), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.csv:3:"), "{}", stderr(&o));
}

#[test]
fn short_csv_exits_2() {
    let dir = TempDir::new().unwrap();
    let short = dir.path().join("short.csv");
    fs::write(
        &short,
        "excess_fiber_m,noise_db,std_dev_db\n0,-2.1,0.04\n4,-2.2,0.04\n",
    )
    .unwrap();
    let mut c = default_config();
    c["fit"]["scans"][2]["csv_path"] = json!(short);
    let o = squeeze(&["fit"], &write_config(dir.path(), c), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn opo_cavity_in_ledger_exits_2() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    c["ledger"]["squeeze_path"]
        .as_array_mut()
        .unwrap()
        .push(json!({"kind": "opo_cavity", "linewidth_fwhm_hz": 8e6}));
    let o = squeeze(&["budget"], &write_config(dir.path(), c), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).to_lowercase().contains("opo"), "{}", stderr(&o));
}

#[test]
fn fit_iteration_cap_exits_3_with_partial_result() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    c["fit"]["settings"] =
        json!({"nelder_mead": {"max_iterations": 2, "f_tol": 1e-12, "x_tol": 1e-12}});
    let o = squeeze(&["fit"], &write_config(dir.path(), c), dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let r: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit_result.json")).unwrap())
            .unwrap();
    assert_eq!(r["converged"], json!(false));
    assert!(r["lineshape_fwhm_hz"].is_number());
}

#[test]
fn quadrature_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    c["quadrature"] = json!({"rel_tol": 1e-15, "abs_tol": 0.0, "max_subdivisions": 2});
    let o = squeeze(&["delay-scan"], &write_config(dir.path(), c), dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn demod_flag_is_rejected_where_unused() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), default_config());
    let o = squeeze(&["budget", "--demod-hz", "2e6"], &path, dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_extrema_match_closed_form_levels() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    // lossless cavity: T/(T+L) = 1 needs L = 0; unit detection efficiency
    c["cavity"]["round_trip_loss"] = json!(0.0);
    c["detection"]["homodyne_visibility"] = json!(1.0);
    c["detection"]["detector_quantum_efficiency"] = json!(1.0);
    c["pump"]["alpha_mag"] = json!(0.5);
    let o = squeeze(
        &["spectrum", "--demod-hz", "0"],
        &write_config(dir.path(), c),
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("spectrum_phase_0hz.csv"));
    assert_eq!(rows.len(), 360);
    let min = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
    let expect = 10.0 * 9f64.log10();
    assert!(
        (min + expect).abs() < 1e-9 && (max - expect).abs() < 1e-9,
        "{min} {max}"
    );
}

#[test]
fn unpumped_spectrum_is_flat() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    c["pump"] = json!({"pump_power_fraction": 0.0});
    let o = squeeze(&["spectrum"], &write_config(dir.path(), c), dir.path());
    assert_eq!(o.status.code(), Some(0));
    for r in read_csv(&dir.path().join("spectrum_phase_2000000hz.csv")) {
        assert!(r[2].abs() < 1e-12);
    }
}

#[test]
fn emitted_db_values_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), default_config());
    assert_eq!(
        squeeze(&["spectrum"], &path, dir.path()).status.code(),
        Some(0)
    );
    assert_eq!(
        squeeze(&["delay-scan"], &path, dir.path()).status.code(),
        Some(0)
    );
    for name in ["spectrum_phase_1000000hz.csv", "delay_scan_3000000hz.csv"] {
        for r in read_csv(&dir.path().join(name)) {
            assert!((10f64.powf(r[2] / 10.0) - r[1]).abs() < 1e-9 * r[1]);
            assert!((10.0 * r[1].log10() - r[2]).abs() < 1e-9);
        }
    }
}

#[test]
fn delta_lineshape_delay_scan_is_flat_and_flagged() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    c["lineshape"] = json!({"kind": "delta"});
    let o = squeeze(
        &["delay-scan", "--demod-hz", "1e6"],
        &write_config(dir.path(), c),
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = read_csv(&dir.path().join("delay_scan_1000000hz.csv"));
    assert!(rows.iter().all(|r| r[1] == rows[0][1]));
    let side: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("delay_scan_1000000hz.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(side["degenerate"], json!(true));
    assert_eq!(side["found"]["flat"], json!(true));
}

#[test]
fn budget_examples() {
    let dir = TempDir::new().unwrap();
    let mut c = default_config();
    c["ledger"] = json!({
        "lo_path": [{"kind": "fiber", "length_m": 10.0, "group_index": 1.5}],
        "squeeze_path": [{"kind": "fiber", "length_m": 10.0, "group_index": 1.5}]
    });
    let path = write_config(dir.path(), c.clone());
    let o = squeeze(&["budget", "--json"], &path, dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["tau_d_s"], json!(0.0));
    assert_eq!(r["white_light_correction_m"].as_f64().unwrap(), 0.0);

    c["ledger"]["lo_path"]
        .as_array_mut()
        .unwrap()
        .push(json!({"kind": "fiber", "length_m": 4.0, "group_index": 1.5}));
    let o = squeeze(
        &["budget", "--json"],
        &write_config(dir.path(), c.clone()),
        dir.path(),
    );
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["tau_d_s"].as_f64().unwrap() - 20.01e-9).abs() < 0.01e-9);

    let mut toggled = default_config();
    let on = squeeze(
        &["budget", "--json"],
        &write_config(dir.path(), toggled.clone()),
        dir.path(),
    );
    toggled["ledger"]["include_doubler_in_squeeze_path"] = json!(false);
    let off = squeeze(
        &["budget", "--json"],
        &write_config(dir.path(), toggled),
        dir.path(),
    );
    let tau = |o: &Output| {
        serde_json::from_slice::<Value>(&o.stdout).unwrap()["tau_d_s"]
            .as_f64()
            .unwrap()
    };
    assert!((tau(&off) - tau(&on) - 22.736e-9).abs() < 1e-12);
}

#[test]
fn svg_timestamp_is_the_only_difference() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), default_config());
    let plain = dir.path().join("plain");
    let stamped = dir.path().join("stamped");
    assert!(squeeze(&["spectrum"], &path, &plain).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_squeeze"))
        .args(["spectrum", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&stamped)
        .output()
        .unwrap();
    assert!(o.status.success());
    let a = fs::read_to_string(plain.join("spectrum_frequency.svg")).unwrap();
    let b = fs::read_to_string(stamped.join("spectrum_frequency.svg")).unwrap();
    assert!(b.contains("<!-- generated at"));
    let stripped: String = b
        .lines()
        .filter(|l| !l.starts_with("<!--"))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(a, stripped);
}
