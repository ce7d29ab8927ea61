//! Binary-level contract tests: output determinism, format shape, error
//! surfaces. Knocked-down path counts keep these quick; statistical accuracy
//! lives in the acceptance suite.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bk"))
        .args(args)
        .output()
        .expect("bk runs")
}

fn write_model(name: &str, sigma: f64, b: f64, r0: f64) -> PathBuf {
    let path = std::env::temp_dir().join(format!("bk-test-{name}-{}.json", std::process::id()));
    let level = b * (0.03f64).ln();
    fs::write(
        &path,
        format!(r#"{{"sigma":{sigma},"b":{b},"r0":{r0},"a":[{{"t":0.0,"level":{level}}}]}}"#),
    )
    .unwrap();
    path
}

#[test]
fn compare_table5_is_byte_deterministic_and_carries_the_warning() {
    let args = [
        "compare-table5",
        "--paths",
        "20000",
        "--steps",
        "64",
        "--seed",
        "7",
        "--format",
        "csv",
    ];
    let a = bk(&args);
    let b = bk(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.starts_with("# warning: parameter ambiguity"));
    assert!(String::from_utf8_lossy(&a.stderr).contains("parameter ambiguity"));
    // a different seed changes the Monte Carlo column
    let c = bk(&[
        "compare-table5",
        "--paths",
        "20000",
        "--steps",
        "64",
        "--seed",
        "8",
        "--format",
        "csv",
    ]);
    assert!(!a.stdout.is_empty());
    assert_ne!(c.stdout, b.stdout);
    // error column recomputes from the raw columns exactly
    for line in text.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let mc: f64 = cols[10].parse().unwrap();
        let a2: f64 = cols[11].parse().unwrap();
        let err: f64 = cols[12].parse().unwrap();
        assert_eq!(
            (a2 - mc).to_bits(),
            err.to_bits(),
            "error column mismatch: {line}"
        );
    }
}

#[test]
fn bond_table_shape_and_error_column() {
    let args = ["bond-table", "--paths", "2000", "--seed", "5", "--format", "csv"];
    let a = bk(&args);
    let b = bk(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // 9 parameter blocks x 5 maturities plus the header
    assert_eq!(lines.len(), 46);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        let mc: f64 = cols[8].parse().unwrap();
        let a2: f64 = cols[10].parse().unwrap();
        let err: f64 = cols[11].parse().unwrap();
        assert_eq!((a2 - mc).to_bits(), err.to_bits(), "error column mismatch: {line}");
    }
}

#[test]
fn price_mc_is_deterministic_and_json_shaped() {
    let model = write_model("mc", 0.25, 0.1, 0.03);
    let args = [
        "price",
        "--config",
        model.to_str().unwrap(),
        "--instrument",
        "bond",
        "--method",
        "mc",
        "--maturity",
        "2",
        "--paths",
        "20000",
        "--seed",
        "42",
    ];
    let a = bk(&args);
    let b = bk(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["instrument"], "bond");
    assert!(v["price"].as_f64().unwrap() > 0.0);
    assert!(v["diagnostics"]["stderr"].as_f64().unwrap() > 0.0);
    fs::remove_file(model).ok();
}

#[test]
fn price_swaption_reports_boundary_diagnostics() {
    let model = write_model("sw", 0.25, 0.1, 0.03);
    let out = bk(&[
        "price",
        "--config",
        model.to_str().unwrap(),
        "--instrument",
        "swaption",
        "--expiry",
        "5",
        "--tenor",
        "5",
        "--moneyness",
        "1.0",
        "--side",
        "payer",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["implied_vol"].as_f64().unwrap() > 0.10);
    assert!(v["diagnostics"]["boundary"]["z0"].is_number());
    assert_eq!(v["diagnostics"]["node_values"].as_array().unwrap().len(), 5);
    fs::remove_file(model).ok();
}

#[test]
fn price_rejects_bad_specs_with_field_names() {
    let model = write_model("bad", 0.25, 0.1, 0.03);
    let out = bk(&[
        "price",
        "--config",
        model.to_str().unwrap(),
        "--instrument",
        "bond",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--maturity"));
    let out = bk(&[
        "price",
        "--config",
        model.to_str().unwrap(),
        "--instrument",
        "swaption",
        "--expiry",
        "5",
        "--tenor",
        "5",
        "--side",
        "payer",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--strike"));
    // swaption Monte Carlo is deliberately absent
    let out = bk(&[
        "price",
        "--config",
        model.to_str().unwrap(),
        "--instrument",
        "swaption",
        "--method",
        "mc",
        "--expiry",
        "5",
        "--tenor",
        "5",
        "--strike",
        "0.03",
        "--side",
        "payer",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lattice"));
    fs::remove_file(model).ok();
}

#[test]
fn bad_model_config_is_rejected_with_path_context() {
    let path = std::env::temp_dir().join(format!("bk-test-broken-{}.json", std::process::id()));
    fs::write(
        &path,
        r#"{"sigma":-1,"b":0.1,"r0":0.03,"a":[{"t":0.0,"level":0.0}]}"#,
    )
    .unwrap();
    let out = bk(&[
        "price",
        "--config",
        path.to_str().unwrap(),
        "--instrument",
        "bond",
        "--maturity",
        "1",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("sigma") && err.contains("bk-test-broken"),
        "{err}"
    );
    fs::remove_file(path).ok();
}

#[test]
fn calibrate_round_trips_via_files() {
    let model = write_model("cal", 0.30, 0.2, 0.03);
    let quotes = std::env::temp_dir().join(format!("bk-test-quotes-{}.json", std::process::id()));
    // bond-only calibration: drift bootstrap must hit the curve exactly
    fs::write(
        &quotes,
        r#"{"bonds":[{"maturity":1.0,"ytm":0.028},{"maturity":5.0,"ytm":0.032}]}"#,
    )
    .unwrap();
    let out_path = std::env::temp_dir().join(format!("bk-test-cal-{}.json", std::process::id()));
    let out = bk(&[
        "calibrate",
        "--config",
        model.to_str().unwrap(),
        "--quotes",
        quotes.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["converged"], true);
    assert_eq!(v["drift"].as_array().unwrap().len(), 2);
    for r in v["residuals"].as_array().unwrap() {
        assert!(r.as_f64().unwrap().abs() < 1e-8);
    }
    for p in [model, quotes, out_path] {
        fs::remove_file(p).ok();
    }
}
