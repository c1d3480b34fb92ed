use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ptframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptframe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = ptframe(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Header and rows of a CSV file.
fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|x| x.parse::<f64>().unwrap())
                .collect()
        })
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let j = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[j]).collect()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn figure_one_marks_the_ep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.csv");
    ok(&["figure", "1", "--out", out.to_str().unwrap()]);
    let (header, rows) = read_csv(&out);
    assert_eq!(header[0], "gamma_e");
    assert_eq!(rows.len(), 401);
    assert_eq!(header.len(), 1 + 2 * 2 * 2);

    let meta = json_file(&dir.path().join("fig1.csv.meta.json"));
    let eps = meta["eps"].as_array().unwrap();
    assert_eq!(eps.len(), 1);
    assert!((eps[0]["location"].as_f64().unwrap() - 2.0).abs() <= 1e-6);
    assert_eq!(eps[0]["frames"], serde_json::json!(["if", "ef"]));
    assert_eq!(meta["columns"].as_array().unwrap().len(), header.len());
}

#[test]
fn figure_two_branches_at_zero_gain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    ok(&["figure", "2", "--out", out.to_str().unwrap()]);
    let (header, rows) = read_csv(&out);
    let first = &rows[0..1];
    let labels = ["E1", "E2", "E3", "E4"];
    let ef: Vec<f64> = labels
        .iter()
        .map(|l| column(&header, first, &format!("ef_{l}_re"))[0])
        .collect();
    for (x, want) in sorted(ef).iter().zip([-2.0, -1.0, 1.0, 2.0]) {
        assert!((x - want).abs() < 1e-12, "{x}");
    }
    let im: Vec<f64> = labels
        .iter()
        .map(|l| column(&header, first, &format!("if_{l}_im"))[0])
        .collect();
    for (x, want) in sorted(im).iter().zip([-0.6, -0.6, -0.3, -0.3]) {
        assert!((x - want).abs() < 1e-12, "{x}");
    }

    // columns sorted by real part at the start of the range
    let ef_cols: Vec<&String> = header
        .iter()
        .filter(|h| h.starts_with("ef_") && h.ends_with("_re"))
        .collect();
    let starts: Vec<f64> = ef_cols
        .iter()
        .map(|h| column(&header, first, h)[0])
        .collect();
    assert_eq!(starts, sorted(starts.clone()));

    let meta = json_file(&dir.path().join("fig2.csv.meta.json"));
    let defaults = meta["defaults"].as_array().unwrap();
    assert_eq!(defaults.len(), 1);
    assert_eq!(defaults[0]["name"], "gamma");
    assert_eq!(defaults[0]["value"], 0.3);
}

#[test]
fn figure_defaults_can_be_overridden() {
    let out = ok(&[
        "figure", "2", "--gamma", "0.5", "--range", "0:2:21", "--format", "json",
    ]);
    let v = stdout_json(&out);
    assert!(v["meta"]["defaults"].as_array().unwrap().is_empty());
    assert_eq!(v["grid"].as_array().unwrap().len(), 21);
    let ims: Vec<f64> = v["branches"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|b| b["frame"] == "if")
        .map(|b| b["im"][0].as_f64().unwrap())
        .collect();
    assert!(ims.iter().any(|x| (x + 1.0).abs() < 1e-12));
}

#[test]
fn csv_round_trips_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let csv_out = dir.path().join("s.csv");
    let json_out = dir.path().join("s.json");
    let common = [
        "sweep", "--model", "h2", "--g", "1", "--kappa", "0", "--gamma", "0.3", "--n-max", "4",
        "--param", "kappa", "--range", "0:1.7:18",
    ];
    let mut a = common.to_vec();
    a.extend(["--out", csv_out.to_str().unwrap()]);
    ok(&a);
    let mut b = common.to_vec();
    b.extend(["--format", "json", "--out", json_out.to_str().unwrap()]);
    ok(&b);

    let (header, rows) = read_csv(&csv_out);
    let v = json_file(&json_out);
    let grid: Vec<f64> = v["grid"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(column(&header, &rows, "kappa"), grid);
    for br in v["branches"].as_array().unwrap() {
        let name = format!(
            "{}_{}",
            br["frame"].as_str().unwrap(),
            br["label"].as_str().unwrap()
        );
        for part in ["re", "im"] {
            let from_json: Vec<u64> = br[part]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap().to_bits())
                .collect();
            let from_csv: Vec<u64> = column(&header, &rows, &format!("{name}_{part}"))
                .iter()
                .map(|x| x.to_bits())
                .collect();
            assert_eq!(from_csv, from_json, "{name}_{part}");
        }
    }
}

#[test]
fn coupled_mode_sweep_json() {
    let out = ok(&[
        "sweep",
        "--model",
        "h2",
        "--g",
        "1",
        "--gamma-a",
        "0.3",
        "--gamma-b",
        "0.3",
        "--n-max",
        "4",
        "--param",
        "kappa",
        "--range",
        "0:2:401",
        "--format",
        "json",
    ]);
    let v = stdout_json(&out);
    let branches = v["branches"].as_array().unwrap();
    for frame in ["if", "ef"] {
        assert_eq!(branches.iter().filter(|b| b["frame"] == frame).count(), 4);
    }
    let eps = v["meta"]["eps"].as_array().unwrap();
    assert_eq!(eps.len(), 1);
    assert!((eps[0]["location"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    let reports = eps[0]["reports"].as_array().unwrap();
    let sizes: Vec<(String, u64)> = reports
        .iter()
        .map(|r| {
            (
                r["frame"].as_str().unwrap().to_string(),
                r["order_estimate"].as_u64().unwrap(),
            )
        })
        .collect();
    assert!(sizes.contains(&("ef".into(), 4)));
    assert_eq!(
        sizes.iter().filter(|(f, n)| f == "if" && *n == 2).count(),
        2
    );
}

#[test]
fn ep_find_lists_only_eps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eps.csv");
    ok(&[
        "ep-find",
        "--model",
        "h1",
        "--omega",
        "1",
        "--param",
        "gamma_e",
        "--range",
        "0:4:81",
        "--frame",
        "if",
        "--out",
        out.to_str().unwrap(),
    ]);
    let mut r = csv::Reader::from_path(&out).unwrap();
    let recs: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(recs.len(), 1);
    assert!((recs[0][0].parse::<f64>().unwrap() - 2.0).abs() <= 1e-6);
    assert_eq!(&recs[0][1], "if");
    assert!(dir.path().join("eps.csv.meta.json").exists());
}

#[test]
fn reversed_range_is_a_config_error() {
    let out = ptframe(&[
        "sweep", "--model", "h1", "--omega", "1", "--param", "gamma_e", "--range", "4:0:11",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_two() {
    // missing cutoff
    let out = ptframe(&[
        "check", "--model", "h2", "--g", "1", "--kappa", "0.5", "--gamma", "0.6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // unknown parameter
    let out = ptframe(&[
        "sweep",
        "--model",
        "h1",
        "--omega",
        "1",
        "--gamma-e",
        "0",
        "--param",
        "g",
        "--range",
        "0:1:3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // bad flag value
    let out = ptframe(&["sweep", "--model", "h9"]);
    assert_eq!(out.status.code(), Some(2));
    // invalid model parameter
    let out = ptframe(&["check", "--model", "h1", "--omega", "-1", "--gamma-e", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn crossing_the_singularity_exits_three() {
    let out = ptframe(&[
        "sweep",
        "--model",
        "h3",
        "--g",
        "1",
        "--gamma",
        "0.1",
        "--epsilon",
        "0.1",
        "--n-max",
        "6",
        "--param",
        "kappa",
        "--range",
        "0.5:1.5:5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("spectral singularity"), "{err}");
    assert!(err.contains("kappa"), "{err}");
}

#[test]
fn check_certifies_the_model_splits() {
    let v = stdout_json(&ok(&[
        "check", "--model", "h2", "--g", "1", "--kappa", "0.5", "--gamma", "0.6", "--n-max", "4",
    ]));
    assert_eq!(v["hidden_pt_certified"], true);
    for key in ["sum", "commutator", "pt"] {
        assert!(v["decomposition"][key].as_f64().unwrap() <= 1e-10, "{key}");
    }
    assert_eq!(v["ef_drift"].as_array().unwrap().len(), 3);
    assert!(v["evolution_gap"].as_f64().unwrap() <= 1e-8);
    assert!(v["eigenvalue_sum"]["max_gap"].as_f64().unwrap() <= 1e-8);

    let v = stdout_json(&ok(&[
        "check",
        "--model",
        "h1",
        "--omega",
        "1",
        "--gamma-e",
        "1",
    ]));
    assert_eq!(v["hidden_pt_certified"], true);
}

#[test]
fn check_on_driven_model_uses_interior() {
    let v = stdout_json(&ok(&[
        "check",
        "--model",
        "h3",
        "--g",
        "1",
        "--kappa",
        "0.6",
        "--gamma",
        "0.1",
        "--epsilon",
        "0.1",
        "--n-max",
        "16",
    ]));
    assert_eq!(v["hidden_pt_certified"], true, "{v:#}");
    assert!(v["eigenvalue_sum"]["pairs"].as_u64().unwrap() > 0);
}

#[test]
fn check_at_ep_skips_sum_relation() {
    let v = stdout_json(&ok(&[
        "check",
        "--model",
        "h1",
        "--omega",
        "1",
        "--gamma-e",
        "2",
    ]));
    assert!(v["eigenvalue_sum"]["max_gap"].is_null());
    assert!(!v["notes"].as_array().unwrap().is_empty());
}

#[test]
fn wrong_split_is_not_certified() {
    let v = stdout_json(&ok(&[
        "check", "--model", "h2", "--g", "1", "--kappa", "0.5", "--gamma", "0.6", "--n-max", "4",
        "--h0", "mode-a",
    ]));
    assert_eq!(v["hidden_pt_certified"], false);
    let comm = v["decomposition"]["commutator"].as_f64().unwrap();
    assert!(comm > 1e-2, "{comm}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"model": "h2", "g": 1.0, "kappa": 0.5, "gamma": 0.6, "n-max": 4, "param": "kappa",
            "range": [0.0, 2.0, 11], "format": "json", "frame": "ef"}"#,
    )
    .unwrap();
    let v = stdout_json(&ok(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--range",
        "0:2:5",
    ]));
    assert_eq!(v["grid"].as_array().unwrap().len(), 5);
    assert_eq!(v["meta"]["frames"], serde_json::json!(["ef"]));

    std::fs::write(&cfg, r#"{"model": "h1", "colour": "red"}"#).unwrap();
    let out = ptframe(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = ptframe(&[
        "check",
        "--config",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_ptframe"))
        .args(["check", "--model", "h1", "--omega", "1", "--gamma-e", "1"])
        .env("PTFRAME_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_ptframe"))
        .args(["check", "--model", "h1", "--omega", "1", "--gamma-e", "1"])
        .env("PTFRAME_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}
