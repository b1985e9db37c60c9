use std::fs;
use std::process::{Command, Output};

use genpair_core::bethe::SolverOptions;
use genpair_core::model::builtin;
use genpair_core::oracle::diagonalize_sector;

fn genpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genpair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn fig1_cross_matches_golden() {
    let out = genpair(&[
        "solve", "--config", "fig1", "--pairs", "0..3", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), include_str!("golden/fig1_cross.csv"));
}

#[test]
fn table1_matches_golden() {
    let out = genpair(&["tables", "--which", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), include_str!("golden/table1.csv"));
}

#[test]
fn table1a_lowest_column_follows_oracle() {
    let out = genpair(&[
        "solve", "--config", "table1a", "--pairs", "0..6", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let model = builtin::get("table1a").unwrap();
    for n in 0..=6usize {
        let lowest = rows
            .iter()
            .filter(|r| r[1] == n.to_string())
            .map(|r| r[2].parse::<f64>().unwrap())
            .fold(0.0, f64::max);
        let exact = diagonalize_sector(&model, n).unwrap().h_max().max(0.0);
        assert!((lowest - exact).abs() < 1e-8, "N={n}: {lowest} vs {exact}");
    }
}

#[test]
fn empty_range_prints_one_zero_line() {
    for case in ["fig1", "table2-shell5"] {
        let out = genpair(&[
            "solve", "--config", case, "--pairs", "0..0", "--format", "csv",
        ]);
        let rows = csv_rows(&stdout(&out));
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0][2], "0");
        assert_eq!(rows[0][4], "1");
    }
}

#[test]
fn json_round_trips_levels() {
    let out = genpair(&[
        "solve", "--config", "table1c", "--pairs", "3", "--mode", "oracle", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let hs: Vec<f64> = v[0]["sectors"][0]["lines"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["h"].as_f64().unwrap())
        .collect();
    let exact = diagonalize_sector(&builtin::get("table1c").unwrap(), 3).unwrap();
    for (h, e) in hs.iter().zip(exact.nonzero_levels()) {
        assert_eq!(h.to_bits(), e.to_bits());
    }
}

#[test]
fn outputs_are_deterministic() {
    for format in ["csv", "json"] {
        let args = [
            "solve",
            "--config",
            "table1d",
            "--strategy",
            "random",
            "--seed",
            "11",
            "--format",
            format,
        ];
        let a = genpair(&args);
        let b = genpair(&args);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn unknown_table_is_a_usage_error() {
    let out = genpair(&["tables", "--which", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn table2_compares_every_entry() {
    let out = genpair(&["tables", "--which", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&out)).len(), 12 + 17);
}

#[test]
fn algebra_checks() {
    for case in ["fig1", "table2-shell6"] {
        let out = genpair(&["check-algebra", "--config", case, "--m-range", "-2..2"]);
        assert_eq!(out.status.code(), Some(0), "{case}");
        assert!(stdout(&out).ends_with("pass\n"));
    }
}

#[test]
fn algebra_cap_exceeded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("huge.json");
    fs::write(
        &path,
        r#"{"shells":[{"label":"a","omega":30,"c_squared":0.3},{"label":"b","omega":30,"c_squared":0.7}]}"#,
    )
    .unwrap();
    let out = genpair(&[
        "check-algebra",
        "--config",
        path.to_str().unwrap(),
        "--dim-cap",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds cap"));
}

#[test]
fn config_errors_carry_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        "{\"shells\":[{\"label\":\"a\",\"omega\":2,\"c_squared\":0.25},\n{\"label\":\"b\",\"omgea\":2,\"c_squared\":0.75}]}",
    )
    .unwrap();
    let out = genpair(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("omgea") && err.contains("line 2"), "{err}");

    let out = genpair(&["solve", "--config", "no-such-model"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn file_config_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pair.json");
    fs::write(
        &cfg,
        r#"{"shells":[{"label":"1/2","two_j":1,"c_squared":0.4},{"label":"3/2","two_j":3,"c_squared":0.6}]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("report.csv");
    let out = genpair(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("pair,0,0,0,1,"));
    // N = 3 fills both shells: h = 0.4 + 0.6 * 2
    assert!(text.contains("pair,3,1.6,-1.6,1,"));
}

#[test]
fn coincident_couplings_exit_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("twin.json");
    fs::write(
        &cfg,
        r#"{"shells":[{"label":"a","omega":2,"c_squared":0.25},{"label":"b","omega":2,"c_squared":0.25},{"label":"c","omega":3,"c_squared":0.5}]}"#,
    )
    .unwrap();
    let out = genpair(&["solve", "--config", cfg.to_str().unwrap(), "--pairs", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomplete: N=2"));
}

#[test]
fn missing_zero_mode_exits_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pole.json");
    let cfg_text = format!(
        r#"{{"shells":[{{"label":"a","omega":1,"c_squared":{}}},{{"label":"b","omega":1,"c_squared":{}}},{{"label":"c","omega":2,"c_squared":{}}}]}}"#,
        4.0 / 19.0,
        12.0 / 19.0,
        3.0 / 19.0
    );
    fs::write(&cfg, cfg_text).unwrap();
    let out = genpair(&["solve", "--config", cfg.to_str().unwrap(), "--pairs", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 of 1 zero modes"));
}

#[test]
fn dumped_states_are_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let out = genpair(&[
        "solve",
        "--config",
        "fig1",
        "--pairs",
        "1..3",
        "--format",
        "csv",
        "--dump-states",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let n2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig1_N2.json")).unwrap())
            .unwrap();
    let states = n2.as_array().unwrap();
    // three nonzero levels and two zero modes
    assert_eq!(states.len(), 5);
    for s in states {
        let norm: f64 = s["amplitudes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c[0].as_f64().unwrap().powi(2) + c[1].as_f64().unwrap().powi(2))
            .sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn solver_flags_parse() {
    let out = genpair(&[
        "solve",
        "--config",
        "fig1",
        "--pairs",
        "2..3",
        "--strategy",
        "oracle-seeded",
        "--tolerance",
        "1e-11",
        "--max-starts",
        "200",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(SolverOptions::default().max_starts, 400);
    let out = genpair(&["solve", "--config", "fig1", "--pairs", "3..1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = genpair(&["solve", "--config", "fig1", "--pairs", "0..9"]);
    assert_eq!(out.status.code(), Some(1));
}
