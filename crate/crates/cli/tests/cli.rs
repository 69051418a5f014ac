use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nanolin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanolin"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("NANOLIN_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn summary(o: &Output, key: &str) -> f64 {
    let prefix = format!("{key}=");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in {}", stdout(o)))
        .parse()
        .unwrap()
}

/// Data rows of a CSV file, skipping `#` provenance lines.
fn table(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn paper_values_budget_reproduces_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = nanolin(dir.path(), &["budget", "--paper-values"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("budget.csv");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# nanolin "));
    assert!(text.contains("# units: "));
    assert!(text.contains("# config: {"));
    assert!(text.contains("channel,rate_per_s,lambda_min_per_s"));
    let rows = table(&csv);
    let expected = [
        ("thermal", 1.2e-17),
        ("optomechanical", 3.5e-13),
        ("absorption", 2.6e-17),
        ("probe_photons", 2.6e-15),
        ("dark_counts", 6.7e-13),
        ("all_noise", 1.0e-12),
    ];
    assert_eq!(rows.len(), expected.len());
    for (row, (name, lambda)) in rows.iter().zip(expected) {
        assert_eq!(row[0], name);
        let v: f64 = row[2].parse().unwrap();
        assert!((v / lambda - 1.0).abs() < 0.1, "{name}: {v}");
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("budget.json")).unwrap()).unwrap();
    assert_eq!(json["result"]["paper_values"], true);
    assert!(json["config"]["system"]["omega"].as_f64().unwrap() == 5.3e9);
}

#[test]
fn simulate_eta_om_prints_summary_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = nanolin(dir.path(), &["simulate", "--scenario", "eta-om"]);
    assert!(o.status.success());
    let eta = summary(&o, "eta_om");
    assert!((eta - 0.32).abs() <= 0.03);
    let rows = table(&dir.path().join("simulate_eta_om.csv"));
    assert!(rows.len() > 10);
    let text = fs::read_to_string(dir.path().join("simulate_eta_om.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("t_s,")));
}

#[test]
fn sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = nanolin(dir.path(), &["sweep", "--param", "g0_over_kappa_p", "--grid", "0.1:4:40"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = table(&dir.path().join("sweep_g0_over_kappa_p_eta_om.csv"));
    assert_eq!(rows.len(), 40);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.1);
    assert_eq!(rows[39][0].parse::<f64>().unwrap(), 4.0);
    let eta: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(eta.iter().all(|&e| (0.0..1.0).contains(&e)));
    assert!(eta[0] < eta[10]);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for args in [
        &["budget", "--paper-values"][..],
        &["sweep", "--param", "kappa_s_ex_over_kappa_p", "--grid", "0.5:4:4"],
        &["heatmap"],
        &["exclude", "--paper-values", "--rc-grid", "1e-9:1e-5:9"],
    ] {
        assert!(nanolin(a.path(), args).status.success());
        assert!(nanolin(b.path(), args).status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn invalid_config_reports_field_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"system": {"kappa_p_ex": -1}}"#).unwrap();
    let o = nanolin(dir.path(), &["--config", cfg.to_str().unwrap(), "budget"]);
    assert!(!o.status.success());
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid_parameter");
    assert!(err["error"]["field"].as_str().unwrap().contains("kappa_p_ex"));
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.json");
    fs::write(&cfg, "{\n  \"eta_p\": 0.01,\n  \"temperature\": ,\n}").unwrap();
    let o = nanolin(dir.path(), &["--config", cfg.to_str().unwrap(), "quadratic"]);
    assert!(!o.status.success());
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = nanolin(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn empty_config_matches_defaults_and_overrides_propagate() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    let base = nanolin(dir.path(), &["--config", empty.to_str().unwrap(), "quadratic"]);
    let plain = nanolin(dir.path(), &["quadratic"]);
    assert_eq!(stdout(&base), stdout(&plain));
    let threshold = summary(&base, "threshold_printed_hz");
    assert!((threshold / 28.0 - 1.0).abs() < 0.05);

    let rc = dir.path().join("rc.json");
    fs::write(&rc, r#"{"collapse": {"r_c": 1e-8}}"#).unwrap();
    let small = nanolin(dir.path(), &["--config", rc.to_str().unwrap(), "quadratic"]);
    assert!(summary(&small, "g_max_hz") < summary(&base, "g_max_hz"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_nanolin"))
        .args(["dp", "--paper-values"])
        .env("NANOLIN_OUT", &target)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(target.join("dp.json").exists());
    assert!(summary(&o, "r_dp_m") > 0.0);
}
