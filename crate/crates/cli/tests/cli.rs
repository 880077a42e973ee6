use std::path::Path;
use std::process::{Command, Output};

fn qic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qic")).args(args).env_remove("RUST_BACKTRACE").output().unwrap()
}

fn capacities(report: &str) -> Vec<(String, f64)> {
    let doc: toml::Table = report.parse().unwrap();
    doc["capacity"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["subset"].as_str().unwrap().to_string(), e["value"].as_float().unwrap()))
        .collect()
}

fn matches(values: &[(String, f64)], reference: &[f64]) -> bool {
    values.iter().zip(reference).all(|((_, c), &want)| {
        if want == 0.0 {
            *c <= 1e-8
        } else {
            (c - want).abs() <= 5e-3 * want
        }
    })
}

const ROW_3D: [f64; 7] = [0.0, 3.39083e-5, 0.0, 3.45126e-5, 3.73605e-5, 0.0, 3.79689e-5];
const ROW_2D: [f64; 7] = [0.00167331, 0.00872886, 0.0, 0.0102214, 0.0140338, 0.00167926, 0.0154962];

#[test]
fn capacity_report_reproduces_table() {
    let out = qic(&["capacity", "--dim", "3", "--preset", "table1"]);
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    let values = capacities(&report);
    let labels: Vec<&str> = values.iter().map(|(l, _)| l.as_str()).collect();
    assert_eq!(labels, ["B1", "B2", "B3", "B1B2", "B2B3", "B1B3", "B1B2B3"]);
    assert!(matches(&values, &ROW_3D), "{values:?}");
    assert!(report.contains("q_star = ") && report.contains("log_base = \"2\""));
    // 17 significant digits
    let mantissas: Vec<&str> =
        report.lines().filter_map(|l| l.strip_prefix("value = ")).map(|v| v.split('e').next().unwrap()).collect();
    assert!(mantissas.iter().all(|m| m.trim_start_matches('-').len() == 18), "{mantissas:?}");
}

#[test]
fn exactly_one_log_base_matches() {
    let run = |base: &str| {
        let out = qic(&["capacity", "--dim", "2", "--preset", "table1", "--log-base", base]);
        assert!(out.status.success());
        matches(&capacities(&String::from_utf8(out.stdout).unwrap()), &ROW_2D)
    };
    assert!(run("2"));
    assert!(!run("e"));
}

#[test]
fn invalid_preset_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.toml");
    let out = qic(&["capacity", "--dim", "3", "--preset", "table7", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn zero_size_grid_is_a_usage_error() {
    let out = qic(&["evolve", "--dim", "2", "--preset", "single", "--t", "1", "--grid", "1:0:0.1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

fn data_rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let header = csv.lines().find(|l| l.starts_with("# t,")).unwrap();
    let columns = header.trim_start_matches("# ").split(',').map(String::from).collect();
    let rows = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (columns, rows)
}

#[test]
fn shockwave_has_twelve_weighting_columns() {
    let out = qic(&["evolve", "--dim", "2", "--preset", "shockwave", "--t", "8", "--grid", "0:16:2,-1:1:1"]);
    assert!(out.status.success());
    let (columns, rows) = data_rows(&String::from_utf8(out.stdout.clone()).unwrap());
    assert_eq!(columns.len(), 3 + 12);
    assert_eq!(columns[3..7], ["F1_1", "F2_1", "G1_1", "G2_1"]);
    assert_eq!(rows.len(), 9 * 3);
    assert!(rows.iter().all(|r| r.len() == 15 && r.iter().all(|v| v.is_finite())));
    let alias = qic(&["shockwave", "--dim", "2", "--t", "8", "--grid", "0:16:2,-1:1:1"]);
    assert_eq!(alias.stdout, out.stdout);
}

#[test]
fn single_capsule_ridge_at_radius_four() {
    let out = qic(&["evolve", "--dim", "3", "--preset", "single", "--t", "4", "--grid", "0:6:0.05,0,0"]);
    assert!(out.status.success());
    let (columns, rows) = data_rows(&String::from_utf8(out.stdout).unwrap());
    let f2 = columns.iter().position(|c| c == "F2_1").unwrap();
    let peak = rows.iter().max_by(|a, b| a[f2].abs().total_cmp(&b[f2].abs())).unwrap();
    assert!((peak[1] - 4.0).abs() <= 0.4, "ridge at {}", peak[1]);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let path = dir.path().join(name);
        let args = ["evolve", "--dim", "2", "--preset", "shockwave", "--grid", "0:16:1,0:2:1", "--threads", threads];
        let out = qic(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("3", "b.csv"));
}

#[test]
fn validate_filter_runs_only_huygens() {
    let out = qic(&["validate", "--only", "huygens"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("[PASS] huygens"));
    assert_eq!(qic(&["validate", "--only", "nonsense"]).status.code(), Some(2));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_files_are_validated_and_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "dimension = 3\npreset = \"table1\"\ncolour = \"blue\"\n");
    let out = qic(&["capacity", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let inline = r#"
dimension = 3
log_base = "e"
[sender]
smearing = { kind = "hard_shell", r_outer = 1.0 }
center = [0.0, 0.0, 0.0]
time = 0.0
[[receivers]]
smearing = { kind = "hard_shell", r_inner = 1.1, r_outer = 2.9 }
center = [0.0, 0.0, 0.0]
time = 2.0
coupling = 0.2
"#;
    let cfg = write(dir.path(), "inline.toml", inline);
    let nats = qic(&["capacity", "--config", &cfg]);
    assert!(nats.status.success(), "{}", String::from_utf8_lossy(&nats.stderr));
    let nats = capacities(&String::from_utf8(nats.stdout).unwrap());
    assert_eq!(nats.len(), 1);
    let bits = qic(&["capacity", "--config", &cfg, "--log-base", "2"]);
    let bits = capacities(&String::from_utf8(bits.stdout).unwrap());
    assert!((nats[0].1 / bits[0].1 - std::f64::consts::LN_2).abs() < 1e-12);
    assert!((bits[0].1 - ROW_3D[1]).abs() <= 5e-3 * ROW_3D[1]);
}
