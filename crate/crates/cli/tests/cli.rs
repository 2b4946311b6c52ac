use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qthermo")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Header row plus data rows of a CSV report.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let (header, rows) = table(csv);
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn gamma_demo_matches_golden_file() {
    let conf = golden("gamma_demo.conf");
    let out = stdout(&["gamma", "--config", conf.to_str().unwrap()]);
    let expected = std::fs::read_to_string(golden("gamma_demo.csv")).unwrap();
    assert_eq!(out, expected);
}

#[test]
fn golden_file_agrees_with_high_precision_oracle() {
    let csv = std::fs::read_to_string(golden("gamma_demo.csv")).unwrap();
    let oracle = std::fs::read_to_string(golden("gamma_demo_oracle.txt")).unwrap();
    let rows: Vec<Vec<f64>> = oracle
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    let t = column(&csv, "t");
    let g = column(&csv, "gamma");
    let dt = column(&csv, "dgamma_termwise");
    let dp = column(&csv, "dgamma_paper");
    assert_eq!(rows.len(), t.len());
    for (i, o) in rows.iter().enumerate() {
        assert_eq!(t[i], o[0]);
        for (got, want) in [(g[i], o[1]), (dt[i], o[2]), (dp[i], o[3])] {
            assert!((got - want).abs() <= 1e-12 * want.abs(), "row {i}: {got} vs {want}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["gamma", "--t", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gamma", "--lambda", "-1", "--t", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["opt-n", "--gamma", "0"]).status.code(), Some(2));
    assert_eq!(run(&["search", "--N", "7", "--t", "0.01"]).status.code(), Some(2));
    assert_eq!(run(&["search", "--N", "2", "--t", "0.01", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gamma", "--bogus"]).status.code(), Some(2));
    let strict = run(&["gamma", "--t", "0.01", "--rel-tol", "1e-15", "--n-max", "10", "--strict"]);
    assert_eq!(strict.status.code(), Some(3));
    assert_eq!(run(&["verify", "--inject-fault", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_detects_injected_fault() {
    let ok = run(&["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&["verify", "--inject-fault", "ghz"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("FAIL ghz"));
    assert_eq!(run(&["verify"]).stdout, ok.stdout);
}

#[test]
fn unsqueezed_bath_is_phase_blind() {
    let base = ["gamma", "--r", "0", "--t-start", "0.001", "--t-end", "0.05", "--t-steps", "7"];
    let a = stdout(&[&base[..], &["--dtheta", "0"]].concat());
    let b = stdout(&[&base[..], &["--dtheta", "3.141592653589793"]].concat());
    for c in ["gamma", "dgamma_termwise", "dgamma_paper"] {
        assert_eq!(column(&a, c), column(&b, c));
    }
}

#[test]
fn ghz_with_one_noisy_qubit_matches_single_probe() {
    let grid = ["--t-log", "--t-start", "1e-4", "--t-end", "0.05", "--t-steps", "12"];
    let ghz = stdout(&[&["qfi", "--state", "ghz", "--N", "3", "--n", "1"][..], &grid].concat());
    let single = stdout(&[&["qfi", "--state", "single", "--theta0", "1.5707963267948966"][..], &grid].concat());
    for (a, b) in column(&ghz, "qfi").iter().zip(column(&single, "qfi")) {
        assert!((a - b).abs() <= 1e-12 * b);
    }
    let w = stdout(&[&["qfi", "--state", "w", "--N", "3", "--n", "1"][..], &grid].concat());
    for (a, b) in column(&w, "qfi").iter().zip(column(&ghz, "qfi")) {
        assert!((a / b - 8.0 / 9.0).abs() < 1e-10);
    }
}

#[test]
fn w_parallel_curves_order_like_the_figure() {
    // W curves are ordered by N at every time, and each W peak exceeds the single-probe peak
    let common = ["--lambda", "0.3", "--dtheta", "5", "--r", "0.7", "--t-log", "--t-start", "1e-4", "--t-end", "0.02", "--t-steps", "40"];
    let single = column(&stdout(&[&["qfi", "--state", "single"][..], &common].concat()), "qfi");
    let peak = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max);
    let mut curves = Vec::new();
    for n in 3..=8 {
        let n = n.to_string();
        curves.push(column(&stdout(&[&["qfi", "--state", "w", "--N", n.as_str()][..], &common].concat()), "qfi"));
    }
    for pair in curves.windows(2) {
        assert!(pair[0].iter().zip(&pair[1]).all(|(a, b)| b > a));
    }
    for w in &curves {
        assert!(peak(w) > peak(&single));
    }
}

#[test]
fn csv_and_json_carry_identical_values() {
    let args = ["qfi", "--state", "w", "--N", "4", "--n", "3", "--t-log", "--t-steps", "9", "--normalize"];
    let csv = stdout(&args);
    let json: Value = serde_json::from_str(&stdout(&[&args[..], &["--format", "json"]].concat())).unwrap();
    let (header, rows) = table(&csv);
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), rows.len());
    for (row, rec) in rows.iter().zip(records) {
        for (h, cell) in header.iter().zip(row) {
            match &rec[h.as_str()] {
                Value::Number(n) => assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap()),
                Value::Bool(b) => assert_eq!(b.to_string(), *cell),
                Value::Null => assert!(cell.is_empty()),
                other => panic!("unexpected {other}"),
            }
        }
    }
    assert_eq!(json["meta"]["seed"], 42);
    assert_eq!(json["meta"]["config"]["N"], 4);
    let norm = column(&csv, "qfi_normalized");
    assert!(norm.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(norm.contains(&1.0));
}

#[test]
fn header_echoes_resolved_config() {
    let out = stdout(&["gamma", "--t", "0.01"]);
    assert!(out.starts_with(&format!("# tool: qthermo {}\n", env!("CARGO_PKG_VERSION"))));
    for line in ["# seed: 42", "# config.lambda: 0.4", "# config.t: 0.01", "# config.n-max: 1000"] {
        assert!(out.lines().any(|l| l == line), "missing {line}");
    }
    assert!(!out.contains('\r'));
}

#[test]
fn opt_n_reports() {
    let row = |args: &[&str]| {
        let csv = stdout(args);
        (column(&csv, "n_opt")[0], column(&csv, "n_brute_force")[0])
    };
    assert_eq!(row(&["opt-n", "--gamma", "0.1"]).0, 8.0);
    assert_eq!(row(&["opt-n", "--gamma", "1.0"]).0, 3.0);
    assert_eq!(row(&["opt-n", "--gamma", "0.05"]), (16.0, 16.0));
    // squeezing recipe: the optimum moves between r = 0.2 and r = 2
    let csv = stdout(&["opt-n", "--lambda", "0.1", "--dtheta", "0.4", "--t", "0.004", "--r-values", "0.2,2.0"]);
    let n = column(&csv, "n_brute_force");
    assert_ne!(n[0], n[1]);
}

#[test]
fn search_report_is_deterministic_and_complete() {
    let args = ["search", "--N", "2", "--t", "0.006", "--samples", "2000", "--seed", "42"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    for key in ["best_qfi", "ghz_qfi", "w_qfi", "verdict"] {
        assert!(a.contains(&format!("# result.{key}: ")), "missing {key}");
    }
    assert_eq!(table(&a).1.len(), 4);
}

#[test]
fn sld_and_bound_commands() {
    let csv = stdout(&["sld", "--t-log", "--t-steps", "6"]);
    let f = column(&csv, "qfi");
    for (a, b) in f.iter().zip(column(&csv, "tr_rho_l2")) {
        assert!((a - b).abs() <= 1e-9 * a);
    }
    // the printed single-qubit SLD does not solve the defining equation
    assert!(column(&csv, "printed_sld_defect").iter().any(|&d| d > 1e-6));

    let csv = stdout(&["bound", "--state", "ghz", "--N", "3", "--n", "1", "--t-log", "--t-steps", "6"]);
    for s in column(&csv, "saturation") {
        assert!((s - 1.0).abs() < 1e-9);
    }
    for (a, b) in column(&csv, "bound_closed").iter().zip(column(&csv, "bound_kraus")) {
        assert!((a - b).abs() <= 1e-10 * a);
    }
}

#[test]
fn out_flag_writes_same_bytes() {
    let path = std::env::temp_dir().join(format!("qthermo-out-{}.csv", std::process::id()));
    let printed = stdout(&["gamma", "--t", "0.02"]);
    stdout(&["gamma", "--t", "0.02", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    std::fs::remove_file(path).ok();
}
