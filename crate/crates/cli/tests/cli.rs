use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annulus-rk")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn complex_arg(re: f64, im: f64) -> String {
    format!("{re:e}{im:+e}i")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn info_lists_levels_and_eigenvalues() {
    let out = run(&["info", "--R", "4", "--B", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let levels: Vec<(u64, f64)> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| (l["m"].as_u64().unwrap(), l["lambda"].as_f64().unwrap()))
        .collect();
    assert_eq!(levels, vec![(0, 0.0), (1, -4.0), (2, -6.0)]);
    assert_eq!(v["integer_b"], Value::Bool(true));

    let out = run(&["info", "--R", "4", "--B", "1", "--format", "json"]);
    assert_eq!(stdout_json(&out)["levels"].as_array().unwrap().len(), 1);

    let text = String::from_utf8(run(&["info", "--R", "6", "--B", "2.75"]).stdout).unwrap();
    assert!(text.contains("unavailable"), "{text}");
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(code(&run(&["info", "--R", "0.5", "--B", "1"])), 2);
    assert_eq!(code(&run(&["info", "--B", "1"])), 2);
    assert_eq!(code(&run(&["eval", "--R", "4", "--B", "3", "--m", "3", "--z", "2", "--w", "2"])), 2);
    // z on the inner circle.
    let out = run(&["eval", "--R", "4", "--B", "3", "--z", "1", "--w", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the annulus"));
    assert_eq!(code(&run(&["eval", "--R", "4", "--B", "3", "--z", "2+", "--w", "2"])), 2);
}

#[test]
fn eval_paths_agree_and_echo_seed() {
    let out = run(&[
        "eval",
        "--R",
        "4",
        "--B",
        "2",
        "--z",
        "1.5+0.7i",
        "--w",
        "-1.2-1.1i",
        "--seed",
        "77",
        "--path",
        "closed",
        "--path",
        "oracle",
        "--path",
        "theta",
        "--path",
        "product",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["seed"].as_u64(), Some(77));
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 4);
    let value = |i: usize| {
        let a = results[i]["value"].as_array().unwrap();
        (a[0].as_f64().unwrap(), a[1].as_f64().unwrap())
    };
    let (re0, im0) = value(0);
    let scale = re0.hypot(im0);
    for (i, result) in results.iter().enumerate().skip(1) {
        let (re, im) = value(i);
        assert!((re - re0).hypot(im - im0) < 1e-9 * scale, "path {}", result["path"]);
    }
}

#[test]
fn unsupported_path_exits_4() {
    let out = run(&["eval", "--R", "4", "--B", "2.5", "--z", "1.5", "--w", "2", "--path", "theta"]);
    assert_eq!(code(&out), 4);
    let out = run(&["verify", "inversion", "--R", "4", "--B", "2.5"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("integer B"));
}

#[test]
fn convergence_failure_exits_3() {
    // Summed term by term, |z w| / R^2 close to 1 needs far more than 16 terms.
    let out =
        run(&["eval", "--R", "4", "--B", "3", "--z", "3.9", "--w", "3.9", "--max-terms", "16", "--path", "product"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn grid_shape_and_consistency_with_eval() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = run(&[
        "grid",
        "--R",
        "4",
        "--B",
        "3",
        "--w",
        "2+0.5i",
        "--n-r",
        "2",
        "--n-theta",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("re_z,im_z,re_K,im_K,abs_K"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert_eq!(row.len(), 5);
        assert!(rel(row[4], row[2].hypot(row[3])) < 1e-15);
    }
    // Radial-major: the first n_theta rows share a modulus.
    let modulus = |r: &Vec<f64>| r[0].hypot(r[1]);
    assert!(rows[..4].iter().all(|r| rel(modulus(r), modulus(&rows[0])) < 1e-14));
    assert!(modulus(&rows[4]) > modulus(&rows[0]));

    for row in [&rows[1], &rows[6]] {
        let z = complex_arg(row[0], row[1]);
        let out = run(&["eval", "--R", "4", "--B", "3", "--z", &z, "--w", "2+0.5i"]);
        let v = stdout_json(&out);
        let k = v["results"][0]["value"].as_array().unwrap();
        let (re, im) = (k[0].as_f64().unwrap(), k[1].as_f64().unwrap());
        assert!((re - row[2]).hypot(im - row[3]) < 1e-13 * row[4], "{z}");
    }
}

#[test]
fn grid_json_and_worker_independence() {
    let args = ["grid", "--R", "6", "--B", "2.75", "--m", "2", "--w", "2.2-0.3i", "--n-r", "3", "--n-theta", "5"];
    let one = run(&[&args[..], &["--workers", "1"]].concat());
    let four = run(&[&args[..], &["--workers", "4"]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);

    let out = run(&[&args[..], &["--format", "json"]].concat());
    let v = stdout_json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 15);
    assert!(v["seed"].is_u64());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"R": 4.0, "B": 1.0, "format": "json", "seed": 5}"#).unwrap();
    let out = run(&["info", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["B"].as_f64(), Some(1.0));
    assert_eq!(v["seed"].as_u64(), Some(5));

    let out = run(&["info", "--config", cfg.to_str().unwrap(), "--B", "3", "--seed", "9"]);
    let v = stdout_json(&out);
    assert_eq!(v["levels"].as_array().unwrap().len(), 3);
    assert_eq!(v["seed"].as_u64(), Some(9));

    fs::write(&cfg, r#"{"R": 4.0, "bogus": 1}"#).unwrap();
    assert_eq!(code(&run(&["info", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["info", "--config", "/nonexistent/run.json"])), 2);
}

#[test]
fn verify_reports_schema_and_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["verify", "geometry", "--R", "4", "--B", "3", "--seed", "11", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["suite"], "geometry");
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["params"]["seed"].as_u64(), Some(11));
    assert_eq!(v["params"]["R"].as_f64(), Some(4.0));
    assert!(v["runtime_s"].is_f64());
    for r in v["residuals"].as_array().unwrap() {
        assert!(r["name"].is_string() && r["value"].is_f64() && r["tolerance"].is_f64());
    }

    let out = run(&["verify", "gram", "--R", "4", "--B", "3", "--m", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["params"]["m"].as_u64(), Some(1));
}

#[test]
fn verify_failure_exits_1() {
    // Eight angles cannot resolve the Fourier modes of the kernel.
    let out = run(&["verify", "reproducing", "--R", "4", "--B", "3", "--m", "0", "--n-ang", "8"]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["pass"], Value::Bool(false));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = run(&["verify", "bogus", "--R", "4", "--B", "3"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("possible values"));
}

#[test]
fn verify_is_deterministic_across_workers() {
    let strip = |out: &Output| {
        let mut v = stdout_json(out);
        v.as_object_mut().unwrap().remove("runtime_s");
        v
    };
    let args = ["verify", "multipath", "--R", "4", "--B", "2", "--seed", "3"];
    let a = run(&[&args[..], &["--workers", "1"]].concat());
    let b = run(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn verify_all_passes_at_the_reference_parameters() {
    let out = run(&["verify", "all", "--R", "4", "--B", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!(v.get("skipped").is_none());
}
