use super::*;

fn params(r: f64, b: f64) -> AnnulusParams {
    AnnulusParams::new(r, b).unwrap()
}

#[test]
fn unknown_suite_is_rejected() {
    let err = run_suite("gramm", &params(4.0, 3.0), &SuiteOptions::default()).unwrap_err();
    assert_eq!(err, Error::UnknownSuite("gramm".into()));
}

#[test]
fn integer_only_suites_reject_fractional_b() {
    let p = params(4.0, 2.5);
    for suite in INTEGER_B_SUITES {
        assert!(matches!(run_suite(suite, &p, &SuiteOptions::default()), Err(Error::UnsupportedPath(_))));
    }
}

#[test]
fn inadmissible_level_is_rejected() {
    let options = SuiteOptions { level: Some(3), ..SuiteOptions::default() };
    assert!(matches!(run_suite("geometry", &params(4.0, 3.0), &options), Err(Error::InadmissibleLevel { .. })));
}

#[test]
fn samples_stay_inside_the_band() {
    let p = params(4.0, 3.0);
    let pts = sample_points(&p, 5, 200).unwrap();
    for z in &pts {
        let zeta = crate::geometry::zeta_coordinate(z, &p);
        assert!(zeta > 0.15 * PI - 1e-12 && zeta < 0.85 * PI + 1e-12);
    }
    assert_eq!(sample_points(&p, 5, 3).unwrap(), pts[..3].to_vec());
    assert_ne!(sample_points(&p, 6, 3).unwrap(), pts[..3].to_vec());
}

#[test]
fn report_schema_and_pass_flag() {
    let report = run_suite("geometry", &params(4.0, 3.0), &SuiteOptions::default()).unwrap();
    assert!(report.pass, "{report:?}");
    let json = serde_json::to_value(&report).unwrap();
    for key in ["suite", "params", "residuals", "pass", "runtime_s"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    for key in ["R", "B", "m", "window", "seed"] {
        assert!(json["params"].get(key).is_some(), "missing params.{key}");
    }
    assert_eq!(json["params"]["seed"], DEFAULT_SEED);
    assert!(json.get("skipped").is_none());
    let r = &json["residuals"][0];
    assert!(r["name"].is_string() && r["value"].is_number() && r["tolerance"].is_number());
}

#[test]
fn nan_residual_fails() {
    let r = Residual { name: "x".into(), value: f64::NAN, tolerance: 1.0 };
    assert!(!r.passes());
    let mut c = Collector::default();
    c.max("y", 1.0, [0.5, f64::NAN, 0.1]);
    assert!(c.residuals[0].value.is_nan());
}

#[test]
fn reports_are_deterministic() {
    let p = params(4.0, 2.0);
    let options = SuiteOptions { level: Some(0), ..SuiteOptions::default() };
    let a = run_suite("multipath", &p, &options).unwrap();
    let b = run_suite("multipath", &p, &SuiteOptions { mode: Mode::Sequential, ..options }).unwrap();
    assert_eq!(a.residuals, b.residuals);
    assert!(a.pass, "{:?}", a.failures().collect::<Vec<_>>());
}
