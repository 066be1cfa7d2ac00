use std::path::Path;

use dopt_core::cli::commands::{certify_report, run_solve};
use dopt_core::cli::config::ProblemConfig;
use dopt_core::cli::report::RunReport;

fn config(degree: usize, timings: bool) -> ProblemConfig {
    let text = format!(
        r#"{{
            "dimension": 2,
            "degree": {degree},
            "set": {{
                "bounding_box": [[-1, 1], [-0.5, 1.5]],
                "inequalities": [[{{"exponents": [0, 0], "coeff": 1}},
                                  {{"exponents": [2, 0], "coeff": -1}},
                                  {{"exponents": [0, 1], "coeff": -0.5}}]]
            }},
            "candidates": {{"grid": {{"resolution": 15}}}},
            "validation_resolution": 31,
            "output": {{"timings": {timings}}},
            "seed": 7
        }}"#
    );
    ProblemConfig::from_json_str(&text).unwrap()
}

#[test]
fn serialize_parse_serialize_is_byte_identical() {
    for (degree, timings) in [(1, false), (2, true), (3, false)] {
        let (report, _) = run_solve(&config(degree, timings), Path::new("."), None).unwrap();
        assert_eq!(report.ellipsoid.is_some(), degree == 1);
        assert_eq!(report.timings.is_some(), timings);
        let first = report.to_json().unwrap();
        let parsed = RunReport::from_json_str(&first).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.to_json().unwrap(), first);
    }
}

#[test]
fn certify_is_repeatable_and_matches_the_stored_certificate() {
    let (report, exit) = run_solve(&config(2, false), Path::new("."), None).unwrap();
    let a = certify_report(&report, 31).unwrap();
    let b = certify_report(&report, 31).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.exit_code(), exit);
    assert_eq!(a.gap, report.certificate.gap);
    assert_eq!(a.max_violation, report.validation.max_violation);
}

#[test]
fn inconsistent_reports_are_rejected() {
    let (report, _) = run_solve(&config(1, false), Path::new("."), None).unwrap();
    let json = report.to_json().unwrap();
    let wrong_nd = json.replacen("\"n_d\": 3", "\"n_d\": 4", 1);
    assert!(RunReport::from_json_str(&wrong_nd).is_err());
    let extra = json.replacen("{", "{\n  \"extra\": 1,", 1);
    assert!(RunReport::from_json_str(&extra).is_err());
}
