use congruence_kernel::luck::{run_scan, LuckReport, ScanConfig, ScanKind, CSV_HEADER};

fn config(json: &str) -> ScanConfig {
    ScanConfig::from_json(json).unwrap()
}

#[test]
fn scalar_scan_reports_round_trip_through_json() {
    let cfg = config(r#"{"p":3,"d":1,"u":1,"subject":{"blocks":[[[{"matrix":[[4]]},{"coeff":"-1"}]]]},"levels":[1,4]}"#);
    let report = run_scan(ScanKind::Scalar, &cfg).unwrap();
    assert!(report.pass());
    let back = LuckReport::from_json(&report.to_json().unwrap()).unwrap();
    assert_eq!(back.rows, report.rows);
    let csv = report.to_csv();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn empty_level_range_gives_header_only() {
    let cfg = config(r#"{"p":3,"d":1,"u":1,"subject":{"blocks":[[[{"matrix":[[4]]},{"coeff":"-1"}]]]},"levels":[3,2]}"#);
    let report = run_scan(ScanKind::Scalar, &cfg).unwrap();
    assert!(report.rows.is_empty());
    assert_eq!(report.to_csv().trim_end(), CSV_HEADER);
}

#[test]
fn bad_configs_are_rejected() {
    assert!(ScanConfig::from_json(r#"{"p":4,"d":1,"u":1,"subject":{"blocks":[[[]]]},"levels":[1,2]}"#).is_err());
    assert!(ScanConfig::from_json(r#"{"p":3,"d":1,"u":1,"domain":"zz","subject":{"blocks":[[[]]]},"levels":[1,2]}"#).is_err());
}
