use std::process::Command;

fn ck(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ck")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn group_info_prints_order() {
    let (code, out, _) = ck(&["group-info", "--p", "3", "--d", "1", "--u", "1", "--level", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["order"], 9);
}

#[test]
fn verify_equiv_passes() {
    let (code, out, _) = ck(&["verify", "--p", "2", "--d", "2", "--u", "2", "--level", "2", "--lemma", "equiv"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("\"pass\": true"));
}

#[test]
fn zero_block_matrix_scan_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let subject = dir.path().join("s.json");
    std::fs::write(&subject, r#"{"blocks":[[[{"coeff":"0"}]]]}"#).unwrap();
    let (code, out, err) = ck(&["scan-matrix", "--p", "3", "--d", "1", "--u", "1", "--levels", "1:3", "--field", "q", "--subject", subject.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("\"delta_hat\": 1"));
}

#[test]
fn empty_range_csv_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let subject = dir.path().join("s.json");
    let target = dir.path().join("out.csv");
    std::fs::write(&subject, r#"{"blocks":[[[{"matrix":[[4]]},{"coeff":"-1"}]]]}"#).unwrap();
    let (code, _, err) = ck(&[
        "scan-scalar", "--p", "3", "--d", "1", "--u", "1", "--levels", "4:3", "--format", "csv",
        "--subject", subject.to_str().unwrap(), "--out", target.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_to_string(&target).unwrap().trim_end(), "n,index,kernel_dim,ratio_num,ratio_den,bound,confidence");
}

#[test]
fn bad_arguments_exit_one() {
    let (code, _, err) = ck(&["group-info", "--p", "4", "--d", "1", "--u", "1", "--level", "2"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    assert_eq!(ck(&["no-such-command"]).0, 1);
}
