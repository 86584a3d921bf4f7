use std::io::Write;
use std::process::{Command as Proc, Stdio};

use clap::Parser;
use semifree::classifier::RawFamilies;
use semifree::cli::{run, Outcome, RunConfig, EXIT_INVALID, EXIT_MALFORMED, EXIT_OK, REPORT_SCHEMA};
use semifree::fpdata::{table, FixedPointData, TypeTag};
use semifree::localization::RestrictionTable;

fn go(args: &[&str], input: &[u8]) -> Outcome {
    let mut argv = vec!["semifree"];
    argv.extend_from_slice(args);
    run(&RunConfig::try_parse_from(argv).unwrap(), input)
}

fn exe(args: &[&str], stdin: &[u8]) -> (i32, String) {
    let mut child = Proc::new(env!("CARGO_BIN_EXE_semifree"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn type1() -> Vec<u8> {
    table::type1().to_json().into_bytes()
}

#[test]
fn restrict_table_type1() {
    let o = go(&["restrict-table"], &type1());
    assert_eq!(o.code, EXIT_OK);
    let row = o.report.lines().find(|l| l.starts_with("α2 ")).unwrap();
    assert!(row.trim_end().ends_with("-2λ"), "{row}");

    let s = go(&["restrict-table", "--format", "structured"], &type1());
    let t = RestrictionTable::from_json(&s.report).unwrap();
    assert_eq!(t.render().trim_end(), o.report.trim_end());
}

#[test]
fn validate_and_classify() {
    for (tag, d) in [("4", table::type4()), ("6b", table::type6b(2, 0))] {
        let bytes = d.to_json().into_bytes();
        assert_eq!(go(&["validate"], &bytes).code, EXIT_OK);
        let o = go(&["classify"], &bytes);
        assert_eq!(o.code, EXIT_OK);
        assert!(o.report.starts_with(&format!("type ({tag})")) || o.report.starts_with(&format!("type {tag}")), "{}", o.report);
        let s = go(&["classify", "--format", "structured"], &bytes);
        let v: serde_json::Value = serde_json::from_str(&s.report).unwrap();
        assert_eq!(v["schema"], REPORT_SCHEMA);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(go(&["validate"], b"{not json").code, EXIT_MALFORMED);
    assert_eq!(go(&["validate"], br#"{"schema": "fpdata.v0", "components": []}"#).code, EXIT_MALFORMED);
    assert_eq!(go(&["polytope-builtin", "type1"], b"").code, EXIT_MALFORMED);
    // a minimum of index 2 fails validation
    let bad = table::type1().to_json().replacen("\"index\": 0", "\"index\": 2", 1);
    assert_ne!(bad, table::type1().to_json());
    assert_eq!(go(&["validate"], bad.as_bytes()).code, EXIT_INVALID);
    assert_eq!(go(&["polytope-check"], br#"{"facets": [{"normal": [1, 0, 0], "offset": "0"}]}"#).code, EXIT_INVALID);
}

#[test]
fn malformed_reports_name_the_problem() {
    let o = go(&["localize", "--format", "structured"], b"[1, 2");
    assert_eq!(o.code, EXIT_MALFORMED);
    let v: serde_json::Value = serde_json::from_str(&o.report).unwrap();
    assert_eq!(v["malformed"], true);
    assert!(v["error"].as_str().unwrap().contains("line"));
}

#[test]
fn deterministic() {
    let input = table::type5(semifree::fpdata::Order::Forward).to_json().into_bytes();
    for args in [&["localize"][..], &["restrict-table", "--format", "structured"], &["classify"], &["validate"]] {
        let a = go(args, &input);
        let b = go(args, &input);
        assert_eq!((a.code, a.report.as_bytes()), (b.code, b.report.as_bytes()), "{args:?}");
    }
}

#[test]
fn enumerate_small_range() {
    let o = go(&["enumerate", "--max-genus", "1", "--b-range", "-4..4", "--format", "structured"], b"");
    assert_eq!(o.code, EXIT_OK);
    let back: RawFamilies = serde_json::from_str(&o.report).unwrap();
    assert_eq!(back.families.len(), 7);
    assert_eq!(go(&["enumerate", "--max-genus", "1", "--b-range", "-4..4"], b"").report, go(&["enumerate", "--max-genus", "1", "--b-range", "-4..4"], b"").report);
    assert!(RunConfig::try_parse_from(["semifree", "enumerate", "--b-range", "4..x"]).is_err());
}

#[test]
fn builtin_into_extract() {
    let (code, poly) = exe(&["polytope-builtin", "type4"], b"");
    assert_eq!(code, EXIT_OK);
    let (code, text) = exe(&["polytope-extract"], poly.as_bytes());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("(4)") && text.contains("twist"), "{text}");

    let (code, json) = exe(&["polytope-extract", "--format", "structured"], poly.as_bytes());
    assert_eq!(code, EXIT_OK);
    let d = FixedPointData::from_json(&json).unwrap();
    assert!(d.twist);
    assert_eq!(d.label, Some(TypeTag::T4));
    let (code, text) = exe(&["classify", "-"], json.as_bytes());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains('4'));
}

#[test]
fn builtin_listing() {
    let o = go(&["polytope-builtin"], b"");
    assert_eq!(o.report.lines().count(), semifree::delzant::BUILTIN_NAMES.len());
}

#[test]
fn structured_reports_reparse() {
    let t4 = table::type4().to_json().into_bytes();
    let poly = go(&["polytope-builtin", "type6b"], b"").report.into_bytes();
    for (args, input) in [
        (&["validate", "--format", "structured"][..], &t4),
        (&["localize", "--format", "structured"], &t4),
        (&["classify", "--format", "structured"], &t4),
        (&["polytope-check", "--format", "structured"], &poly),
        (&["dh-check", "--format", "structured"], &t4),
    ] {
        let o = go(args, input);
        let v: serde_json::Value = serde_json::from_str(&o.report).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert_eq!(v["schema"], REPORT_SCHEMA, "{args:?}");
        assert_eq!(v["command"], args[0]);
    }
    let o = go(&["polytope-extract", "--format", "structured"], &poly);
    assert!(FixedPointData::from_json(&o.report).is_ok());
    assert!(semifree::delzant::facets_from_json(std::str::from_utf8(&poly).unwrap()).is_ok());
}

#[test]
fn dh_check_flags() {
    let t4 = table::type4().to_json().into_bytes();
    assert!(RunConfig::try_parse_from(["semifree", "dh-check", "--alpha0", "1"]).is_err());
    let o = go(&["dh-check", "--alpha0", "1", "--gaps", "1,1"], &t4);
    assert!(o.code == EXIT_OK || o.code == EXIT_INVALID, "{}", o.report);
}
