use std::process::{Command, Output};

use parafourier::verify::{AggregateReport, Status};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parafourier")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_sl2_passes() {
    let o = bin(&["verify", "--suite", "sl2", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let r = AggregateReport::from_json(&stdout(&o)).unwrap();
    let names: Vec<_> = r.reports[0].checks.iter().map(|c| c.name.as_str()).collect();
    assert!(names.contains(&"involution_all_deltas") && names.contains(&"equivariance"));
    assert_eq!(r.status, Status::Pass);
}

#[test]
fn verify_quadric_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quadric.json");
    let o = bin(&["verify", "--suite", "quadric", "--d", "2", "--q", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = AggregateReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let checks = &r.reports[0].checks;
    assert!(checks.iter().any(|c| c.name == "kl_inversion_d2"));
    assert_eq!(checks.iter().filter(|c| c.name.starts_with("casesfor_d2_")).count(), 6);
    assert_eq!(r.reports[0].parameters.d, vec![2]);
}

#[test]
fn verify_sl3_uses_shipped_modulus() {
    let o = bin(&["verify", "--suite", "sl3", "--q", "4", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dim S′ = 210"));
}

#[test]
fn exit_codes_for_bad_input() {
    assert_eq!(bin(&["verify", "--suite", "sl2", "--q", "6"]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "--suite", "sl2", "--q", "16"]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "--suite", "sl2", "--q", "9", "--modulus", "1,0,0"]).status.code(), Some(2));
    assert_eq!(bin(&["verify", "--suite", "nope", "--q", "3"]).status.code(), Some(2));
    let o = bin(&["verify", "--suite", "sp4", "--q", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--budget"));
    assert_eq!(bin(&["report", "--q", "3"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn extension_field_with_modulus() {
    let o = bin(&["verify", "--suite", "charsums", "--q", "9", "--modulus", "2,2,1"]);
    assert_eq!(o.status.code(), Some(0));
    let r = AggregateReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.reports[0].field.modulus, Some(vec![2, 2, 1]));
}

#[test]
fn kloosterman_table() {
    let o = bin(&["table", "kloosterman", "--q", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["a", "c0", "c1", "re", "im"]);
    let exact: Vec<String> = rows.records().map(|r| r.unwrap()[1].to_string()).collect();
    assert_eq!(exact, ["-1", "-1", "2"]);
}

#[test]
fn casesfor_table() {
    let o = bin(&["table", "casesfor", "--d", "2", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let records: Vec<_> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 6);
    for r in &records {
        assert_eq!(&r[1], &r[2]);
        assert_eq!(&r[3], "true");
    }
    let total: usize = records.iter().map(|r| r[4].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 33 * 33);
}

#[test]
fn count_points() {
    let o = bin(&["count", "points", "--d", "3", "--q", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("261"));
}

#[test]
fn report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = bin(&["report", "--all", "--q", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let strip = |p: &std::path::Path| {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("wall_time_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    let r = AggregateReport::from_json(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert!(r.reports.len() >= 6);
    assert!(r.reports.iter().all(|s| s.parameters.seed == 0));
}

#[test]
fn report_partial_failure_still_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = bin(&["report", "--suites", "charsums,sp4", "--q", "2,5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = AggregateReport::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.reports.len(), 4);
    let failed: Vec<_> = r.reports.iter().filter(|s| s.status == Status::Fail).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].checks[0].name, "precondition");
}

#[test]
fn seed_changes_samples_but_not_verdict() {
    let a = bin(&["verify", "--suite", "mirabolic", "--q", "3", "--seed", "1"]);
    let b = bin(&["verify", "--suite", "mirabolic", "--q", "3", "--seed", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let r = AggregateReport::from_json(&stdout(&a)).unwrap();
    assert_eq!(r.reports[0].parameters.seed, 1);
}
