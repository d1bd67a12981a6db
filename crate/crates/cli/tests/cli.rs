use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibercover"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fibercover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn certify_then_verify_round_trip() {
    let path = scratch("cert.json");
    let o = bin(&[
        "certify",
        "--word",
        "Dx Dy^6",
        "--mu",
        "1",
        "--lambda",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["version"], "fibercover/1");
    assert_eq!(cert["status"], "certified");
    assert_eq!(cert["case"], "3b");

    let v = bin(&["verify", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout_json(&v)["valid"], true);

    let mut forged = cert.clone();
    forged["b1"] = serde_json::json!(cert["b1"].as_u64().unwrap() + 1);
    let bad = scratch("forged.json");
    std::fs::write(&bad, forged.to_string()).unwrap();
    let v = bin(&["verify", bad.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout_json(&v)["valid"], false);
}

#[test]
fn negative_slopes_and_csv() {
    let o = bin(&[
        "certify", "--word", "Dx Dy^4", "--mu", "-5", "--lambda", "-4", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("word,mu,lambda,status,case,degree,b1"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!(&row[1..4], &["-5", "-4", "certified"]);
    assert!(lines.next().is_none());
}

#[test]
fn scan_report_verifies() {
    let path = scratch("scan.json");
    let o = bin(&[
        "scan",
        "--word",
        "Dx Dy^4",
        "--window",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["version"], "fibercover/1");
    let n = report["certificates"].as_array().unwrap().len();
    assert!(n >= 4);
    let v = bin(&["verify", path.to_str().unwrap()]);
    let verdicts = stdout_json(&v);
    assert_eq!(verdicts.as_array().unwrap().len(), n);
    assert!(verdicts.as_array().unwrap().iter().all(|x| x["valid"] == true));

    let o = bin(&["scan", "--word", "Dx Dy^4", "--window", "1", "--format", "csv"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), n + 1);
}

#[test]
fn quotient_and_snf() {
    let o = bin(&["quotient", "--orders", "3,3,4"]);
    assert_eq!(o.status.code(), Some(0));
    let q = stdout_json(&o);
    assert_eq!(q["found"], true);
    let orders: Vec<u64> = q["witness"]["orders"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["actual"].as_u64().unwrap())
        .collect();
    assert_eq!(orders, vec![3, 3, 4]);

    let o = bin(&["snf", "--matrix", "[[2,4,4],[-6,6,12],[10,-4,-16]]"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout_json(&o);
    assert_eq!(s["invariant_factors"], serde_json::json!(["2", "6", "12"]));
    assert_eq!(s["free_rank"], 0);
}

#[test]
fn malformed_input_exits_with_two() {
    for args in [
        &["certify", "--word", "Dx Dz", "--mu", "1", "--lambda", "1"][..],
        &["certify", "--word", "Dx Dy", "--mu", "2", "--lambda", "4"],
        &["certify", "--word", "Dx Dy", "--mu", "0", "--lambda", "0"],
        &[
            "certify", "--word", "Dx Dy", "--mu", "1", "--lambda", "1", "--cases", "9z",
        ],
        &[
            "certify",
            "--word",
            "Dx Dy",
            "--mu",
            "1",
            "--lambda",
            "1",
            "--quotient-strategies",
            "magic",
        ],
        &["certify", "--word", "Dx Dy", "--mu", "1"],
        &["scan", "--word", "Dx Dy", "--window", "0"],
        &["quotient", "--orders", "3,3"],
        &["snf", "--matrix", "[[1,2],[3]]"],
        &["snf", "--matrix", "not json"],
        &["verify", "/nonexistent/cert.json"],
    ] {
        let o = bin(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn refusal_is_a_completed_run() {
    let o = bin(&["certify", "--word", "Dx Dy", "--mu", "1", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let c = stdout_json(&o);
    assert_eq!(c["status"], "hypothesis-fails");
    assert!(c["b1"].is_null());
}
