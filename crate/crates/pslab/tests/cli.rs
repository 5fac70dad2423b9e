use std::process::{Command, Output};

use pslab::report::CountReport;

fn pslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pslab")).args(args).env_remove("PSLAB_MAX_BITS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV report (header and trailing comments dropped).
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn count_examples() {
    let o = pslab(&["count", "--alpha", "1.5", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("d,pair_count,kap_k,ratio,e1,e2,tail_e0\n"));
    assert_eq!(rows(&out)[0][..3], ["3", "4", "4"]);

    let o = pslab(&["count", "--alpha", "1.5", "--d", "3", "--k", "3"]);
    assert_eq!(rows(&stdout(&o))[0][2], "3");

    // Tail beyond R = 0 is everything; beyond a large R, nothing.
    let o = pslab(&["count", "--alpha", "3/2", "--d", "3", "--r", "0"]);
    assert_eq!(rows(&stdout(&o))[0][6], "4");
    let o = pslab(&["count", "--alpha", "3/2", "--d", "3", "--r", "100"]);
    assert_eq!(rows(&stdout(&o))[0][6], "0");
}

#[test]
fn comments_only_after_rows() {
    let o = pslab(&["sweep", "--alpha", "1.5", "--d-range", "1:40"]);
    let out = stdout(&o);
    assert!(!out.contains('\r'));
    let first_comment = out.lines().position(|l| l.starts_with('#')).unwrap();
    assert!(out.lines().skip(first_comment).all(|l| l.starts_with('#')));
    assert_eq!(rows(&out).len(), 40);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["count", "--alpha", "2.5", "--d", "3"][..],
        &["count", "--alpha", "1.5"],
        &["count", "--alpha", "1.5", "--d", "3", "--k", "1"],
        &["sweep", "--alpha", "1.5", "--d-range", "0:5"],
        &["sweep", "--alpha", "1.5", "--d-range", "1:5:0"],
        &["count", "--alpha", "1.5", "--d", "3", "--errors", "--c1", "1"],
        &["equidist", "--alpha", "1.5", "--d", "1000", "--window", "0:1.5"],
        &["verify", "--suite", "nonsense"],
        &["count", "--alpha", "1.5", "--d", "3", "--max-bits", "8"],
    ] {
        assert_eq!(pslab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn degenerate_window_exits_3() {
    // At d = 1 the window [((d + c1)/alpha)^beta, ((d + c2)/alpha)^beta) is empty.
    let o = pslab(&["equidist", "--alpha", "1.5", "--d", "1", "--window", "-0.6:0.4"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn empty_and_single_row_ranges() {
    let o = pslab(&["sweep", "--alpha", "1.5", "--d-range", "10:5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("d,pair_count,kap_k,ratio,e1,e2"));
    assert!(rows(&out).is_empty());

    let o = pslab(&["sweep", "--alpha", "1.5", "--d-range", "10:20:50"]);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "10");
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let run = |w: &str| stdout(&pslab(&["sweep", "--alpha", "1.7", "--k", "3", "--d-range", "900:3100:7", "--errors", "--workers", w]));
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("8"));
    assert!(one.contains("config="));
}

#[test]
fn json_round_trip_is_exact() {
    let o = pslab(&["sweep", "--alpha", "1.5", "--d-range", "100:130", "--errors", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rep: CountReport = serde_json::from_str(&text).unwrap();
    assert_eq!(rep.rows.len(), 31);
    assert!(!rep.truncated);
    assert_eq!(serde_json::to_string_pretty(&rep).unwrap() + "\n", text);
    let csv = stdout(&pslab(&["sweep", "--alpha", "1.5", "--d-range", "100:130", "--errors"]));
    for (row, fields) in rep.rows.iter().zip(rows(&csv)) {
        assert_eq!(fields[3].parse::<f64>().unwrap().to_bits(), row.ratio.to_bits());
    }
}

#[test]
fn hash_ignores_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let o = pslab(&["constants", "--alpha", "1.5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file, stdout(&pslab(&["constants", "--alpha", "3/2"])));
    assert!(file.contains("1.6449340668482264"));
}

#[test]
fn max_bits_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_pslab"))
        .args(["count", "--alpha", "1.5", "--d", "3"])
        .env("PSLAB_MAX_BITS", "16")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn triplets_hand_value() {
    let o = pslab(&["triplets", "--alpha", "1.5", "--x", "3"]);
    assert_eq!(rows(&stdout(&o))[0][1], "1");
}

#[test]
fn equidist_full_square() {
    let o = pslab(&["equidist", "--alpha", "1.5", "--d", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rep = &v["report"];
    let len = rep["n"].as_u64().unwrap() - rep["m"].as_u64().unwrap();
    let square = rep["regions"].as_array().unwrap().iter().find(|r| r["name"] == "unit_square").unwrap();
    assert_eq!(square["count_min"].as_u64(), Some(len));
    assert_eq!(square["count_max"].as_u64(), Some(len));
}

#[test]
fn verify_subset() {
    let o = pslab(&["verify", "--suite", "oracle", "--dmax", "500", "--suite", "regions"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["oracle", "regions"]);
    assert!(v.as_array().unwrap().iter().all(|s| s["passed"] == true));
}
