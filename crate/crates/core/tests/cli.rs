use std::process::{Command, Output};

use qzeros::report::sig6;
use serde_json::Value;

fn qzeros(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qzeros"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let output = qzeros(args);
    assert_eq!(
        output.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).unwrap()
}

fn number(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn default_run_lists_nine_very_good_zeros() {
    let output = qzeros(&[]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert!(text.starts_with("d= 2 a= 750 ALL ZEROS TILL 48.5406\n"));
    let final_list = text
        .split("FINAL LIST OF Q-ZEROS:")
        .nth(1)
        .expect("final list");
    let first = final_list
        .lines()
        .find(|l| l.starts_with("very good 1 "))
        .unwrap();
    assert!(
        first.contains("0.1304") && first.contains("14.1450"),
        "{first}"
    );
    assert_eq!(final_list.matches("very good").count(), 9);
    assert!(text.contains("VARIANT= 2  c= 6"));
    assert!(text.contains("iterations do not work"));
}

#[test]
fn json_report_round_trips_and_repeats() {
    let output = qzeros(&["--format", "json"]);
    let again = qzeros(&["--format", "json"]);
    assert_eq!(output.stdout, again.stdout);
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    let zeros = report["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 9);
    assert!(zeros.iter().all(|z| z["verdict"] == "very_good"));
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(report, reparsed);
    let z1 = &zeros[0]["z"];
    assert!((number(&z1["re"]) - 0.130389125879).abs() < 1e-6);
    assert!((number(&z1["im"]) - 14.1450059172).abs() < 1e-6);
}

#[test]
fn text_and_json_agree() {
    let text = stdout(&qzeros(&[]));
    let report = json(&["--format", "json"]);
    for zero in report["zeros"].as_array().unwrap() {
        let vv = format!("vv= {}", sig6(number(&zero["vv"])));
        let de = format!("de= {}", sig6(number(&zero["de"])));
        assert!(text.contains(&vv), "{vv}");
        assert!(text.contains(&de), "{de}");
    }
}

#[test]
fn y_max_selects_seeds() {
    let report = json(&["--y-max", "30", "--format", "json"]);
    let ys: Vec<f64> = report["zeros"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| number(&z["y"]))
        .collect();
    let expected = [14.1347, 21.0220, 25.0109];
    assert_eq!(ys.len(), expected.len());
    for (y, e) in ys.iter().zip(expected) {
        assert!((y - e).abs() < 1e-4, "{y} vs {e}");
    }
}

#[test]
fn empty_range_is_not_an_error() {
    let output = qzeros(&["--y-max", "10"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("no zeros requested"));
    let report = json(&["--y-max", "10", "--format", "json"]);
    assert_eq!(report["zeros"].as_array().unwrap().len(), 0);
    let plot = stdout(&qzeros(&["--y-max", "10", "--plot-data"]));
    assert_eq!(plot, "y,re_za,im_za,re_z,im_z,de,vv\n");
}

#[test]
fn polynomial_target_finds_its_root() {
    let report = json(&[
        "--target",
        "poly:1,-1-2i",
        "--za",
        "1.1+2.05i",
        "--format",
        "json",
    ]);
    let zero = &report["zeros"][0];
    assert_eq!(zero["verdict"], "very_good");
    assert!((number(&zero["z"]["re"]) - 1.0).abs() < 1e-6);
    assert!((number(&zero["z"]["im"]) - 2.0).abs() < 1e-6);
}

#[test]
fn plot_data_has_one_row_per_zero() {
    let output = qzeros(&["--plot-data"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("y,re_za,im_za,re_z,im_z,de,vv"));
    let rows: Vec<Vec<f64>> = rows
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    // the sixth zero moves left of its linear approximation
    assert!(rows[5][3] < rows[5][1]);
}

#[test]
fn csv_table_has_one_row_per_zero() {
    let text = stdout(&qzeros(&["--format", "csv"]));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "index");
    assert_eq!(&headers[8], "verdict");
    let records: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), 9);
    assert!(records.iter().all(|r| &r[8] == "very_good"));
}

#[test]
fn out_writes_the_report_to_a_file() {
    let path = std::env::temp_dir().join(format!("qzeros-cli-{}.json", std::process::id()));
    let output = qzeros(&[
        "--y-max",
        "22",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(report["zeros"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    for args in [
        vec!["--bogus"],
        vec!["--a", "-1"],
        vec!["--y-max", "30", "--y", "14"],
        vec!["--za", "1+2i"],
        vec!["--target", "poly:1,0,-1"],
        vec!["--vv-max", "2"],
    ] {
        assert_eq!(qzeros(&args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(qzeros(&["--help"]).status.code(), Some(0));
    // a seed with no zero in reach ends failed
    let failed = qzeros(&[
        "--target",
        "poly:1,0,1",
        "--za",
        "5+5i",
        "--max-integrations-per-zero",
        "1",
    ]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(stdout(&failed).contains("failed 1"));
}
