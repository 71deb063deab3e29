use std::process::{Command, Output};

use serde_json::Value;

use wreath_lis::montecarlo::tail_bound;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wreath-lis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_lines(args: &[&str]) -> Vec<String> {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

fn json_lines(args: &[&str]) -> (Value, Vec<Value>) {
    let lines = stdout_lines(args);
    let mut values = lines.iter().map(|l| serde_json::from_str::<Value>(l).unwrap());
    let meta = values.next().expect("metadata line");
    (meta["meta"].clone(), values.collect())
}

#[test]
fn demo_fixture() {
    let (meta, body) = json_lines(&["sample", "--fixture", "demo"]);
    assert_eq!(meta["command"], "sample");
    assert_eq!(body[0]["word_text"], "6 5 2 1 3 4");
    assert_eq!(body[0]["L"], 3);
    assert_eq!(body[0]["decomposition"]["W"], 3);
    assert_eq!(body[0]["decomposition"]["N"], 2);

    let csv = stdout_lines(&["sample", "--fixture", "demo", "--format", "csv"]);
    assert!(csv[0].starts_with("# {\"meta\""));
    assert_eq!(csv[1], "n,k,word,L,W,N,chosen_blocks,per_block_lis");
    assert_eq!(csv[2], "3,2,6 5 2 1 3 4,3,3,2,1 2,1 2 1");
}

#[test]
fn trivial_group() {
    let (meta, body) = json_lines(&["sample", "--n", "1", "--k", "1", "--seed", "0"]);
    assert_eq!(meta["seed"], 0);
    assert_eq!(body[0]["word_text"], "1");
    assert_eq!(body[0]["L"], 1);
}

#[test]
fn exact_tables() {
    let (_, body) = json_lines(&["exact", "--wreath", "2", "2"]);
    assert_eq!(body[0]["counts"], serde_json::json!([1, 4, 2, 1]));
    assert_eq!(body[0]["mean"], serde_json::json!({"num": 19, "den": 8}));

    let (_, body) = json_lines(&["exact", "--signed", "2"]);
    assert_eq!(body[0]["counts"], serde_json::json!([1, 5, 1, 1]));

    let (_, body) = json_lines(&["exact", "--sym", "3"]);
    assert_eq!(body[0]["mean"], serde_json::json!({"num": 2, "den": 1}));

    let (_, body) = json_lines(&["exact", "--moments", "2", "3"]);
    assert_eq!(body[0]["mean_w"], body[0]["mean_rhs"]);
    assert_eq!(body[0]["var_w"], body[0]["var_rhs"]);
}

#[test]
fn exact_csv() {
    let lines = stdout_lines(&["exact", "--wreath", "2", "2", "--statistic", "w", "--format", "csv"]);
    assert_eq!(lines[1], "value,count,probability");
    assert_eq!(lines[2..].len(), 4);
    assert!(lines[2].starts_with("1,2,"));
    assert!(lines[3].starts_with("2,3,"));
}

#[test]
fn cap_exceeded_exits_3() {
    let out = run(&["exact", "--wreath", "4", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cap"));
}

#[test]
fn missing_seed_exits_2() {
    for args in [
        &["tail", "--k", "5", "--trials", "10"][..],
        &["scan", "--grid", "4", "--trials", "10"],
        &["conjecture", "--grid", "4", "--trials", "10"],
        &["partitions", "--n", "4", "--steps", "10"],
        &["sample", "--n", "4", "--k", "2"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn malformed_arguments_exit_2() {
    assert_eq!(run(&["scan", "--grid", "4y2", "--trials", "3", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(run(&["exact", "--wreath", "0", "2"]).status.code(), Some(2));
    assert_eq!(run(&["exact", "--sym", "3", "--signed", "2"]).status.code(), Some(2));
}

#[test]
fn partitions_lists_every_class() {
    let lines = stdout_lines(&["partitions", "--n", "5", "--steps", "5000", "--seed", "2", "--check"]);
    assert_eq!(lines[1], "partition,count,frequency");
    let rows = &lines[2..];
    assert_eq!(rows.len(), 7);
    assert!(rows[0].starts_with("5,"));
    assert!(rows[6].starts_with("1+1+1+1+1,"));
    let total: u64 = rows
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 5000);
}

#[test]
fn tail_report_is_consistent() {
    let (_, body) = json_lines(&["tail", "--k", "6", "--trials", "20000", "--seed", "4", "--u-grid", "0,1,3"]);
    let r = &body[0];
    assert_eq!(r["h_exact"], true);
    let h = r["h"].as_f64().unwrap();
    let f = r["f"].as_f64().unwrap();
    let g = r["g"].as_f64().unwrap();
    assert!((h - (f + 2.0 * g.sqrt())).abs() < 1e-12);
    for (u, b) in r["u_grid"].as_array().unwrap().iter().zip(r["bound"].as_array().unwrap()) {
        assert!((tail_bound(h, u.as_f64().unwrap()) - b.as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn scan_records_and_summary_agree() {
    let args = ["scan", "--grid", "6x3", "--trials", "400", "--seed", "12"];
    let (_, records) = json_lines(&[&args[..], &["--format", "json"]].concat());
    assert_eq!(records.len(), 400);
    assert!(records.iter().all(|r| r["W"].as_u64() <= r["L"].as_u64()));
    let mean_l = records.iter().map(|r| r["L"].as_f64().unwrap()).sum::<f64>() / 400.0;

    let csv = stdout_lines(&args);
    assert_eq!(csv[1], "n,k,trials,mean_L,se_L,var_L,median_L,mean_ratio,mean_W");
    let fields: Vec<&str> = csv[2].split(',').collect();
    assert_eq!(&fields[..3], &["6", "3", "400"]);
    assert!((fields[3].parse::<f64>().unwrap() - mean_l).abs() < 1e-9);
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("wreath-lis-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("conj.csv");
    let args = ["conjecture", "--grid", "10,40", "--trials", "200", "--seed", "5"];
    let direct = run(&args).stdout;
    let status = run(&[&args[..], &["--out", path.to_str().unwrap()]].concat()).status;
    assert!(status.success());
    assert_eq!(std::fs::read(&path).unwrap(), direct);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["scan", "--grid", "30x4", "--trials", "6000", "--seed", "8", "--format", "json"];
    let first = run(&args).stdout;
    assert_eq!(run(&args).stdout, first);
    assert_eq!(run(&[&args[..], &["--threads", "3"]].concat()).stdout, first);
}
