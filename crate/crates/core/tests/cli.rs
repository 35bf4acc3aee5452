use std::process::{Command, Output};

use serde_json::Value;

fn thetafact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetafact"))
        .args(args)
        .env_remove("THETAFACT_TOLERANCE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--output", "json"]);
    let o = thetafact(&full);
    (o.status.code().unwrap(), serde_json::from_str(&stdout(&o)).unwrap())
}

#[test]
fn dim_examples() {
    let (code, v) = json(&["dim", "gvb", "--n", "2", "--kappa", "2", "--genus", "2"]);
    assert_eq!((code, v["value"].as_u64()), (0, Some(10)));
    let (_, v) = json(&["dim", "svb", "--n", "2", "--kappa", "1", "--genus", "2"]);
    assert_eq!(v["value"], 4);
    assert!(v["raw"].is_f64() && v["residual"].is_f64());
    let (_, v) = json(&["dim", "spb", "--n", "2", "--kappa", "2", "--genus", "2", "--aprime", "0,1"]);
    assert_eq!(v["value"], 4);
    let (_, v) = json(&["dim", "pb", "--n", "2", "--kappa", "1", "--genus", "2", "--a", "0,0"]);
    assert_eq!(v["value"], 1);
    let (_, v) = json(&["dim", "vb", "--n", "1", "--kappa", "3", "--genus", "3"]);
    assert_eq!(v["value"], 27);
}

#[test]
fn enumerate_examples() {
    let o = thetafact(&["enumerate", "aprime", "--n", "2", "--kappa", "2", "--count"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "3\n".to_string()));
    let (_, v) = json(&["enumerate", "saprime", "--n", "2", "--kappa", "1"]);
    assert_eq!(v["labels"].as_array().unwrap().len(), 2);
    let o = thetafact(&["enumerate", "adelta", "--n", "2", "--kappa", "1", "--I", "1", "--J"]);
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = thetafact(&["enumerate", "apq", "--n", "2", "--kappa", "2", "--p", "1", "--q", "2", "--primed"]);
    assert_eq!(stdout(&o), "((0,2),(0,2))\n((1,2),(0,1))\n");
    let o = thetafact(&[
        "enumerate", "ageneral", "--n", "2", "--m-exp", "2,1", "--l-exp", "0,0", "--e", "0", "--d", "1", "--I", "--J",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn verify_examples() {
    let (code, v) = json(&["verify", "degeneration", "--n", "2", "--kappa", "2", "--genus", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);

    let (code, v) = json(&["verify", "zagier", "--n", "2", "--kappa", "1", "--rhs", "printed"]);
    assert_eq!(code, 1);
    let r = &v["reports"][0];
    assert_eq!(r["lhs"]["integer"], 3);
    assert_eq!(r["rhs"]["integer"], 6);
    assert_eq!(r["passed"], false);

    let (code, _) = json(&["verify", "zagier", "--n", "2", "--kappa", "1", "--mode", "exact"]);
    assert_eq!(code, 0);
    let (code, v) = json(&["verify", "zagier-matrix", "--m", "4", "--n", "2", "--B", "1,3", "--mode", "exact"]);
    assert_eq!((code, v["reports"][0]["lhs"]["integer"].as_i64()), (0, Some(8)));
    let (code, v) = json(&["verify", "unitarity", "--m", "5", "--n", "3", "--tolerance", "1e-9"]);
    assert_eq!((code, v["reports"].as_array().unwrap().len()), (0, 10));
    let (code, _) = json(&["verify", "beta-compat", "--n", "3", "--kappa", "2", "--genus", "3"]);
    assert_eq!(code, 0);
    let (code, _) = json(&["verify", "main", "--n", "3", "--kappa", "1"]);
    assert_eq!(code, 0);
}

#[test]
fn gluing_suite_reports_rank_one_success() {
    let (code, v) = json(&["verify", "gluing", "--n", "1", "--kappa", "2", "--dims", "verlinde", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn gluing_suite_at_rank_two_is_reported_not_hidden() {
    // Exit status follows the reports; the injectivity and right-inverse
    // checks always hold, the glued dimension depends on the maps.
    let (code, v) = json(&["verify", "gluing", "--n", "2", "--kappa", "1", "--dims", "unit", "--seed", "7"]);
    let reports = v["reports"].as_array().unwrap();
    let by_name = |n: &str| reports.iter().find(|r| r["name"] == n).unwrap();
    assert_eq!(by_name("gluing-injective")["passed"], true);
    assert_eq!(by_name("gluing-right-inverse")["passed"], true);
    let all = reports.iter().all(|r| r["passed"] == true);
    assert_eq!(code, if all { 0 } else { 1 });
}

#[test]
fn json_reports_have_the_documented_fields() {
    let (_, v) = json(&["verify", "all", "--n", "2", "--kappa", "2"]);
    for r in v["reports"].as_array().unwrap() {
        for key in ["name", "params", "lhs", "rhs", "residual", "passed", "mode"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
        assert!(r["lhs"]["raw"].is_number());
    }
}

#[test]
fn csv_output_has_a_header_row() {
    let o = thetafact(&["verify", "main", "--n", "2", "--kappa", "2", "--output", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,params,lhs,rhs,residual,passed,mode"));
    assert_eq!(lines.count(), 1);
    let o = thetafact(&["enumerate", "aprime", "--n", "2", "--kappa", "2", "--output", "csv"]);
    assert_eq!(stdout(&o), "a,b\n0 0,2 2\n0 1,1 2\n1 1,1 1\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "all", "--n", "2", "--kappa", "1", "--seed", "3", "--output", "json"];
    assert_eq!(thetafact(&args).stdout, thetafact(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(thetafact(&["dim", "svb", "--n", "2"]).status.code(), Some(64));
    assert_eq!(thetafact(&["dim", "bogus"]).status.code(), Some(64));
    assert_eq!(thetafact(&["verify", "zagier", "--n", "4", "--kappa", "1", "--mode", "exact"]).status.code(), Some(64));
    assert_eq!(thetafact(&["enumerate", "adelta", "--n", "2", "--kappa", "1", "--I", "0", "--J", "0"]).status.code(), Some(64));
    assert_eq!(thetafact(&["--version"]).status.code(), Some(0));
    // A tolerance far below double precision makes rounding fail loudly.
    let o = thetafact(&["dim", "svb", "--n", "4", "--kappa", "4", "--genus", "4", "--tolerance", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_can_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_thetafact"))
        .args(["dim", "svb", "--n", "4", "--kappa", "4", "--genus", "4"])
        .env("THETAFACT_TOLERANCE", "1e-300")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_thetafact"))
        .args(["dim", "svb", "--n", "2", "--kappa", "1", "--tolerance", "0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("thetafact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = thetafact(&[
        "dim", "gvb", "--n", "2", "--kappa", "2", "--output", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["value"], 10);
    std::fs::remove_dir_all(&dir).unwrap();
}
