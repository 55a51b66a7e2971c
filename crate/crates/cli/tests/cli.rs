use std::collections::BTreeSet;
use std::process::{Command, Output};

use serde_json::Value;

fn shapoform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapoform")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("invalid JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn g2_roots_are_closed_under_reflections() {
    let out = shapoform(&["roots", "--type", "G2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let cartan: Vec<Vec<i64>> = serde_json::from_value(v["cartan_matrix"].clone()).unwrap();
    let roots: BTreeSet<Vec<i64>> = v["positive_roots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| serde_json::from_value(r["root"].clone()).unwrap())
        .collect();
    assert_eq!(roots.len(), 6);
    // s_i(β) = β - <β, α_i^∨> α_i permutes the positive roots other than α_i
    for i in 0..2 {
        for beta in &roots {
            let mut simple = vec![0; 2];
            simple[i] = 1;
            if *beta == simple {
                continue;
            }
            let pairing: i64 = (0..2).map(|j| beta[j] * cartan[i][j]).sum();
            let mut image = beta.clone();
            image[i] -= pairing;
            assert!(roots.contains(&image), "{beta:?} reflects to {image:?}");
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&shapoform(&["roots", "--type", "Q7"])), 2);
    assert_eq!(code(&shapoform(&["roots", "--type", "E8"])), 2);
    assert_eq!(code(&shapoform(&["verify", "inverse", "--type", "A1", "--cutoff", "11"])), 2);
    assert_eq!(code(&shapoform(&["verify", "inverse", "--type", "G2", "--cutoff", "4"])), 2);
    assert_eq!(code(&shapoform(&["fhat", "--type", "A2", "--module", "fund:3"])), 2);
    assert_eq!(code(&shapoform(&["fhat", "--type", "A2", "--module", "verma-dual"])), 2);
    assert_eq!(code(&shapoform(&["gram", "--type", "A2", "--cutoff", "2", "--nu", "2,1"])), 2);
    assert_eq!(code(&shapoform(&["fhat", "--type", "A1", "--module", "natural", "--at", "q=2"])), 2);
    assert_eq!(code(&shapoform(&["nonsense"])), 2);
}

#[test]
fn a1_cutoff_8_verifies() {
    let out = shapoform(&["verify", "inverse", "--type", "A1", "--cutoff", "8", "--method", "all"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["runs"][0]["blocks"].as_array().unwrap().len(), 9);
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "inverse", "--type", "A2", "--cutoff", "2", "--points", "2", "--seed", "5"];
    let a = shapoform(&args);
    let b = shapoform(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = shapoform(&["verify", "inverse", "--type", "A2", "--cutoff", "2", "--points", "2", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn singular_vectors_and_identities() {
    let out = shapoform(&["singular", "--type", "B2", "--module", "fund:1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["vectors"].as_array().unwrap().len(), 5);
    assert_eq!(v["independent"], true);
    for args in [
        vec!["verify", "abrr", "--type", "A1", "--cutoff", "4"],
        vec!["verify", "keyid", "--type", "A2", "--cutoff", "2"],
        vec!["verify", "audit", "--type", "A2", "--cutoff", "2"],
        vec!["singular", "--type", "A2", "--module", "fund:2", "--j", "f2", "--method", "abrr"],
    ] {
        let out = shapoform(&args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(json(&out)["passed"], true, "{args:?}");
    }
}

#[test]
fn pole_is_a_math_failure() {
    // z1 = 1 makes (λ, α_1) = 0, where the A-coefficients blow up
    let out = shapoform(&["fhat", "--type", "A1", "--module", "natural", "--at", "q=2,z1=1"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn routes_sum_to_the_entry() {
    let entries = json(&shapoform(&["fhat", "--type", "A2", "--module", "fund:1", "--j", "f2f1"]));
    let routes = json(&shapoform(&[
        "fhat", "--type", "A2", "--module", "fund:1", "--emit", "routes", "--i", "1", "--j", "f2f1",
    ]));
    assert_eq!(routes["routes"].as_array().unwrap().len(), 2);
    let entry = entries["entries"].as_array().unwrap().iter().find(|e| e["i"] == "1").unwrap();
    assert_eq!(entry["vector"], routes["total"]);
}

#[test]
fn text_output_names_q_integers() {
    let out = shapoform(&["gram", "--type", "B2", "--cutoff", "3", "--nu", "1,1", "--emit", "det", "--format", "text"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("[2]_q"));
}

#[test]
fn bench_reports_costs() {
    let v = json(&shapoform(&["bench", "--type", "A1", "--cutoff", "8"]));
    for m in ["routes", "abrr", "oracle"] {
        assert!(v["methods"][m]["field_ops"].as_u64().unwrap() > 0, "{m}");
    }
    assert_eq!(v["blocks"].as_array().unwrap().len(), 9);
    let t = json(&shapoform(&["bench", "--type", "A2", "--module", "trivial"]));
    assert_eq!(t["methods"]["routes"]["field_ops"], 0);
    assert_eq!(t["methods"]["abrr"]["field_ops"], 0);
}

#[test]
fn thread_variable_and_report_file() {
    let dir = std::env::temp_dir().join(format!("shapoform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = Command::new(env!("CARGO_BIN_EXE_shapoform"))
        .env("SHAPOFORM_THREADS", "1")
        .args(["verma", "--type", "A2", "--cutoff", "4", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    let v = json(&out);
    let blocks = v["blocks"].as_array().unwrap();
    assert!(blocks.iter().all(|b| b["dim"] == b["kostant"]));
    // partitions into α1, α2, α1+α2 by level: 1, 2, 4, 6, 9
    assert_eq!(blocks.iter().map(|b| b["dim"].as_u64().unwrap()).sum::<u64>(), 22);
    let bad = Command::new(env!("CARGO_BIN_EXE_shapoform"))
        .env("SHAPOFORM_THREADS", "zero")
        .args(["roots", "--type", "A1"])
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
    std::fs::remove_dir_all(&dir).ok();
}
