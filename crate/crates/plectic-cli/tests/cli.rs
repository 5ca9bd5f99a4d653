//! End-to-end tests of the binary: exit-code contract, serialization
//! round-trips, determinism, and the documented command examples.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plectic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("plectic-cli-test-{}-{name}", std::process::id()));
    p
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_round_trips_and_is_deterministic() {
    let a = tmp("gen-a.json");
    let b = tmp("gen-b.json");
    for path in [&a, &b] {
        let out = run(&["generate", "--d", "2", "--p", "5", "--seed", "42", "--out",
            path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must produce byte-identical files");

    // the file loads back and validates: any check command exercises the load
    let file: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    assert_eq!(file["schema_version"], "plectic-module/1");
    assert_eq!(file["dimension"], 4);
    assert!(file["lambda"].is_array(), "d=2 files carry a form");
    assert!(file["factors"].is_array());

    // save -> load -> save is the identity on the canonical serialization
    let reloaded = run(&["check", a.to_str().unwrap(), "--theorem", "xs", "--roots",
        &format!("{},{}",
            file["factors"][0]["alpha"].as_str().unwrap(),
            file["factors"][1]["alpha"].as_str().unwrap())]);
    assert_eq!(reloaded.status.code(), Some(0));

    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();
}

#[test]
fn different_seeds_differ() {
    let a = tmp("seed-a.json");
    let b = tmp("seed-b.json");
    run(&["generate", "--d", "2", "--p", "5", "--seed", "1", "--out", a.to_str().unwrap()]);
    run(&["generate", "--d", "2", "--p", "5", "--seed", "2", "--out", b.to_str().unwrap()]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();
}

#[test]
fn invalid_flags_exit_2() {
    let out = run(&["generate", "--d", "9", "--p", "5", "--seed", "1", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["generate", "--d", "2", "--p", "6", "--seed", "1", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    // clap usage errors are exit 2 as well
    let out = run(&["generate", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

/// The canonical rank-4 fixture as a module file, written by hand.
fn canonical_module_file() -> String {
    serde_json::json!({
        "schema_version": "plectic-module/1",
        "p": 5,
        "d": 2,
        "weights": [{"k": 2, "t": 0}, {"k": 2, "t": 0}],
        "dimension": 4,
        "phis": [
            [["1","0","0","0"],["0","1","0","0"],["0","0","125","0"],["0","0","0","125"]],
            [["2","0","0","0"],["0","250","0","0"],["0","0","2","0"],["0","0","0","250"]]
        ],
        "fil_plus": [
            [["1","0","1","0"],["0","1","0","1"]],
            [["1","1","0","0"],["0","0","1","1"]]
        ],
        "lambda": [
            ["0","0","0","1"],
            ["0","0","-1","0"],
            ["0","-1","0","0"],
            ["1","0","0","0"]
        ]
    })
    .to_string()
}

#[test]
fn check_main_on_canonical_fixture() {
    let path = tmp("canonical.json");
    std::fs::write(&path, canonical_module_file()).unwrap();
    let out = run(&["check", path.to_str().unwrap(), "--theorem", "main", "--S", "1,2",
        "--roots", "1,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // 7 is not an eigenvalue of phi_2: input error
    let out = run(&["check", path.to_str().unwrap(), "--theorem", "main", "--S", "1,2",
        "--roots", "1,7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an eigenvalue"));

    // machine-readable report enumerates each sub-check
    let out = bin()
        .args(["--json", "check", path.to_str().unwrap(), "--theorem", "main", "--S", "1",
            "--roots", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["all_conclusions_hold"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 4);
    assert!(v["checks"][0]["check_id"].is_string());

    std::fs::remove_file(&path).ok();
}

#[test]
fn decompose_and_strictness_and_stability() {
    let path = tmp("canonical2.json");
    std::fs::write(&path, canonical_module_file()).unwrap();
    let p = path.to_str().unwrap();

    let out = run(&["decompose", p, "--roots", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("X({1,2})"));

    let out = run(&["check", p, "--theorem", "strictness", "--S", "1", "--roots", "1",
        "--T", "2"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["check", p, "--theorem", "stability", "--j", "2", "--roots", "1,125"]);
    assert_eq!(out.status.code(), Some(0));

    std::fs::remove_file(&path).ok();
}

#[test]
fn distributivity_counterexample_exits_1_with_witness() {
    let path = tmp("three-lines.json");
    let file = serde_json::json!({
        "schema_version": "plectic-filtration/1",
        "ambient_dim": 2,
        "generators": [
            [["1","0"]],
            [["0","1"]],
            [["1","1"]]
        ]
    });
    std::fs::write(&path, file.to_string()).unwrap();
    let out = run(&["distributivity", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("distributive: NO"));
    assert!(text.contains("witness A"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn generated_module_is_distributive() {
    let path = tmp("gen-dist.json");
    run(&["generate", "--d", "3", "--p", "5", "--seed", "7", "--out", path.to_str().unwrap()]);
    let out = run(&["distributivity", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("distributive: yes"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn closure_cap_env_is_honored() {
    let path = tmp("cap.json");
    let file = serde_json::json!({
        "schema_version": "plectic-filtration/1",
        "ambient_dim": 2,
        "generators": [[["1","0"]], [["0","1"]], [["1","1"]]]
    });
    std::fs::write(&path, file.to_string()).unwrap();
    let out = bin()
        .env("PLECTIC_CLOSURE_CAP", "2")
        .args(["distributivity", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn classify2_self_classification() {
    let path = tmp("classify.json");
    run(&["generate", "--d", "2", "--p", "5", "--seed", "11", "--out", path.to_str().unwrap()]);
    let p = path.to_str().unwrap();
    let out = bin().args(["--json", "classify2", p, p]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let classes = v["classes"].as_array().unwrap();
    assert!(classes.iter().any(|c| c["verdict"]["kind"] == "plectic"));
    // every anti-plectic twist reported is a sign
    for c in classes {
        if c["verdict"]["kind"] == "anti-plectic" {
            let xi = c["verdict"]["xi"].as_str().unwrap();
            assert!(xi == "1" || xi == "-1");
        }
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn classify2_requires_lambda() {
    let path = tmp("nolambda.json");
    let mut v: serde_json::Value = serde_json::from_str(&canonical_module_file()).unwrap();
    v.as_object_mut().unwrap().remove("lambda");
    std::fs::write(&path, v.to_string()).unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["classify2", p, p]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn slopes_report() {
    let path = tmp("eigen.json");
    let file = serde_json::json!({
        "schema_version": "plectic-eigendata/1",
        "records": [
            {
                "label": "canonical",
                "p": 5,
                "primes": [
                    {"k": 2, "t": 0, "alpha": "1", "beta": "125"},
                    {"k": 2, "t": 0, "alpha": "2", "beta": "250"}
                ]
            },
            {
                "label": "asymmetric",
                "p": 5,
                "primes": [
                    {"k": 2, "t": 0, "alpha": "1", "beta": "5"}
                ]
            }
        ]
    });
    std::fs::write(&path, file.to_string()).unwrap();
    let out = bin().args(["--json", "slopes", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let recs = v["records"].as_array().unwrap();

    // canonical record: slopes (0, 3), strictly-small flags (true, false)
    let canonical = &recs[0];
    let place1 = &canonical["places"][0];
    assert_eq!(place1["v_alpha"], "0");
    assert_eq!(place1["v_beta"], "3");
    assert_eq!(place1["strictly_small"][0], true);
    assert_eq!(place1["strictly_small"][1], false);
    assert_eq!(place1["slope_symmetric"], true);
    // products of (1,125) x (2,250): {2, 250, 250, 31250} -> 3 distinct
    assert_eq!(canonical["products_distinct_count"], 3);

    // v(1) + v(5) = 1 != 2t+k+1 = 3: symmetry flag false
    let asym = &recs[1];
    assert_eq!(asym["places"][0]["slope_symmetric"], false);

    std::fs::remove_file(&path).ok();

    // malformed record: inconsistent motivic weight -> exit 2
    let bad = tmp("eigen-bad.json");
    let file = serde_json::json!({
        "schema_version": "plectic-eigendata/1",
        "records": [
            {"label": "bad", "p": 5, "primes": [
                {"k": 2, "t": 0, "alpha": "1", "beta": "125"},
                {"k": 3, "t": 0, "alpha": "1", "beta": "125"}
            ]}
        ]
    });
    std::fs::write(&bad, file.to_string()).unwrap();
    let out = run(&["slopes", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&bad).ok();
}

#[test]
fn module_invariants_are_validated_on_load() {
    let path = tmp("invalid.json");
    let mut v: serde_json::Value = serde_json::from_str(&canonical_module_file()).unwrap();
    // break commutativity
    v["phis"][0][0][1] = serde_json::json!("1");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = run(&["check", path.to_str().unwrap(), "--theorem", "main", "--S", "1",
        "--roots", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("commute"));
    std::fs::remove_file(&path).ok();
}
