use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn numrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numrad"))
        .args(args)
        .env_remove("NUMRAD_JOBS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_jordan3(dir: &Path) -> String {
    let path = dir.join("jordan3.json");
    std::fs::write(
        &path,
        r#"{"dim": 3, "re": [0,1,0, 0,0,1, 0,0,0], "im": [0,0,0, 0,0,0, 0,0,0]}"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

fn write_identity2(dir: &Path) -> String {
    let path = dir.join("identity2.json");
    std::fs::write(&path, r#"{"dim": 2, "re": [1,0,0,1], "im": [0,0,0,0]}"#).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn eval_encloses_jordan_block() {
    let dir = tempfile::tempdir().unwrap();
    let out = numrad(&["eval", "--input", &write_jordan3(dir.path()), "--tol", "1e-10"]);
    assert!(out.status.success());
    let v = json(&out);
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    let exact = std::f64::consts::FRAC_1_SQRT_2;
    assert!(lo <= exact + 1e-15 && exact <= hi + 1e-15 && hi - lo <= 1e-10, "{v}");
    assert_eq!(v["witness"].as_array().unwrap().len(), 3);
    assert!(v["theta"].is_number());
}

#[test]
fn eval_rejects_malformed_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim": 2, "re": [1,0,0], "im": [0,0,0,0]}"#).unwrap();
    let out = numrad(&["eval", "--input", path.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn bounds_saturate_at_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = numrad(&["bounds", "--input", &write_identity2(dir.path()), "--bound", "all"]);
    assert!(out.status.success());
    let reports = json(&out);
    let reports = reports.as_array().unwrap();
    let ids: Vec<&str> = reports.iter().map(|r| r["bound_id"].as_str().unwrap()).collect();
    for id in ["power_sum", "power_sum_closed", "cube", "cube_cross", "sixth_power", "cube_halves", "sixth_power_preset"] {
        assert!(ids.contains(&id), "missing {id} in {ids:?}");
    }
    for r in reports {
        if matches!(r["bound_id"].as_str().unwrap(), "power_sum" | "cube_halves" | "sixth_power_preset") {
            assert!((r["tightness"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{r}");
        }
    }
}

#[test]
fn bounds_accept_explicit_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_jordan3(dir.path());
    let out = numrad(&["bounds", "--input", &input, "--bound", "cube", "--alpha", "2,0", "--beta", "-1,1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = json(&out);
    assert_eq!(reports.as_array().unwrap().len(), 1);
    let r = &reports[0];
    assert!(r["rhs"].as_f64().unwrap() >= r["lhs"].as_f64().unwrap());

    let out = numrad(&["bounds", "--input", &input, "--bound", "power_sum", "--n", "2,3,7"]);
    let reports = json(&out);
    let powers: Vec<u64> = reports.as_array().unwrap().iter().map(|r| r["power"].as_u64().unwrap()).collect();
    assert_eq!(powers, [2, 3, 7]);

    let out = numrad(&["bounds", "--input", &input, "--bound", "cube", "--alpha", "0"]);
    assert!(!out.status.success());
}

#[test]
fn bounds_sweep_uses_parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.toml");
    std::fs::write(&sweep, "alphas = [[2.0, 0.0], [3.0, 0.0]]\ngrid = \"product\"\npowers = [2]\n").unwrap();
    let out = numrad(&[
        "bounds",
        "--input",
        &write_jordan3(dir.path()),
        "--bound",
        "cube",
        "--sweep",
        sweep.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out).as_array().unwrap().len(), 4);

    std::fs::write(&sweep, "alphas = [[2.0, 0.0]]\nunknown_key = 1\n").unwrap();
    let out = numrad(&["bounds", "--input", &write_jordan3(dir.path()), "--sweep", sweep.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn buzano_preset_reports_no_violations() {
    let out = numrad(&["buzano", "--preset", "product_buzano", "--trials", "50", "--seed", "3", "--dims", "1,3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["preset"], "product_buzano");
    assert_eq!(r["totals"]["violations"], 0);
    assert!(r["totals"]["trials"].as_u64().unwrap() >= 100);
    assert!(r["violations"].as_array().unwrap().is_empty());
}

fn small_campaign(dir: &Path) -> String {
    let path = dir.join("campaign.toml");
    std::fs::write(
        &path,
        r#"
seed = 7
suites = ["sandwich", "power_sum", "cube", "buzano", "dominance"]

[[ensembles]]
kind = "ginibre"
dim = 3
count = 40

[[ensembles]]
kind = "two_nilpotent"
dim = 4
count = 20
"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn campaign_writes_reports_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_campaign(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let a = numrad(&["campaign", "--config", &cfg, "--jobs", "1", "--out", out_a.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = Command::new(env!("CARGO_BIN_EXE_numrad"))
        .args(["campaign", "--config", &cfg, "--out", out_b.to_str().unwrap()])
        .env("NUMRAD_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(b.status.code(), Some(0));
    for f in ["campaign.json", "suites.csv", "histogram.csv", "leaderboard.csv"] {
        assert!(out_a.join(f).exists(), "{f}");
    }
    let ra: Value = serde_json::from_str(&std::fs::read_to_string(out_a.join("campaign.json")).unwrap()).unwrap();
    let rb: Value = serde_json::from_str(&std::fs::read_to_string(out_b.join("campaign.json")).unwrap()).unwrap();
    assert_eq!(ra["hash"], rb["hash"]);
    assert_eq!(ra["hashed"], rb["hashed"]);
    assert_eq!(rb["meta"]["jobs"], 3);

    let seeded = dir.path().join("c");
    numrad(&["campaign", "--config", &cfg, "--seed", "8", "--out", seeded.to_str().unwrap()]);
    let rc: Value = serde_json::from_str(&std::fs::read_to_string(seeded.join("campaign.json")).unwrap()).unwrap();
    assert_eq!(rc["hashed"]["seed"], 8);
    assert_ne!(ra["hash"], rc["hash"]);
}

#[test]
fn campaign_exits_two_on_violations_and_dumps_replay_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.toml");
    // Agreement tolerances of 1e-300 flag every specialization that differs
    // from its parent family in the last bit.
    std::fs::write(
        &path,
        r#"
seed = 1
suites = ["substitution"]

[tolerances]
preset_agreement = 1e-300
module_agreement = 1e-300

[[ensembles]]
kind = "ginibre"
dim = 3
count = 5
"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let r = numrad(&["campaign", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2), "{}", String::from_utf8_lossy(&r.stderr));
    let dumps: Vec<_> = std::fs::read_dir(out.join("violations")).unwrap().collect();
    assert!(!dumps.is_empty());
    let dump = dumps[0].as_ref().unwrap().path();
    let replayed = numrad(&["replay", "--trial", dump.to_str().unwrap()]);
    assert!(replayed.status.success(), "{}", String::from_utf8_lossy(&replayed.stdout));
    let v = json(&replayed);
    assert_eq!(v["reproduced"], true);
    assert_eq!(v["element_matches"], true);
}

#[test]
fn replay_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.toml");
    std::fs::write(
        &path,
        "seed = 1\nsuites = [\"substitution\"]\n[tolerances]\npreset_agreement = 1e-300\nmodule_agreement = 1e-300\n[[ensembles]]\nkind = \"ginibre\"\ndim = 3\ncount = 5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    numrad(&["campaign", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let dump = std::fs::read_dir(out.join("violations")).unwrap().next().unwrap().unwrap().path();
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    v["margin"] = Value::from(v["margin"].as_f64().unwrap() + 1.0);
    std::fs::write(&dump, v.to_string()).unwrap();
    let replayed = numrad(&["replay", "--trial", dump.to_str().unwrap()]);
    assert_eq!(replayed.status.code(), Some(1));
    assert_eq!(json(&replayed)["reproduced"], false);
}
