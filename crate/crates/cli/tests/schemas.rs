use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schemas").join(format!("{name}.schema.json"))).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn check(name: &str, doc: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn run_json(args: &[&str]) -> (Value, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_ergodic"))
        .args(args)
        .args(["--format", "json"])
        .env_remove("ERGODIC_EPR_OUT_DIR")
        .output()
        .unwrap();
    let stdout = if out.stdout.is_empty() { Value::Null } else { serde_json::from_slice(&out.stdout).unwrap() };
    let stderr = serde_json::from_slice(&out.stderr).unwrap_or(Value::Null);
    (stdout, stderr)
}

#[test]
fn outputs_match_schemas() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("schemas");
    std::fs::create_dir_all(&dir).unwrap();

    let (v, _) = run_json(&["spectrum", "--ensemble", "gue", "--d-b", "32"]);
    check("spectrum", &v);

    let (v, _) = run_json(&["purity", "--ensemble", "poisson", "--profile", "gaussian", "--d-a", "4", "--d-b", "64"]);
    check("purity_report", &v);

    let (v, _) = run_json(&["transfer", "--ensemble", "gue", "--d-a", "4", "--d-b", "64"]);
    check("transfer", &v);

    let (v, _) = run_json(&["ramp", "--ensemble", "poisson", "--d-b", "64", "--n-real", "4", "--points", "60"]);
    check("ramp", &v);

    let (v, _) = run_json(&["capacity", "--d-a", "16", "--epsilon", "0.1"]);
    check("capacity", &v);

    let charges = dir.join("charges.json");
    let charge_doc = r#"{"qA": [[0, 1], [1, 0]], "QB": [[1.0, 0.3], [2.5, 1.1], [4.0, 0.2], [7.0, 2.0]]}"#;
    std::fs::write(&charges, charge_doc).unwrap();
    check("charge_set", &serde_json::from_str(charge_doc).unwrap());
    let (v, _) = run_json(&["multicharge", "--charges", charges.to_str().unwrap(), "--t0", "0.7"]);
    check("multicharge", &v);
    check("gram", &v["gram"]);

    let config = root().join("configs/quick.json");
    let (v, _) = run_json(&["sweep", "--config", config.to_str().unwrap()]);
    check("sweep_result", &v);

    let (_, err) = run_json(&["purity", "--d-a", "0"]);
    assert!(!err.is_null());
    check("error", &err);
}

#[test]
fn shipped_configs_match_schema() {
    for entry in std::fs::read_dir(root().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        check("sweep_config", &doc);
    }
}

#[test]
fn schema_rejects_unknown_config_keys() {
    let bad: Value = serde_json::json!({
        "ensembles": ["gue"], "profiles": ["flat"], "d_A_list": [2], "d_B_list": [8],
        "n_realisations": 2, "base_seed": 1
    });
    assert!(!schema("sweep_config").is_valid(&bad));
}
