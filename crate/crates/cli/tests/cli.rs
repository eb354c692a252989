use std::io::Write;
use std::process::{Command, Output};

fn hk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hk")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn temp_json(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hk-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
    p
}

#[test]
fn exit_codes() {
    assert_eq!(code(&hk(&["specseq", "--preset", "surface-genus-2"])), 0);
    assert_eq!(code(&hk(&["crosscheck", "--preset", "cyclic-point-2", "--coeffs", "Z"])), 2);
    assert_eq!(code(&hk(&["verify", "--suite", "contraction", "--group", "Z2", "--operator", "printed"])), 2);
    assert_eq!(code(&hk(&["homology", "--preset", "no-such-preset"])), 1);
    assert_eq!(code(&hk(&["homology", "--preset", "scarparo-2k", "--levels", "0"])), 1);
    assert_eq!(code(&hk(&["homology", "--preset", "scarparo-2k", "--coeffs", "Z[1/4x]"])), 1);
    assert_eq!(code(&hk(&["--help"])), 0);
}

#[test]
fn schema_errors_carry_pointers() {
    let bad = temp_json(
        "bad.json",
        r#"{"group": {"family": "infinite_dihedral"}, "odometer_indices": [2, -4], "truncation_level": 2}"#,
    );
    let o = hk(&["homology", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("/odometer_indices/1"), "{err}");

    let unknown = temp_json("unknown.json", r#"{"K0": [{"Z": 1}], "K1": [], "K2": []}"#);
    let spec = temp_json(
        "spec.json",
        r#"{"group": {"family": "integers"}, "odometer_indices": [2, 4, 8], "truncation_level": 3}"#,
    );
    let o = hk(&["hk-check", "--input", spec.to_str().unwrap(), "--ktheory", unknown.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("K2"));
}

#[test]
fn file_inputs() {
    let spec = temp_json(
        "z.json",
        r#"{"group": {"family": "integers"}, "odometer_indices": [2, 4, 8, 16], "truncation_level": 4}"#,
    );
    let k = temp_json("k.json", r#"{"K0": [{"Zinv": [2]}], "K1": [{"Z": 1}]}"#);
    let o = hk(&["hk-check", "--input", spec.to_str().unwrap(), "--ktheory", k.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let wrong = temp_json("k2.json", r#"{"K0": [{"Zinv": [2]}], "K1": []}"#);
    assert_eq!(code(&hk(&["hk-check", "--input", spec.to_str().unwrap(), "--ktheory", wrong.to_str().unwrap()])), 2);

    let e2 = temp_json("e2.json", r#"{"rows": {"0": [1, 6, 1], "-1": [1, 6, 1]}, "cohomology": {"0": 1, "-1": 1}, "targets": [7, 7]}"#);
    let o = hk(&["specseq", "--input", e2.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["solve"]["status"], "unique");

    let tree = temp_json(
        "tree.json",
        r#"{"complex": {"group": {"family": "infinite_dihedral"},
                        "vertices": [{"stabilizer": [{"dihedral": [0, 1]}]}, {"stabilizer": [{"dihedral": [1, 1]}]}],
                        "simplices": [{"dim": 1, "vertices": [[0, {"dihedral": [0, 0]}], [1, {"dihedral": [0, 0]}]]}]},
            "odometer": {"group": {"family": "infinite_dihedral"}, "odometer_indices": [2, 4], "truncation_level": 2}}"#,
    );
    let o = hk(&["crosscheck", "--input", tree.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn deterministic_json() {
    let args = ["hatted", "--preset", "scarparo-2k", "--levels", "4", "--max-degree", "3", "--format", "json"];
    let a = hk(&args);
    let b = hk(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(hk(&seq).stdout, a.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["m"], 1);
}

#[test]
fn budget_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_hk"))
        .args(["homology", "--preset", "cyclic-point-3", "--levels", "1"])
        .env("HK_BUDGET", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}
