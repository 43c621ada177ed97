use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn mcalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcalg"))
        .args(args)
        .env_remove("MCALG_WINDOW")
        .output()
        .expect("binary runs")
}

fn fx(name: &str) -> String {
    fixture(name).display().to_string()
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("JSON output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn mc_check_accepts_hopf_tau() {
    let out = mcalg(&["mc-check", &fx("s3.json"), &fx("pi-s2.json"), &fx("hopf-tau.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out.stdout)["mc"], Value::Bool(true));
}

#[test]
fn mc_check_rejects_non_mc_element() {
    // c ↦ x in Hom(S², π(S²)) is MC only with the quadratic term vanishing;
    // on S²×S² the element a ↦ x, b ↦ x has residual on ab.
    let dir = scratch("nonmc");
    std::fs::create_dir_all(&dir).unwrap();
    let tau = dir.join("tau.json");
    let text = r#"{
  "basis": [{"degree": 2, "name": "a"}, {"degree": 2, "name": "b"}, {"degree": 4, "name": "ab"}],
  "format_version": 1,
  "kind": "mc_element",
  "maps": {"tau": [["1", "1", "0"], ["0", "0", "0"]]},
  "target_basis": [{"degree": 2, "name": "x"}, {"degree": 3, "name": "y"}],
  "window": {"arity_max": 4, "deg_max": 8, "deg_min": 0, "poly_bound": 8}
}"#;
    std::fs::write(&tau, text).unwrap();
    let out = mcalg(&["mc-check", &fx("s2xs2.json"), &fx("pi-s2.json"), &tau.display().to_string()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out.stdout);
    assert_eq!(v["mc"], Value::Bool(false));
    assert!(!v["residual"].as_array().unwrap().is_empty());
}

#[test]
fn hopf_one_and_two_are_distinct_with_verified_witness() {
    let cert = scratch("hopf12.json");
    let out = mcalg(&[
        "homotopic",
        &fx("s3.json"),
        &fx("s2.json"),
        &fx("hopf-1.json"),
        &fx("hopf-2.json"),
        "--certificate",
        &cert.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out.stdout)["verdict"], "DISTINCT");
    let check = mcalg(&["gauge-check", &cert.display().to_string()]);
    assert_eq!(check.status.code(), Some(0));
    let v = json_of(&check.stdout);
    assert_eq!(v["verified"], Value::Bool(true));
    assert_eq!(v["verdict"], "DISTINCT");
}

#[test]
fn tampered_witness_is_rejected() {
    let cert = scratch("tampered.json");
    let out = mcalg(&[
        "homotopic",
        &fx("s3.json"),
        &fx("s2.json"),
        &fx("hopf-1.json"),
        &fx("hopf-2.json"),
        "--certificate",
        &cert.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let f = v["maps"]["witness.functional"].as_array_mut().unwrap();
    for row in f.iter_mut() {
        for e in row.as_array_mut().unwrap() {
            *e = Value::from("0");
        }
    }
    std::fs::write(&cert, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let check = mcalg(&["gauge-check", &cert.display().to_string()]);
    assert_eq!(check.status.code(), Some(1));
}

#[test]
fn equal_maps_give_a_verified_path() {
    let cert = scratch("hopf11.json");
    let out = mcalg(&[
        "homotopic",
        &fx("s3.json"),
        &fx("s2.json"),
        &fx("hopf-1.json"),
        &fx("hopf-1.json"),
        "--certificate",
        &cert.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let check = mcalg(&["gauge-check", &cert.display().to_string()]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(json_of(&check.stdout)["verdict"], "EQUAL");
}

#[test]
fn corrupted_matrix_names_the_entry() {
    let out = mcalg(&["validate", &fx("corrupted.json")]);
    assert_eq!(out.status.code(), Some(2));
    let e = json_of(&out.stderr);
    assert_eq!(e["error"]["kind"], "parse");
    assert!(e["error"]["location"].as_str().unwrap().ends_with("maps.d[1][0]"));
}

#[test]
fn bundled_models_validate() {
    for name in ["s2.json", "s3.json", "cp2.json", "s2xs2.json", "s2vs3.json", "pi-s2.json", "pi-s3.json", "hopf-tau.json"] {
        let out = mcalg(&["validate", &fx(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn outputs_are_deterministic() {
    let a = scratch("det-a.json");
    let b = scratch("det-b.json");
    for p in [&a, &b] {
        mcalg(&[
            "homotopic",
            &fx("cp2.json"),
            &fx("cp2.json"),
            &fx("cp2-id.json"),
            &fx("cp2-deg2.json"),
            "--certificate",
            &p.display().to_string(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let t1 = mcalg(&["transfer", &fx("cp2.json")]);
    let t2 = mcalg(&["transfer", &fx("cp2.json"), "--sequential"]);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn window_flag_and_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_mcalg"))
        .args(["cobar", &fx("s2.json")])
        .env("MCALG_WINDOW", "5")
        .output()
        .unwrap();
    assert_eq!(json_of(&out.stdout)["window"]["deg_max"], 5);
    let out = Command::new(env!("CARGO_BIN_EXE_mcalg"))
        .args(["cobar", &fx("s2.json"), "--window", "6"])
        .env("MCALG_WINDOW", "5")
        .output()
        .unwrap();
    assert_eq!(json_of(&out.stdout)["window"]["deg_max"], 6);
}

#[test]
fn cobar_output_round_trips_through_validate_and_bar() {
    let out = mcalg(&["cobar", &fx("cp2.json"), "--window", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let path = scratch("cp2-cobar.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let v = mcalg(&["validate", &path.display().to_string(), "--window", "7"]);
    assert_eq!(v.status.code(), Some(0));
    let t = mcalg(&["transfer", &fx("cp2.json"), "--window", "7"]);
    let tpath = scratch("cp2-transfer.json");
    std::fs::write(&tpath, &t.stdout).unwrap();
    assert_eq!(mcalg(&["validate", &tpath.display().to_string()]).status.code(), Some(0));
    let b = mcalg(&["bar", &fx("pi-s2.json"), "--window", "6"]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(json_of(&b.stdout)["kind"], "cdgc");
}

#[test]
fn components_and_pi() {
    let out = mcalg(&["components", &fx("cp2.json"), &fx("pi-s2.json")]);
    let v = json_of(&out.stdout);
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    assert_eq!(v["exhaustive"], Value::Bool(true));
    let out = mcalg(&["components", &fx("s3.json"), &fx("pi-s2.json"), "--param", "c->y"]);
    let v = json_of(&out.stdout);
    assert_eq!(v["sampled"], Value::Bool(true));
    let out = mcalg(&["pi", &fx("s3.json"), &fx("pi-s2.json"), &fx("hopf-tau.json"), "--n", "1"]);
    assert_eq!(json_of(&out.stdout)["pi"]["dim"], 0);
}

#[test]
fn hopf_of_a_coalgebra_map() {
    let out = mcalg(&["hopf", &fx("cp2.json"), &fx("cp2.json"), &fx("cp2-deg2.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out.stdout);
    assert_eq!(v["kind"], "mc_element");
    assert!(v["data"]["fingerprint"].as_str().unwrap().len() == 64);
}
