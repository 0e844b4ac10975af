use std::path::Path;
use std::process::{Command, Output};

use steerkit::expsim::{expected_counts, simulate_counts, CountsTable, DetectorConfig, ExperimentReport};
use steerkit::qmat::psi_plus;
use steerkit::states::{bowles_one_way_predicate, family_state, FamilyParams, ThetaFamilyParams};
use steerkit::DensityMatrix;

fn steerkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steerkit"))
        .args(args)
        .env_remove("STEERKIT_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_state(dir: &Path, name: &str, rho: &DensityMatrix) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&rho.to_json()).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classify_examples() {
    let out = steerkit(&["classify", "--family", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["label"], "TWO_WAY_STEERABLE");

    let out = steerkit(&["classify", "--family", "0.2,0.5"]);
    assert_eq!(json(&out)["label"], "SEPARABLE");

    let out = steerkit(&["classify", "--family", "0.43,0.85", "--mesh", "14"]);
    assert_eq!(out.status.code(), Some(0));
    let label = json(&out)["label"].as_str().unwrap().to_string();
    assert!(
        ["ONE_WAY_A_TO_B", "ONE_WAY_B_TO_A", "INDETERMINATE"].contains(&label.as_str()),
        "{label}"
    );
}

#[test]
fn radius_files_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mixed = write_state(dir.path(), "mixed.json", &DensityMatrix::maximally_mixed(4));
    let out = steerkit(&["radius", &mixed, "--mesh", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let b = json(&out);
    assert!(b["lo"].as_f64().unwrap() >= 1.0);
    assert!(b["hi"].is_null());
    assert!(b["certificate_margin"].is_null());
    assert!(b["lhs_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(b["direction"], "AtoB");

    let singlet = write_state(dir.path(), "singlet.json", &DensityMatrix::pure(&psi_plus()).unwrap());
    let out = steerkit(&["radius", &singlet, "--mesh", "6", "--direction", "btoa"]);
    let b = json(&out);
    assert!(b["lo"].as_f64().unwrap() <= 0.5 && 0.5 <= b["hi"].as_f64().unwrap());
    assert!(b["certificate_margin"].as_f64().unwrap() >= 1e-9);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = steerkit(&["radius", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = steerkit(&["radius", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let non_psd = dir.path().join("neg.json");
    std::fs::write(
        &non_psd,
        r#"{"dim":2,"re":[[1.5,0],[0,-0.5]],"im":[[0,0],[0,0]]}"#,
    )
    .unwrap();
    assert_eq!(steerkit(&["radius", non_psd.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exit_code_matrix() {
    assert_eq!(steerkit(&["classify", "--family", "1,0", "--mesh", "20"]).status.code(), Some(2));
    assert_eq!(steerkit(&["classify", "--family", "1.5,0"]).status.code(), Some(2));
    assert_eq!(steerkit(&["classify", "--family", "1,0", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(steerkit(&["frobnicate"]).status.code(), Some(2));
    // too few pivots to solve even the product-state probe
    assert_eq!(
        steerkit(&["radius", "--family", "1,0", "--max-iterations", "1"]).status.code(),
        Some(4)
    );
    let strict = steerkit(&["classify", "--family", "0.43,0.85", "--mesh", "6", "--strict"]);
    assert_eq!(strict.status.code(), Some(3));
    assert_eq!(json(&strict)["label"], "INDETERMINATE");
    assert_eq!(
        steerkit(&["classify", "--family", "1,0", "--strict"]).status.code(),
        Some(0)
    );
}

#[test]
fn region_shape() {
    let out = steerkit(&["region", "--p-steps", "11", "--r-steps", "11", "--mesh", "6", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,r,verdict_ab,verdict_ba,label"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 121);
    let label = |p: &str, r: &str| rows.iter().find(|x| x[0] == p && x[1] == r).unwrap()[4].clone();
    assert_eq!(label("0.3", "0"), "SEPARABLE");
    assert_ne!(label("0.4", "0"), "SEPARABLE");
    assert!(rows.iter().filter(|x| x[0] == "1").all(|x| x[4] == "TWO_WAY_STEERABLE"));
}

#[test]
fn simulate_reproducible_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| {
        vec![
            "simulate".to_string(),
            "--seed".into(),
            "3".into(),
            "--mesh".into(),
            "6".into(),
            "--bisection-steps".into(),
            "6".into(),
            "--variations".into(),
            "5".into(),
            "-o".into(),
            dir.path().join(out).to_str().unwrap().into(),
        ]
    };
    let run = |out: &str, threads: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_steerkit"))
            .args(args(out))
            .env("STEERKIT_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "2");
    assert_eq!(a, b);
    let c = run("c.json", "0");
    assert_eq!(a, c);
}

#[test]
fn simulate_without_imbalance_recovers_inputs() {
    let out = steerkit(&[
        "simulate", "--alpha", "1.0", "--mesh", "6", "--bisection-steps", "6", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep: ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
    let t = &rep.tomography;
    assert!((t.retrieved.p - 0.36875).abs() <= 2.0 * t.bootstrap_sigma_p);
    assert!((t.retrieved.r - 0.95).abs() <= 2.0 * t.bootstrap_sigma_r);
    assert_eq!(t.per_resample.len(), 20);
}

#[test]
fn tomo_on_dumped_and_synthetic_counts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("counts.csv");
    let out = steerkit(&[
        "simulate", "--mesh", "6", "--bisection-steps", "4", "--variations", "3",
        "--dump-counts", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("counts.json").exists());
    let out = steerkit(&["tomo", csv.to_str().unwrap(), "--mesh", "6", "--target", "0.4078,0.859"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["fidelity_to_target"].as_f64().unwrap() >= 0.95);
    assert!(v["verdict"]["label"].is_string());
    assert_eq!(v["sidecar"]["duration_s"], 20.0);

    // Poisson counts from the target itself at the nominal statistics
    let target = family_state(FamilyParams::new(0.4078, 0.859).unwrap());
    let noisy = dir.path().join("noisy.csv");
    simulate_counts(&target, &DetectorConfig::default(), 20.0, 8)
        .unwrap()
        .save(&noisy, 1.106, 8)
        .unwrap();
    let out = steerkit(&["tomo", noisy.to_str().unwrap(), "--mesh", "6", "--target", "0.4078,0.859"]);
    assert!(json(&out)["fidelity_to_target"].as_f64().unwrap() >= 0.99);

    // noiseless counts, scaled up so rounding is negligible
    let rho = family_state(FamilyParams::new(0.4, 0.8).unwrap());
    let mean = expected_counts(&rho, &DetectorConfig::default(), 1e10).unwrap();
    let table = CountsTable {
        counts: mean.map(|row| row.map(|m| m.round() as u64)),
        duration_s: 1e10,
    };
    let exact = dir.path().join("exact.csv");
    table.save(&exact, 1.0, 0).unwrap();
    let out = steerkit(&["certify-file", exact.to_str().unwrap(), "--mesh", "6", "--variations", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["retrieved"]["p"].as_f64().unwrap() - 0.4).abs() < 1e-6);
    assert!((v["retrieved"]["r"].as_f64().unwrap() - 0.8).abs() < 1e-6);

    let text = std::fs::read_to_string(&exact).unwrap();
    let missing = dir.path().join("missing.csv");
    let mut lines: Vec<&str> = text.lines().collect();
    lines.remove(7);
    std::fs::write(&missing, lines.join("\n")).unwrap();
    assert_eq!(steerkit(&["tomo", missing.to_str().unwrap()]).status.code(), Some(2));

    let unknown = dir.path().join("unknown.csv");
    std::fs::write(&unknown, text.replacen("X0,X0", "W0,X0", 1)).unwrap();
    assert_eq!(steerkit(&["tomo", unknown.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bowles_csv() {
    let out = steerkit(&["bowles", "--theta-steps", "5", "--p-steps", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,p,predicted"));
    let rows: Vec<(f64, f64, bool)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 55);
    let quarter = std::f64::consts::FRAC_PI_4;
    assert!(rows.iter().filter(|r| r.0 == quarter).all(|r| !r.2));
    assert!(rows.iter().filter(|r| r.1 == 0.5).all(|r| !r.2));
    assert!(!bowles_one_way_predicate(ThetaFamilyParams::new(0.05, 0.9).unwrap()));
}
