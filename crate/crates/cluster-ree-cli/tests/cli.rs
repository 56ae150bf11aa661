//! End-to-end tests of the command-line surface: verb outputs, exit codes,
//! stdin piping, byte determinism, and the generator round-trip.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use cluster_ree::{cluster_basis, FVector, HermitianMatrix};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cluster-ree"))
}

fn run_with_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn cluster-ree");
    child
        .stdin
        .as_mut()
        .expect("stdin")
        .write_all(stdin)
        .expect("write stdin");
    child.wait_with_output().expect("wait")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cluster_ree_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

fn write_state(name: &str, f: &FVector) -> PathBuf {
    let path = scratch(name);
    let doc = serde_json::json!({"F": f.values().to_vec()});
    std::fs::write(&path, format!("{doc}\n")).expect("write state");
    path
}

#[test]
fn ree_on_pure_cluster_state() {
    let path = write_state("pure.json", &FVector::basis(0));
    let out = bin()
        .args(["ree", "--input", path.to_str().unwrap()])
        .output()
        .expect("run");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json");
    assert_eq!(doc["E"], 1.0);
    assert_eq!(doc["region"], "A'");
    assert_eq!(doc["formula"], "E_A");
    assert_eq!(doc["class"], "I");
    assert_eq!(doc["closest"]["F"].as_array().unwrap().len(), 16);
}

#[test]
fn classify_uniform_state() {
    let path = write_state("uniform.json", &FVector::uniform());
    let out = bin()
        .args(["classify", "--input", path.to_str().unwrap()])
        .output()
        .expect("run");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json");
    assert_eq!(doc["biseparable"], true);
    assert_eq!(doc["region"], "D2");
    assert_eq!(doc["violated"].as_array().unwrap().len(), 0);
}

#[test]
fn gen_ree_pipeline() {
    let gen = bin()
        .args(["gen", "dephase", "--q", "0.1,0.1,0.1,0.1"])
        .output()
        .expect("run gen");
    assert!(gen.status.success());
    let out = run_with_stdin(&["ree", "--input", "-"], &gen.stdout);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json");
    let e = doc["E"].as_f64().unwrap();
    assert!((e - 0.0793).abs() < 1e-3, "E = {e}");
    assert_eq!(doc["region"], "A'");
    // Nats conversion at the boundary.
    let out = run_with_stdin(&["ree", "--input", "-", "--nats"], &gen.stdout);
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json");
    let nats = doc["E"].as_f64().unwrap();
    assert!((nats - e * std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn gen_output_round_trips_unchanged() {
    let gen = bin()
        .args(["gen", "dephase", "--q", "0.13,0.07,0.21,0.4"])
        .output()
        .expect("run gen");
    assert!(gen.status.success());
    let text = String::from_utf8(gen.stdout.clone()).expect("utf8");
    let parsed: FVector = serde_json::from_str(&text).expect("validate on parse");
    let reserialized = format!("{}\n", serde_json::json!({"F": parsed.values().to_vec()}));
    assert_eq!(text, reserialized, "round-trip must be byte-exact");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["sample", "--seed", "5", "--region", "B", "--n", "3"];
    let a = bin().args(args).output().expect("run");
    let b = bin().args(args).output().expect("run");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sample_targets_regions() {
    let out = bin()
        .args(["sample", "--seed", "11", "--region", "C2"])
        .output()
        .expect("run");
    assert!(out.status.success());
    let classify = run_with_stdin(&["classify", "--input", "-"], &out.stdout);
    let doc: Value = serde_json::from_slice(&classify.stdout).expect("json");
    assert_eq!(doc["region"], "C2");
    assert_eq!(doc["biseparable"], false);

    let out = bin()
        .args(["sample", "--seed", "3", "--region", "B", "--half", "second"])
        .output()
        .expect("run");
    let classify = run_with_stdin(&["classify", "--input", "-"], &out.stdout);
    let doc: Value = serde_json::from_slice(&classify.stdout).expect("json");
    assert_eq!(doc["region"], "B");
    assert_eq!(doc["half"], "second");
}

#[test]
fn twirl_projector_density_matrix() {
    let rho = HermitianMatrix::projector(&cluster_basis()[9]);
    let path = scratch("rho.json");
    std::fs::write(&path, serde_json::to_string(&rho).expect("serialize")).expect("write");
    let out = bin()
        .args(["twirl", "--input", path.to_str().unwrap()])
        .output()
        .expect("run");
    assert!(out.status.success());
    let f: FVector = serde_json::from_slice(&out.stdout).expect("fvector");
    assert!((f[9] - 1.0).abs() < 1e-12);
}

#[test]
fn verify_single_state() {
    let path = write_state("verify_one.json", &FVector::uniform());
    let out = bin()
        .args(["verify", "--input", path.to_str().unwrap(), "--tol", "1e-5"])
        .output()
        .expect("run");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json");
    assert_eq!(doc["E_analytic"], 0.0);
    assert!(doc["E_oracle"].as_f64().unwrap() <= 1e-5);
    assert!(doc["feasibility_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn verify_batch_generates_corpus_and_rows() {
    let corpus = scratch("corpus.jsonl");
    let out = bin()
        .args([
            "verify",
            "--batch",
            corpus.to_str().unwrap(),
            "--seed",
            "42",
            "--n",
            "16",
            "--tol",
            "1e-5",
        ])
        .output()
        .expect("run");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let corpus_text = std::fs::read_to_string(&corpus).expect("corpus written");
    assert_eq!(corpus_text.lines().count(), 16);
    let rows: Vec<Value> = String::from_utf8(out.stdout)
        .expect("utf8")
        .lines()
        .map(|l| serde_json::from_str(l).expect("row"))
        .collect();
    assert_eq!(rows.len(), 16);
    for row in &rows {
        assert!(row["abs_diff"].as_f64().unwrap() <= 1e-4);
    }
    // Re-reading the corpus file reproduces the same verification rows.
    let out2 = bin()
        .args([
            "verify",
            "--batch",
            corpus.to_str().unwrap(),
            "--tol",
            "1e-5",
        ])
        .output()
        .expect("run");
    assert!(out2.status.success());
    assert_eq!(rows.len(), out2.stdout.iter().filter(|&&b| b == b'\n').count());
}

#[test]
fn regions_emits_grid_and_boundaries() {
    let csv_path = scratch("grid.csv");
    let json_path = scratch("boundaries.json");
    let out_spec = format!(
        "{},{}",
        csv_path.to_str().unwrap(),
        json_path.to_str().unwrap()
    );
    let out = bin()
        .args(["regions", "--p0", "0.3", "--res", "50", "--out", &out_spec])
        .output()
        .expect("run");
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).expect("csv");
    assert!(csv.starts_with("x,y,label\n"));
    assert_eq!(csv.lines().count(), 1 + 50 * 50);
    assert!(csv.contains(",D2\n"));
    let bounds: Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).expect("json")).expect("parse");
    assert_eq!(bounds["view"], "p3-p7");
    let x = bounds["intersections"]["pab_diag"].as_f64().unwrap();
    assert!((x - 0.2).abs() < 1e-12);
    let names: Vec<&str> = bounds["boundaries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"p7=p_AB"));
    assert!(names.contains(&"p7=p3"));
}

#[test]
fn bisep_surface_emits_labels() {
    let out = bin()
        .args(["bisep-surface", "--l0", "0.2", "--res", "10"])
        .output()
        .expect("run");
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).expect("utf8");
    assert!(csv.starts_with("l3,l7,l4,label\n"));
    assert!(csv.contains("0.3,0.3,0,III\n"));
    assert!(csv.contains("interior"));
    assert!(csv.contains("infeasible"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin()
        .args(["classify", "--input", "-", "--bogus"])
        .output()
        .expect("run");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_one_with_json_stderr() {
    let out = run_with_stdin(&["classify", "--input", "-"], b"{\"F\": [0.5, 0.6]}");
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr json");
    assert!(err["error"].is_string());
    assert!(err["message"].is_string());
}

#[test]
fn verify_requires_input_or_batch() {
    let out = bin().args(["verify"]).output().expect("run");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn env_var_overrides_solver_tolerance() {
    let path = write_state("verify_env.json", &FVector::basis(0));
    let out = bin()
        .args(["verify", "--input", path.to_str().unwrap()])
        .env("CLUSTER_ENT_TOL", "1e-4")
        .output()
        .expect("run");
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json");
    let gap = doc["gap"].as_f64().unwrap();
    assert!(gap <= 1e-4, "gap {gap} above the requested tolerance");
    assert!(gap > 1e-6, "gap {gap} tighter than the env override implies");
    // The explicit flag wins over the environment.
    let out = bin()
        .args(["verify", "--input", path.to_str().unwrap(), "--tol", "1e-6"])
        .env("CLUSTER_ENT_TOL", "1e-4")
        .output()
        .expect("run");
    let doc: Value = serde_json::from_slice(&out.stdout).expect("json");
    assert!(doc["gap"].as_f64().unwrap() <= 1e-6);
}
