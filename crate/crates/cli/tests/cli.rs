use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gsqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsqc"))
        .args(args)
        .output()
        .expect("gsqc runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Writes a bundled example into `dir` and returns its path.
fn example(dir: &Path, args: &[&str]) -> PathBuf {
    let mut full = vec!["example"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", dir.to_str().unwrap()]);
    let out = gsqc(&full);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    PathBuf::from(String::from_utf8(out.stdout).unwrap().trim())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_bell_writes_operator_and_summary() {
    let tmp = TempDir::new().unwrap();
    let bell = example(tmp.path(), &["bell"]);
    let out_dir = tmp.path().join("build");
    let out = gsqc(&["build", "--circuit", s(&bell), "--lambda", "1", "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = read_json(&out_dir.join("operator.json"));
    assert_eq!(summary["dim"], 36);
    assert_eq!(summary["num_qubits"], 2);
    assert_eq!(summary["num_steps"], 2);
    let mtx = fs::read_to_string(out_dir.join("operator.mtx")).unwrap();
    assert!(mtx.starts_with("%%MatrixMarket matrix coordinate complex general"));
    let nnz = summary["nnz"].as_u64().unwrap() as usize;
    assert!(mtx.contains(&format!("\n36 36 {nnz}\n")));
}

#[test]
fn input_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let out = gsqc(&["build", "--circuit", s(&tmp.path().join("missing.gsqc"))]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("cannot read circuit"));

    let bell = example(tmp.path(), &["bell"]);
    let out = gsqc(&["build", "--circuit", s(&bell), "--lambda", "1.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("lambda"));

    let out = gsqc(&["gap-scan", "--circuit", s(&bell), "--grid", "0:1:0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("grid"));

    let bad = tmp.path().join("bad.gsqc");
    fs::write(&bad, "qubits 1\nstep FOO 0\n").unwrap();
    let out = gsqc(&["build", "--circuit", s(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"));

    let out = gsqc(&["evolve", "--circuit", s(&bell)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--T"));
}

#[test]
fn gap_scan_single_qubit_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    let c = example(tmp.path(), &["identity", "--n", "7"]);
    let out_dir = tmp.path().join("scan");
    let out = gsqc(&["gap-scan", "--circuit", s(&c), "--grid", "0:1:101", "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = read_json(&out_dir.join("gap_profile.json"));
    let theta = std::f64::consts::PI / 8.0;
    let l = summary["lambda_star"].as_f64().unwrap();
    let g = summary["min_gap"].as_f64().unwrap();
    assert!((l - theta.cos()).abs() <= 1e-3, "lambda* {l}");
    assert!((g - theta.sin().powi(2)).abs() <= 1e-6, "gap {g}");
    let csv = fs::read_to_string(out_dir.join("gap_profile.csv")).unwrap();
    assert!(csv.starts_with("s,lambda,E0,E1,gap,method,refined\n"));
    assert!(csv.lines().count() > 101);
}

#[test]
fn family_sweep_writes_fit_table() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("family");
    let out = gsqc(&[
        "gap-scan",
        "--family",
        "bell-disentangle",
        "--stage",
        "middle",
        "--n-range",
        "4:8",
        "--grid",
        "0:1:21",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(out_dir.join("family_middle.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "N,inv_N2,min_gap,lambda_star");
    assert_eq!(lines.len(), 6);
    let summary = read_json(&out_dir.join("family_middle.json"));
    assert!(summary["fit"]["slope"].as_f64().unwrap() > 0.0);
    assert!(summary["fit"]["r_squared"].as_f64().unwrap() > 0.0);
    assert!(!out_dir.join("family_before.csv").exists());
}

#[test]
fn evolve_reports_fidelity_and_dt_errors() {
    let tmp = TempDir::new().unwrap();
    let dj = example(tmp.path(), &["deutsch-jozsa"]);
    // N = 3, T = 30 N²
    let slow = tmp.path().join("slow");
    let out = gsqc(&["evolve", "--circuit", s(&dj), "--schedule", "gap-adapted", "--T", "270", "--out", s(&slow)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary = read_json(&slow.join("trace.json"));
    assert!(summary["final_fidelity"].as_f64().unwrap() >= 0.9);
    let trace = fs::read_to_string(slow.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,s,lambda,fidelity,energy,norm\n"));
    assert_eq!(trace.lines().count(), 202);

    let fast = tmp.path().join("fast");
    let out = gsqc(&["evolve", "--circuit", s(&dj), "--T", "0.01", "--out", s(&fast)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(read_json(&fast.join("trace.json"))["final_fidelity"].as_f64().unwrap() < 0.5);

    let out = gsqc(&["evolve", "--circuit", s(&dj), "--T", "1", "--dt", "1", "--out", s(&fast)]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("use dt <="));
}

#[test]
fn evolve_can_save_the_final_state() {
    let tmp = TempDir::new().unwrap();
    let dj = example(tmp.path(), &["deutsch-jozsa"]);
    let out_dir = tmp.path().join("state");
    let out = gsqc(&[
        "evolve", "--circuit", s(&dj), "--schedule", "linear", "--T", "5", "--save-state", "--out", s(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let bin = fs::read(out_dir.join("final_state.bin")).unwrap();
    assert_eq!(&bin[..8], b"GSQCSTV1");
    assert_eq!(bin.len(), 32 + 16 * 8);
    let sidecar = read_json(&out_dir.join("final_state.json"));
    assert_eq!(sidecar["dim"], 8);
    assert!((sidecar["raw_norm"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn verify_passes_on_bell_and_cnot_free_circuits() {
    let tmp = TempDir::new().unwrap();
    let bell = example(tmp.path(), &["bell"]);
    let out_dir = tmp.path().join("verify");
    let out = gsqc(&["verify", "--circuit", s(&bell), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_json(&out_dir.join("verify.json"));
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    let value = |name: &str| {
        checks.iter().find(|c| c["name"] == name).unwrap()["value"]
            .as_f64()
            .unwrap()
    };
    assert!(value("residual") <= 1e-10);
    assert!(value("oracle_fidelity") <= 1e-8);

    let random = tmp.path().join("random3.gsqc");
    fs::write(
        &random,
        "qubits 3\n\
         step U(0.6,0,0.8,0,0.8,0,-0.6,0) 0, T 1, H 2\n\
         step S 0, PHASE(0.7) 1, Y 2\n\
         step H 0, X 1, U(0,0.6,0.8,0,-0.8,0,0,-0.6) 2\n",
    )
    .unwrap();
    let out = gsqc(&["verify", "--circuit", s(&random), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn verify_flags_a_corrupted_operator() {
    let tmp = TempDir::new().unwrap();
    let bell = example(tmp.path(), &["bell"]);
    let build_dir = tmp.path().join("build");
    assert_eq!(code(&gsqc(&["build", "--circuit", s(&bell), "--out", s(&build_dir)])), 0);
    let mtx_path = build_dir.join("operator.mtx");
    let mtx = fs::read_to_string(&mtx_path).unwrap();
    let mut lines: Vec<String> = mtx.lines().map(String::from).collect();
    let fields: Vec<&str> = lines[3].split_whitespace().collect();
    let bumped = fields[2].parse::<f64>().unwrap() + 0.5;
    lines[3] = format!("{} {} {:.16e} {}", fields[0], fields[1], bumped, fields[3]);
    fs::write(&mtx_path, lines.join("\n") + "\n").unwrap();

    let out = gsqc(&[
        "verify", "--circuit", s(&bell), "--operator", s(&mtx_path), "--out", s(&tmp.path().join("v")),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("residual"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let bell = example(tmp.path(), &["bell"]);
    let run = |dir: &str| {
        let d = tmp.path().join(dir);
        let args = [
            "gap-scan", "--circuit", s(&bell), "--grid", "0:1:11", "--method", "lanczos", "--seed", "5", "--out", s(&d),
        ];
        assert_eq!(code(&gsqc(&args)), 0);
        let e = tmp.path().join(format!("{dir}-evolve"));
        let args = ["evolve", "--circuit", s(&bell), "--T", "3", "--out", s(&e)];
        assert_eq!(code(&gsqc(&args)), 0);
        [
            fs::read(d.join("gap_profile.csv")).unwrap(),
            fs::read(d.join("gap_profile.json")).unwrap(),
            fs::read(e.join("trace.csv")).unwrap(),
            fs::read(e.join("trace.json")).unwrap(),
        ]
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn config_file_values_yield_to_flags() {
    let tmp = TempDir::new().unwrap();
    let bell = example(tmp.path(), &["bell"]);
    let out_dir = tmp.path().join("cfg");
    let conf = tmp.path().join("run.conf");
    fs::write(
        &conf,
        format!("# bell at half coupling\ncircuit = {}\nlambda = 0.5\nout = {}\n", s(&bell), s(&out_dir)),
    )
    .unwrap();
    let out = gsqc(&["build", "--config", s(&conf)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_json(&out_dir.join("operator.json"))["lambda"], 0.5);

    let out = gsqc(&["build", "--config", s(&conf), "--lambda", "0.25"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_json(&out_dir.join("operator.json"))["lambda"], 0.25);
    let recorded = fs::read_to_string(out_dir.join("run.conf")).unwrap();
    assert!(recorded.contains("lambda = 0.25"));

    fs::write(&conf, "lambda = 2\n").unwrap();
    assert_eq!(code(&gsqc(&["build", "--config", s(&conf), "--circuit", s(&bell)])), 2);
}

#[test]
fn examples_parse_back() {
    let out = gsqc(&["example", "bell-disentangle", "--n", "7", "--stage", "after"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name bell-disentangle"));
    assert_eq!(text.lines().filter(|l| l.starts_with("step")).count(), 7);
    assert_eq!(code(&gsqc(&["example", "bell-disentangle", "--n", "3"])), 2);
}
