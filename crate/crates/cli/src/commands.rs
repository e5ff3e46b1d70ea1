use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use gsqc_core::adiabatic::{evolve_with, make_schedule, max_dt, ScheduleKind};
use gsqc_core::basis::final_row_conditional;
use gsqc_core::catalog::{self, Stage};
use gsqc_core::hamiltonian::build_hamiltonian_with;
use gsqc_core::io::{read_matrix_market, write_matrix_market, write_state, OperatorHeader, StateSidecar};
use gsqc_core::oracle::simulate;
use gsqc_core::spectral::{self, family_gap_sweep, gap_scan_seeded, FamilySweep, GapProfile};
use gsqc_core::{ground_state, parse_circuit, BasisIndex, Circuit, Execution, Lambda, Method, StateVector};

use crate::config::{Family, GridSpec, RunConfig, StageChoice, StepRange};
use crate::error::CliError;

pub const RESIDUAL_THRESHOLD: f64 = 1e-10;
pub const FIDELITY_THRESHOLD: f64 = 1e-8;
pub const HERMITICITY_THRESHOLD: f64 = 1e-12;

const SCAN_GRID: GridSpec = GridSpec::new(0.0, 1.0, 101);
const FAMILY_GRID: GridSpec = GridSpec::new(0.0, 1.0, 41);
const VERIFY_GRID: GridSpec = GridSpec::new(0.0, 1.0, 21);
const FAMILY_RANGE: StepRange = StepRange { lo: 4, hi: 12 };

fn load_circuit(cfg: &RunConfig) -> Result<Circuit, CliError> {
    let path = cfg
        .circuit
        .as_ref()
        .ok_or_else(|| CliError::Input("--circuit is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read circuit {}: {e}", path.display())))?;
    Ok(parse_circuit(&text)?)
}

/// Create the output directory and record the resolved configuration in it.
fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    write_file(&dir.join("run.conf"), cfg.to_text().as_bytes())?;
    Ok(dir)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json values serialize"));
}

fn lambda(cfg: &RunConfig) -> Result<Lambda, CliError> {
    Ok(Lambda::new(cfg.lambda.unwrap_or(1.0))?)
}

fn circuit_json(c: &Circuit) -> Value {
    json!({
        "name": c.name,
        "hash": c.hash_hex(),
        "num_qubits": c.num_qubits,
        "num_steps": c.num_steps(),
        "cnots": c.cnot_count(),
    })
}

fn scan(exec: Execution, cfg: &RunConfig, c: &Circuit, default_grid: GridSpec) -> Result<GapProfile, CliError> {
    let grid = cfg.grid.unwrap_or(default_grid).points()?;
    let refine = cfg.refine.unwrap_or(true) && grid.len() >= 3;
    let seed = cfg.seed.unwrap_or_else(|| c.seed());
    Ok(gap_scan_seeded(
        exec,
        c,
        &grid,
        refine,
        cfg.method.unwrap_or_default(),
        seed,
    )?)
}

/// `H(λ)` as Matrix Market plus a JSON header.
pub fn build(exec: Execution, cfg: &RunConfig) -> Result<(), CliError> {
    let c = load_circuit(cfg)?;
    let l = lambda(cfg)?;
    let basis = BasisIndex::for_circuit(&c)?;
    let h = build_hamiltonian_with(exec, &c, l, &basis)?;
    let header = OperatorHeader {
        circuit: c.name.clone(),
        circuit_hash: c.hash_hex(),
        num_qubits: c.num_qubits,
        num_steps: c.num_steps(),
        lambda: l.value(),
        energy_scale: 1.0,
        dim: basis.dim(),
        nnz: h.nnz(),
    };
    let dir = out_dir(cfg)?;
    let mut mtx = Vec::new();
    write_matrix_market(&h, &mut mtx)?;
    write_file(&dir.join("operator.mtx"), &mtx)?;
    let summary = serde_json::to_value(&header).expect("header serializes");
    write_json(&dir.join("operator.json"), &summary)?;
    print_json(&summary);
    Ok(())
}

fn family_json(family: Family, stage: Option<Stage>, grid: GridSpec, method: Method, sweep: &FamilySweep) -> Value {
    json!({
        "family": family.to_string(),
        "stage": stage.map(|s| s.to_string()),
        "grid": grid.to_string(),
        "method": method,
        "points": sweep.points,
        "fit": {
            "x": "1/N^2",
            "y": "min_gap",
            "slope": sweep.fit.slope,
            "intercept": sweep.fit.intercept,
            "r_squared": sweep.fit.r_squared,
        },
    })
}

/// Gap profile of one circuit, or a minimum-gap sweep over a family.
pub fn gap_scan(exec: Execution, cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(family) = cfg.family {
        return family_scan(exec, cfg, family);
    }
    let c = load_circuit(cfg)?;
    let profile = scan(exec, cfg, &c, SCAN_GRID)?;
    let dir = out_dir(cfg)?;
    write_file(&dir.join("gap_profile.csv"), profile.to_csv().as_bytes())?;
    let mut summary = profile.summary_json();
    summary["circuit_info"] = circuit_json(&c);
    write_json(&dir.join("gap_profile.json"), &summary)?;
    print_json(&summary);
    Ok(())
}

fn family_scan(exec: Execution, cfg: &RunConfig, family: Family) -> Result<(), CliError> {
    let grid_spec = cfg.grid.unwrap_or(FAMILY_GRID);
    let grid = grid_spec.points()?;
    let ns = cfg.n_range.unwrap_or(FAMILY_RANGE).values();
    let method = cfg.method.unwrap_or_default();
    let dir = out_dir(cfg)?;
    let runs: Vec<(Option<Stage>, String)> = match family {
        Family::Identity => vec![(None, "family_identity".into())],
        Family::BellDisentangle => cfg
            .stage
            .unwrap_or(StageChoice::All)
            .stages()
            .into_iter()
            .map(|s| (Some(s), format!("family_{s}")))
            .collect(),
    };
    let mut summaries = Vec::new();
    for (stage, stem) in runs {
        let sweep = match stage {
            None => family_gap_sweep(exec, catalog::identity_chain, &ns, &grid, method)?,
            Some(s) => family_gap_sweep(exec, |n| catalog::bell_disentangle(n, s), &ns, &grid, method)?,
        };
        write_file(&dir.join(format!("{stem}.csv")), sweep.to_csv().as_bytes())?;
        let summary = family_json(family, stage, grid_spec, method, &sweep);
        write_json(&dir.join(format!("{stem}.json")), &summary)?;
        summaries.push(summary);
    }
    print_json(&Value::Array(summaries));
    Ok(())
}

/// Integrate the Schrödinger equation along a schedule.
pub fn evolve(exec: Execution, cfg: &RunConfig, save_state: bool) -> Result<(), CliError> {
    let c = load_circuit(cfg)?;
    let total_time = cfg
        .total_time
        .ok_or_else(|| CliError::Input("--T is required".into()))?;
    let kind = cfg.schedule.unwrap_or(ScheduleKind::GapAdapted);
    let profile = match kind {
        ScheduleKind::GapAdapted => Some(scan(exec, cfg, &c, SCAN_GRID)?),
        _ => None,
    };
    let schedule = make_schedule(kind, total_time, profile.as_ref())?;
    let dt = match cfg.dt {
        Some(dt) => dt,
        None => max_dt(&c)?,
    };
    let trace = evolve_with(exec, &c, &schedule, dt)?;

    let dir = out_dir(cfg)?;
    write_file(&dir.join("trace.csv"), trace.to_csv().as_bytes())?;
    let mut summary = trace.summary_json();
    summary["circuit_hash"] = json!(c.hash_hex());
    summary["dt_requested"] = json!(dt);
    if let Some(p) = &profile {
        summary["min_gap"] = json!(p.min_gap);
        summary["lambda_star"] = json!(p.lambda_star);
    }
    write_json(&dir.join("trace.json"), &summary)?;

    if save_state {
        let basis = BasisIndex::for_circuit(&c)?;
        let mut state = StateVector {
            amplitudes: trace.final_state.clone(),
            basis,
            normalized: false,
            raw_norm: 1.0,
        };
        state.raw_norm = state.norm();
        let mut bytes = Vec::new();
        write_state(&state, &mut bytes)?;
        write_file(&dir.join("final_state.bin"), &bytes)?;
        let sidecar = StateSidecar::new(&state, Some(schedule.lambda_at(1.0)), Some(c.hash_hex()));
        write_json(
            &dir.join("final_state.json"),
            &serde_json::to_value(&sidecar).expect("sidecar serializes"),
        )?;
    }
    print_json(&summary);
    Ok(())
}

struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    pass: bool,
    note: Option<String>,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            threshold,
            pass: value <= threshold,
            note: None,
        }
    }

    fn json(&self) -> Value {
        json!({
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "pass": self.pass,
            "note": self.note,
        })
    }
}

fn load_operator(path: &Path, basis: &BasisIndex) -> Result<gsqc_core::OperatorMatrix, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot read operator {}: {e}", path.display())))?;
    let h = read_matrix_market(BufReader::new(file))?;
    if h.dim() != basis.dim() {
        return Err(CliError::Input(format!(
            "operator {} has dimension {} but the circuit needs {}",
            path.display(),
            h.dim(),
            basis.dim()
        )));
    }
    Ok(h)
}

/// Residual, readout and gap checks; exit code 1 names the failures.
pub fn verify(exec: Execution, cfg: &RunConfig) -> Result<(), CliError> {
    let c = load_circuit(cfg)?;
    let l = lambda(cfg)?;
    let basis = BasisIndex::for_circuit(&c)?;
    let h = match &cfg.operator {
        Some(path) => load_operator(path, &basis)?,
        None => build_hamiltonian_with(exec, &c, l, &basis)?,
    };
    let psi = ground_state(&c, l, &basis)?;
    let mut r = vec![Default::default(); h.dim()];
    h.apply_into(exec, &psi.amplitudes, &mut r);
    let residual = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut checks = vec![
        Check::at_most("residual", residual, RESIDUAL_THRESHOLD),
        Check::at_most("hermiticity", h.hermiticity_deviation(), HERMITICITY_THRESHOLD),
    ];

    let (final_state, source) = if basis.dim() <= spectral::DENSE_LIMIT {
        (spectral::dense_ground_state(&c, Lambda::new(1.0)?)?, "dense")
    } else {
        (ground_state(&c, Lambda::new(1.0)?, &basis)?, "recursion")
    };
    let row = final_row_conditional(&final_state)?;
    let fidelity = simulate(&c)?.fidelity(&row.amplitudes);
    let mut readout = Check::at_most("oracle_fidelity", 1.0 - fidelity, FIDELITY_THRESHOLD);
    readout.note = Some(format!("1 - fidelity, ground state at lambda = 1 from {source} solve"));
    checks.push(readout);

    let profile = scan(exec, cfg, &c, VERIFY_GRID)?;
    checks.push(Check {
        name: "gap",
        value: profile.min_gap,
        threshold: spectral::DEGENERACY_TOL,
        pass: profile.min_gap > spectral::DEGENERACY_TOL,
        note: Some("minimum gap must exceed the degeneracy tolerance".into()),
    });

    let failed: Vec<String> = checks
        .iter()
        .filter(|k| !k.pass)
        .map(|k| format!("{} = {:.3e} (threshold {:.1e})", k.name, k.value, k.threshold))
        .collect();
    let report = json!({
        "circuit": circuit_json(&c),
        "dim": basis.dim(),
        "lambda": l.value(),
        "operator": cfg.operator.as_ref().map(|p| p.display().to_string()),
        "checks": checks.iter().map(Check::json).collect::<Vec<_>>(),
        "gap": profile.summary_json(),
        "passed": failed.is_empty(),
    });
    let dir = out_dir(cfg)?;
    write_json(&dir.join("verify.json"), &report)?;
    print_json(&report);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}
