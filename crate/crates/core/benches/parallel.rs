//! Sequential against rayon execution for the batch loops: sparse products,
//! Hamiltonian assembly, λ-grid gap scans and family sweeps.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gsqc_core::catalog::{self, Stage};
use gsqc_core::hamiltonian::build_hamiltonian_with;
use gsqc_core::spectral::{family_gap_sweep, gap_scan_with, lambda_grid};
use gsqc_core::{initial_state, parse_circuit, BasisIndex, Circuit, Execution, Lambda, Method};
use num_complex::Complex64;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

/// Three qubits, two CNOTs, D = 4096 at N = 7.
fn three_qubit(n: usize) -> Circuit {
    let mut text = String::from("qubits 3\nstep H 0, I 1, I 2\nstep CNOT 0 1, I 2\nstep I 0, CNOT 1 2\n");
    for k in 3..n {
        let g = if k % 2 == 0 { "H" } else { "T" };
        text.push_str(&format!("step {g} 0, S 1, {g} 2\n"));
    }
    parse_circuit(&text).unwrap()
}

fn matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("matvec");
    for n in [5, 7] {
        let circuit = three_qubit(n);
        let basis = BasisIndex::for_circuit(&circuit).unwrap();
        let h = build_hamiltonian_with(Execution::Sequential, &circuit, Lambda::new(0.7).unwrap(), &basis).unwrap();
        let x = initial_state(&basis).amplitudes;
        let mut y = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, basis.dim()), &x, |b, x| {
                b.iter(|| h.apply_into(exec, black_box(x), &mut y))
            });
        }
    }
    group.finish();
}

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assembly");
    let circuit = three_qubit(7);
    let basis = BasisIndex::for_circuit(&circuit).unwrap();
    let lambda = Lambda::new(0.7).unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| build_hamiltonian_with(exec, black_box(&circuit), lambda, &basis).unwrap())
        });
    }
    group.finish();
}

fn gap_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("gap_scan");
    group.sample_size(10);
    let circuit = catalog::bell_disentangle(8, Stage::Middle).unwrap();
    let grid = lambda_grid(0.0, 1.0, 21).unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| gap_scan_with(exec, black_box(&circuit), &grid, false, Method::Dense).unwrap())
        });
    }
    group.finish();
}

fn family_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("family_sweep");
    group.sample_size(10);
    let grid = lambda_grid(0.0, 1.0, 11).unwrap();
    let ns: Vec<usize> = (3..=12).collect();
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| family_gap_sweep(exec, catalog::identity_chain, black_box(&ns), &grid, Method::Dense).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, matvec, assembly, gap_scan, family_sweep);
criterion_main!(benches);
