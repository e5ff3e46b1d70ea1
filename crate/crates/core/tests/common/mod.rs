#![allow(dead_code)]

use gsqc_core::catalog::{self, Stage};
use gsqc_core::circuit::{Gate1Q, Operation, Step};
use gsqc_core::{parse_circuit, Circuit};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `e^{iα} [[a, -b*], [b, a*]]` with `|a|² + |b|² = 1`.
pub fn random_unitary(rng: &mut impl Rng) -> Gate1Q {
    let mut v: [f64; 4] = [0.0; 4];
    for x in &mut v {
        *x = rng.gen::<f64>() * 2.0 - 1.0;
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = Complex64::new(v[0] / n, v[1] / n);
    let b = Complex64::new(v[2] / n, v[3] / n);
    let ph = Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU);
    Gate1Q::custom([[ph * a, -ph * b.conj()], [ph * b, ph * a.conj()]]).unwrap()
}

pub fn random_single_qubit(n: usize, rng: &mut impl Rng) -> Circuit {
    let steps = (0..n)
        .map(|_| Step::new(vec![Operation::single(0, random_unitary(rng))]))
        .collect();
    Circuit::new(format!("random-1q-{n}"), 1, steps).unwrap()
}

/// Random CNOT-free circuit.
pub fn random_product(m: usize, n: usize, rng: &mut impl Rng) -> Circuit {
    let steps = (0..n)
        .map(|_| Step::new((0..m).map(|q| Operation::single(q, random_unitary(rng))).collect()))
        .collect();
    Circuit::new(format!("random-product-{m}x{n}"), m, steps).unwrap()
}

const REVERSED: &str = "name reversed-cnots
qubits 2
step X 0, H 1
step CNOT 1 0
step T 0, S 1
step CNOT 0 1
";

const GHZ: &str = "name ghz3
qubits 3
step H 0, I 1, I 2
step CNOT 0 1, I 2
step I 0, CNOT 1 2
";

const MIXED3: &str = "name mixed3
qubits 3
step H 0, X 1, H 2
step CNOT 0 2, T 1
step CNOT 1 0, S 2
step Y 0, PHASE(0.7) 1, Z 2
";

const LONG2: &str = "name long2
qubits 2
step H 0, I 1
step T 0, X 1
step CNOT 0 1
step S 0, H 1
step I 0, T 1
step CNOT 1 0
step H 0, S 1
step T 0, T 1
step CNOT 0 1
step H 0, I 1
";

/// Circuits with `M <= 3`, `N <= 10`, `D <= 1000`; six carry CNOTs.
pub fn corpus() -> Vec<Circuit> {
    let mut r = rng(7);
    vec![
        catalog::deutsch_jozsa(false),
        catalog::deutsch_jozsa(true),
        catalog::identity_chain(5).unwrap(),
        random_single_qubit(8, &mut r),
        random_product(3, 3, &mut r),
        catalog::bell(),
        catalog::bell_disentangle(6, Stage::Middle).unwrap(),
        parse_circuit(REVERSED).unwrap(),
        parse_circuit(GHZ).unwrap(),
        parse_circuit(MIXED3).unwrap(),
        parse_circuit(LONG2).unwrap(),
    ]
}
