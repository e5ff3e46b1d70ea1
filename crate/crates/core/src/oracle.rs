//! Plain statevector simulation of a circuit, used as ground truth for the
//! final-row readout of the clock ground state.

use num_complex::Complex64;

use crate::circuit::{validate, Circuit, Matrix2, Operation, Step};
use crate::error::{Error, Result};

/// `2^M` amplitudes, qubit 0 as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitState {
    pub amplitudes: Vec<Complex64>,
}

impl CircuitState {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, amplitudes: &[Complex64]) -> f64 {
        self.amplitudes
            .iter()
            .zip(amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

fn apply_single(state: &mut [Complex64], num_qubits: usize, qubit: usize, u: &Matrix2) {
    let bit = 1usize << (num_qubits - 1 - qubit);
    for i in 0..state.len() {
        if i & bit == 0 {
            let (a0, a1) = (state[i], state[i | bit]);
            state[i] = u[0][0] * a0 + u[0][1] * a1;
            state[i | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

fn apply_cnot(state: &mut [Complex64], num_qubits: usize, control: usize, target: usize) {
    let cbit = 1usize << (num_qubits - 1 - control);
    let tbit = 1usize << (num_qubits - 1 - target);
    for i in 0..state.len() {
        if i & cbit != 0 && i & tbit == 0 {
            state.swap(i, i | tbit);
        }
    }
}

fn apply_step(state: &mut [Complex64], num_qubits: usize, step: &Step) {
    for op in &step.ops {
        match op {
            Operation::Single { qubit, gate } => apply_single(state, num_qubits, *qubit, gate.matrix()),
            Operation::Cnot { control, target } => apply_cnot(state, num_qubits, *control, *target),
        }
    }
}

fn check(circuit: &Circuit) -> Result<()> {
    let v = validate(circuit);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidCircuit(v))
    }
}

/// Applies every layer of `circuit` to `state`.
pub fn apply_circuit(circuit: &Circuit, state: &CircuitState) -> Result<CircuitState> {
    check(circuit)?;
    if state.amplitudes.len() != 1 << circuit.num_qubits {
        return Err(Error::Precondition(format!(
            "state has {} amplitudes, circuit acts on {} qubit(s)",
            state.amplitudes.len(),
            circuit.num_qubits
        )));
    }
    let mut amps = state.amplitudes.clone();
    for step in &circuit.steps {
        apply_step(&mut amps, circuit.num_qubits, step);
    }
    Ok(CircuitState { amplitudes: amps })
}

/// `U_N ... U_1 |0...0>`.
pub fn simulate(circuit: &Circuit) -> Result<CircuitState> {
    apply_circuit(circuit, &CircuitState::zero(circuit.num_qubits))
}

/// States after `0..=N` layers.
pub fn step_trajectory(circuit: &Circuit) -> Result<Vec<CircuitState>> {
    check(circuit)?;
    let mut state = CircuitState::zero(circuit.num_qubits);
    let mut out = vec![state.clone()];
    for step in &circuit.steps {
        apply_step(&mut state.amplitudes, circuit.num_qubits, step);
        out.push(state.clone());
    }
    Ok(out)
}
