//! Clock-encoded Hilbert space and the analytic ground state.
//!
//! Each qubit owns one particle living on a chain of rows `0..=N`, with a
//! spin `x ∈ {0, 1}` at every row, so the per-qubit space has dimension
//! `d = 2(N+1)`. The full space is the tensor product of the `M` chains.
//! Every chain holds exactly one particle and no term moves a particle
//! between chains, so a first-quantized tensor product reproduces all matrix
//! elements without fermionic signs.
//!
//! Ordering: qubit 0 is the most significant tensor factor, the local index
//! is `2 * row + spin`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Operation};
use crate::error::{Error, Result};

/// Bijection between per-qubit (row, spin) tuples and flat indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisIndex {
    num_qubits: usize,
    num_steps: usize,
    local_dim: usize,
    dim: usize,
}

impl BasisIndex {
    pub fn new(num_qubits: usize, num_steps: usize) -> Result<Self> {
        let overflow = Error::DimensionOverflow {
            num_qubits,
            num_steps,
        };
        if num_qubits == 0 {
            return Err(overflow);
        }
        let local_dim = 2 * (num_steps + 1);
        let dim = u32::try_from(num_qubits)
            .ok()
            .and_then(|m| local_dim.checked_pow(m))
            .filter(|&d| d <= 1 << 32)
            .ok_or(overflow)?;
        Ok(Self {
            num_qubits,
            num_steps,
            local_dim,
            dim,
        })
    }

    pub fn for_circuit(circuit: &Circuit) -> Result<Self> {
        Self::new(circuit.num_qubits, circuit.num_steps())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn local_index(row: usize, spin: usize) -> usize {
        2 * row + spin
    }

    /// Flat-index stride of qubit `q`'s tensor factor.
    pub fn stride(&self, qubit: usize) -> usize {
        self.local_dim.pow((self.num_qubits - 1 - qubit) as u32)
    }

    pub fn local(&self, flat: usize, qubit: usize) -> usize {
        (flat / self.stride(qubit)) % self.local_dim
    }

    pub fn row(&self, flat: usize, qubit: usize) -> usize {
        self.local(flat, qubit) / 2
    }

    pub fn spin(&self, flat: usize, qubit: usize) -> usize {
        self.local(flat, qubit) % 2
    }

    /// Flat index of a full configuration `[(row, spin); M]`.
    pub fn encode(&self, config: &[(usize, usize)]) -> Option<usize> {
        if config.len() != self.num_qubits {
            return None;
        }
        let mut flat = 0;
        for &(row, spin) in config {
            if row > self.num_steps || spin > 1 {
                return None;
            }
            flat = flat * self.local_dim + Self::local_index(row, spin);
        }
        Some(flat)
    }

    pub fn decode(&self, flat: usize) -> Vec<(usize, usize)> {
        (0..self.num_qubits)
            .map(|q| {
                let l = self.local(flat, q);
                (l / 2, l % 2)
            })
            .collect()
    }

    pub fn check_circuit(&self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits != self.num_qubits || circuit.num_steps() != self.num_steps {
            return Err(Error::BasisMismatch {
                basis_qubits: self.num_qubits,
                basis_steps: self.num_steps,
                circuit_qubits: circuit.num_qubits,
                circuit_steps: circuit.num_steps(),
            });
        }
        Ok(())
    }

    /// Flat index with qubit `q`'s local index replaced by `local`.
    pub(crate) fn with_local(&self, flat: usize, qubit: usize, local: usize) -> usize {
        let stride = self.stride(qubit);
        let old = (flat / stride) % self.local_dim;
        flat - old * stride + local * stride
    }
}

/// Coupling λ ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Lambda(f64);

impl Lambda {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::LambdaOutOfRange(value))
        }
    }

    /// Clamps into [0, 1]; for schedule evaluation where rounding can
    /// overshoot by an ulp.
    pub fn clamped(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Amplitudes over the clock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub basis: BasisIndex,
    /// Set when the vector was scaled to unit norm.
    pub normalized: bool,
    /// ℓ² norm before normalization (1 for states created normalized).
    pub raw_norm: f64,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Rescales to unit norm, keeping the old norm in `raw_norm`.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
        self.raw_norm = n;
        self.normalized = true;
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Every particle at row 0 with spin 0.
pub fn initial_state(basis: &BasisIndex) -> StateVector {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    StateVector {
        amplitudes,
        basis: *basis,
        normalized: true,
        raw_norm: 1.0,
    }
}

/// Zero-energy state of `H(λ)` built by the step recursion
/// `Ψ^j = Π (1 + hop_j) Ψ^{j-1}`, then normalized.
///
/// A single-qubit gate `U` at step `j` contributes the factor
/// `1 + C†_j (λU) C_{j-1}`; a CNOT contributes `λ²` times the pair hop with
/// the identity on the target for control spin 0 and `σ_x` for control
/// spin 1.
pub fn ground_state(circuit: &Circuit, lambda: Lambda, basis: &BasisIndex) -> Result<StateVector> {
    basis.check_circuit(circuit)?;
    let lam = lambda.value();
    let mut psi = initial_state(basis).amplitudes;
    for (j0, step) in circuit.steps.iter().enumerate() {
        let j = j0 + 1;
        for op in &step.ops {
            match op {
                Operation::Single { qubit, gate } => {
                    apply_single_hop(basis, &mut psi, *qubit, j, lam, gate.matrix());
                }
                Operation::Cnot { control, target } => {
                    apply_cnot_hop(basis, &mut psi, *control, *target, j, lam);
                }
            }
        }
    }
    let mut state = StateVector {
        amplitudes: psi,
        basis: *basis,
        normalized: false,
        raw_norm: 0.0,
    };
    state.normalize();
    Ok(state)
}

/// `ψ += C†_{A,j} (λU) C_{A,j-1} ψ`. Rows `>= j` of qubit A are empty before
/// the factor is applied, so the update can run in place.
fn apply_single_hop(
    basis: &BasisIndex,
    psi: &mut [Complex64],
    qubit: usize,
    step: usize,
    lam: f64,
    u: &[[Complex64; 2]; 2],
) {
    if lam == 0.0 {
        return;
    }
    for flat in 0..psi.len() {
        if basis.row(flat, qubit) != step - 1 {
            continue;
        }
        let y = basis.spin(flat, qubit);
        let amp = psi[flat];
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (x, row) in u.iter().enumerate() {
            let dest = basis.with_local(flat, qubit, BasisIndex::local_index(step, x));
            psi[dest] += lam * row[y] * amp;
        }
    }
}

fn apply_cnot_hop(
    basis: &BasisIndex,
    psi: &mut [Complex64],
    control: usize,
    target: usize,
    step: usize,
    lam: f64,
) {
    if lam == 0.0 {
        return;
    }
    let weight = lam * lam;
    for flat in 0..psi.len() {
        if basis.row(flat, control) != step - 1 || basis.row(flat, target) != step - 1 {
            continue;
        }
        let amp = psi[flat];
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let a = basis.spin(flat, control);
        let b = basis.spin(flat, target);
        let b_out = if a == 0 { b } else { 1 - b };
        let dest = basis.with_local(flat, control, BasisIndex::local_index(step, a));
        let dest = basis.with_local(dest, target, BasisIndex::local_index(step, b_out));
        psi[dest] += weight * amp;
    }
}

/// Probability of finding `qubit`'s particle at each row.
pub fn row_marginal(state: &StateVector, qubit: usize) -> Result<Vec<f64>> {
    let basis = &state.basis;
    if qubit >= basis.num_qubits() {
        return Err(Error::InvalidQubits(format!(
            "qubit {qubit} out of range for {} qubit(s)",
            basis.num_qubits()
        )));
    }
    let mut out = vec![0.0; basis.num_steps() + 1];
    for (flat, a) in state.amplitudes.iter().enumerate() {
        out[basis.row(flat, qubit)] += a.norm_sqr();
    }
    Ok(out)
}

/// The spin state conditioned on every particle sitting at the final row.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalRowState {
    /// `2^M` amplitudes, qubit 0 as the most significant bit, unit norm.
    pub amplitudes: Vec<Complex64>,
    /// Probability of the conditioning event.
    pub probability: f64,
}

/// Threshold below which the final row counts as unoccupied.
pub const EMPTY_ROW_PROBABILITY: f64 = 1e-300;

pub fn final_row_conditional(state: &StateVector) -> Result<FinalRowState> {
    let basis = &state.basis;
    let m = basis.num_qubits();
    let n = basis.num_steps();
    let amplitudes: Vec<Complex64> = (0..1usize << m)
        .map(|bits| {
            let config: Vec<(usize, usize)> =
                (0..m).map(|q| (n, (bits >> (m - 1 - q)) & 1)).collect();
            state.amplitudes[basis.encode(&config).expect("final-row configuration")]
        })
        .collect();
    let probability: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let total: f64 = state.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let probability = if total > 0.0 { probability / total } else { 0.0 };
    if !(probability >= EMPTY_ROW_PROBABILITY) {
        return Err(Error::EmptyFinalRow { probability });
    }
    let n = norm(&amplitudes);
    Ok(FinalRowState {
        amplitudes: amplitudes.into_iter().map(|a| a / n).collect(),
        probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::circuit::parse_circuit;

    #[test]
    fn encode_decode_small() {
        let b = BasisIndex::new(2, 1).unwrap();
        assert_eq!(b.local_dim(), 4);
        assert_eq!(b.dim(), 16);
        assert_eq!(b.encode(&[(0, 0), (0, 0)]), Some(0));
        assert_eq!(b.encode(&[(1, 1), (0, 1)]), Some(3 * 4 + 1));
        assert_eq!(b.decode(13), vec![(1, 1), (0, 1)]);
        assert_eq!(b.encode(&[(2, 0), (0, 0)]), None);
    }

    #[test]
    fn dimension_overflow_is_rejected() {
        assert!(BasisIndex::new(40, 100).is_err());
        assert!(BasisIndex::new(0, 3).is_err());
    }

    #[test]
    fn initial_state_examples() {
        let b = BasisIndex::new(1, 2).unwrap();
        let s = initial_state(&b);
        assert_eq!(s.amplitudes.len(), 6);
        assert_eq!(s.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);

        let b2 = BasisIndex::new(2, 1).unwrap();
        let s2 = initial_state(&b2);
        assert_eq!(s2.amplitudes[b2.encode(&[(0, 0), (0, 0)]).unwrap()].re, 1.0);
    }

    #[test]
    fn single_x_gate_ground_state() {
        let c = parse_circuit("qubits 1; step X 0").unwrap();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let s = ground_state(&c, Lambda::new(1.0).unwrap(), &b).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [r, 0.0, 0.0, r];
        for (a, e) in s.amplitudes.iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
        assert!((s.raw_norm - 2f64.sqrt()).abs() < 1e-15);
        assert!(s.normalized);
    }

    #[test]
    fn lambda_zero_gives_initial_state() {
        let c = catalog::bell_disentangle(5, catalog::Stage::Middle).unwrap();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let s = ground_state(&c, Lambda::new(0.0).unwrap(), &b).unwrap();
        assert_eq!(s, initial_state(&b));
    }

    #[test]
    fn basis_mismatch_is_an_error() {
        let c = catalog::deutsch_jozsa_example();
        let b = BasisIndex::new(1, 5).unwrap();
        assert!(matches!(
            ground_state(&c, Lambda::new(0.5).unwrap(), &b),
            Err(Error::BasisMismatch { .. })
        ));
    }

    #[test]
    fn row_marginals() {
        let c = catalog::identity_chain(2).unwrap();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let init = row_marginal(&initial_state(&b), 0).unwrap();
        assert_eq!(init, vec![1.0, 0.0, 0.0]);

        let full = ground_state(&c, Lambda::new(1.0).unwrap(), &b).unwrap();
        for p in row_marginal(&full, 0).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }

        // weights 1, λ², λ⁴ at λ = 1/2
        let half = ground_state(&c, Lambda::new(0.5).unwrap(), &b).unwrap();
        let total = 1.0 + 0.25 + 0.0625;
        let expect = [1.0 / total, 0.25 / total, 0.0625 / total];
        for (p, e) in row_marginal(&half, 0).unwrap().iter().zip(expect) {
            assert!((p - e).abs() < 1e-12);
        }
        assert!(row_marginal(&half, 1).is_err());
    }

    #[test]
    fn final_row_of_deutsch_jozsa_is_zero() {
        let c = catalog::deutsch_jozsa_example();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let s = ground_state(&c, Lambda::new(1.0).unwrap(), &b).unwrap();
        let f = final_row_conditional(&s).unwrap();
        assert!((f.amplitudes[0].norm() - 1.0).abs() < 1e-12);
        assert!(f.amplitudes[1].norm() < 1e-12);
        assert!((f.probability - 0.25).abs() < 1e-12);
    }

    #[test]
    fn final_row_empty_at_lambda_zero() {
        let c = catalog::deutsch_jozsa_example();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let s = ground_state(&c, Lambda::new(0.0).unwrap(), &b).unwrap();
        assert!(matches!(final_row_conditional(&s), Err(Error::EmptyFinalRow { .. })));
    }

    #[test]
    fn lambda_range_is_enforced() {
        assert!(Lambda::new(1.5).is_err());
        assert!(Lambda::new(-0.1).is_err());
        assert_eq!(Lambda::clamped(1.0 + 1e-16).value(), 1.0);
    }
}
