//! Sparse assembly of the clock Hamiltonian `H(λ)`.
//!
//! A single-qubit gate `U` at step `j` on qubit `A` contributes
//! `h = B†B` with `B_x = c_{j,x} - λ Σ_y U_{xy} c_{j-1,y}`: on-site weight 1 on
//! row `j`, `λ²` on row `j-1`, and hopping `-λU` from row `j-1` to row `j`.
//!
//! A CNOT between control `A` and target `B` at step `j` replaces both
//! qubits' single-qubit terms with three pieces:
//! * identity branch: pair annihilators `C_{B,j} c_{A,j,0} - λ² C_{B,j-1} c_{A,j-1,0}`, as `B†B`;
//! * NOT branch: the same with control spin 1 and `σ_x` on the target;
//! * penalty: `Σ_{i<j<=k} n_{A,i} n_{B,k} + n_{A,k} n_{B,i}`, energy 1 on every
//!   configuration where exactly one of the pair has crossed row `j`.
//!
//! Everything is in units of the energy scale 𝓔 (set to 1).
//!
//! Two independent assembly paths exist: [`build_hamiltonian`] forms each
//! term literally as `B†B` at a numeric λ, while [`LambdaPolynomial`]
//! tabulates the matrix elements per power of λ (`H(λ) = Σ_p λ^p H_p`,
//! `p ∈ 0..=4`) for fast re-evaluation during sweeps and time evolution.

use num_complex::Complex64;

use crate::basis::{BasisIndex, Lambda};
use crate::circuit::{Circuit, Gate1Q, Matrix2, Operation};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Highest power of λ appearing in any term.
pub const MAX_LAMBDA_POWER: usize = 4;

type Triplet = (usize, usize, Complex64);

/// Sparse complex matrix in compressed-row form, sorted columns, no
/// duplicate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Sums duplicate coordinates (in input order) and drops exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside {dim}x{dim}");
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut kept_cols = Vec::with_capacity(cols.len());
        let mut kept_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != Complex64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                kept_cols.push(c);
                kept_vals.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols: kept_cols,
            vals: kept_vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        self.iter().collect()
    }

    fn row_dot(&self, r: usize, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            acc += self.vals[k] * x[self.cols[k]];
        }
        acc
    }

    /// `y = A x`.
    pub fn apply_into(&self, exec: Execution, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        par::rows_mut(exec, y, |r| self.row_dot(r, x));
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(Execution::default(), x, &mut y);
        y
    }

    /// `Re <x|A|x>` (A Hermitian).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        (0..self.dim)
            .map(|r| (x[r].conj() * self.row_dot(r, x)).re)
            .sum()
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, other.dim);
        let mut t = self.triplets();
        t.extend(other.iter());
        OperatorMatrix::from_triplets(self.dim, t)
    }

    pub fn scaled(&self, s: f64) -> OperatorMatrix {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= s;
        }
        out
    }

    /// `max |A_{ij} - conj(A_{ji})|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A_{ij} - B_{ij}|` over the union of both patterns.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let a = self
            .iter()
            .map(|(r, c, v)| (v - other.get(r, c)).norm())
            .fold(0.0, f64::max);
        let b = other
            .iter()
            .map(|(r, c, v)| (v - self.get(r, c)).norm())
            .fold(0.0, f64::max);
        a.max(b)
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.iter().all(|(r, c, _)| r == c)
    }
}

/// One additive piece of `H(λ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum TermDescriptor {
    Single {
        qubit: usize,
        step: usize,
        gate: Gate1Q,
    },
    CnotIdentity {
        control: usize,
        target: usize,
        step: usize,
    },
    CnotNot {
        control: usize,
        target: usize,
        step: usize,
    },
    CnotPenalty {
        control: usize,
        target: usize,
        step: usize,
    },
}

impl TermDescriptor {
    /// Powers of λ that occur in the term's matrix elements.
    pub fn lambda_exponents(&self) -> &'static [u32] {
        match self {
            TermDescriptor::Single { .. } => &[0, 1, 2],
            TermDescriptor::CnotIdentity { .. } | TermDescriptor::CnotNot { .. } => &[0, 2, 4],
            TermDescriptor::CnotPenalty { .. } => &[0],
        }
    }

    pub fn step(&self) -> usize {
        match *self {
            TermDescriptor::Single { step, .. }
            | TermDescriptor::CnotIdentity { step, .. }
            | TermDescriptor::CnotNot { step, .. }
            | TermDescriptor::CnotPenalty { step, .. } => step,
        }
    }
}

/// All terms of the circuit's Hamiltonian, step by step. A CNOT's three
/// pieces stand in for the two single-qubit terms of its qubits.
pub fn term_descriptors(circuit: &Circuit) -> Vec<TermDescriptor> {
    let mut out = Vec::new();
    for (j0, step) in circuit.steps.iter().enumerate() {
        let j = j0 + 1;
        for op in &step.ops {
            match op {
                Operation::Single { qubit, gate } => out.push(TermDescriptor::Single {
                    qubit: *qubit,
                    step: j,
                    gate: gate.clone(),
                }),
                Operation::Cnot { control, target } => {
                    let (control, target) = (*control, *target);
                    out.push(TermDescriptor::CnotIdentity { control, target, step: j });
                    out.push(TermDescriptor::CnotNot { control, target, step: j });
                    out.push(TermDescriptor::CnotPenalty { control, target, step: j });
                }
            }
        }
    }
    out
}

/// Flat indices whose listed qubits all sit at local index 0; the other
/// factors range freely.
fn environments<'a>(basis: &'a BasisIndex, qubits: &[usize]) -> impl Iterator<Item = usize> + 'a {
    let qubits = qubits.to_vec();
    (0..basis.dim()).filter(move |&flat| qubits.iter().all(|&q| basis.local(flat, q) == 0))
}

/// Adds `|w><w|` for a sparse vector `w`.
fn push_outer(out: &mut Vec<Triplet>, w: &[(usize, Complex64)]) {
    for &(p, wp) in w {
        for &(q, wq) in w {
            out.push((p, q, wp * wq.conj()));
        }
    }
}

fn single_term_numeric(
    basis: &BasisIndex,
    qubit: usize,
    step: usize,
    u: &Matrix2,
    lam: f64,
    out: &mut Vec<Triplet>,
) {
    for env in environments(basis, &[qubit]) {
        let at = |row: usize, spin: usize| basis.with_local(env, qubit, BasisIndex::local_index(row, spin));
        for (x, u_row) in u.iter().enumerate() {
            let mut w = vec![(at(step, x), Complex64::new(1.0, 0.0))];
            for (y, u_xy) in u_row.iter().enumerate() {
                w.push((at(step - 1, y), -lam * u_xy.conj()));
            }
            push_outer(out, &w);
        }
    }
}

fn cnot_branch_numeric(
    basis: &BasisIndex,
    control: usize,
    target: usize,
    step: usize,
    control_spin: usize,
    lam: f64,
    out: &mut Vec<Triplet>,
) {
    for env in environments(basis, &[control, target]) {
        let at = |row: usize, a: usize, b: usize| {
            let f = basis.with_local(env, control, BasisIndex::local_index(row, a));
            basis.with_local(f, target, BasisIndex::local_index(row, b))
        };
        for y in 0..2 {
            let y_in = if control_spin == 0 { y } else { 1 - y };
            let w = [
                (at(step, control_spin, y), Complex64::new(1.0, 0.0)),
                (at(step - 1, control_spin, y_in), Complex64::new(-lam * lam, 0.0)),
            ];
            push_outer(out, &w);
        }
    }
}

fn penalty_entries(basis: &BasisIndex, control: usize, target: usize, step: usize, out: &mut Vec<Triplet>) {
    for flat in 0..basis.dim() {
        let a_before = basis.row(flat, control) < step;
        let b_before = basis.row(flat, target) < step;
        if a_before != b_before {
            out.push((flat, flat, Complex64::new(1.0, 0.0)));
        }
    }
}

fn check_step(basis: &BasisIndex, step: usize) -> Result<()> {
    if step == 0 || step > basis.num_steps() {
        return Err(Error::StepOutOfRange {
            step,
            num_steps: basis.num_steps(),
        });
    }
    Ok(())
}

fn check_qubit(basis: &BasisIndex, qubit: usize) -> Result<()> {
    if qubit >= basis.num_qubits() {
        return Err(Error::InvalidQubits(format!(
            "qubit {qubit} out of range for {} qubit(s)",
            basis.num_qubits()
        )));
    }
    Ok(())
}

fn check_pair(basis: &BasisIndex, control: usize, target: usize) -> Result<()> {
    check_qubit(basis, control)?;
    check_qubit(basis, target)?;
    if control == target {
        return Err(Error::InvalidQubits(format!(
            "CNOT control equals target ({control})"
        )));
    }
    Ok(())
}

fn term_triplets(term: &TermDescriptor, lam: f64, basis: &BasisIndex) -> Vec<Triplet> {
    let mut out = Vec::new();
    match term {
        TermDescriptor::Single { qubit, step, gate } => {
            single_term_numeric(basis, *qubit, *step, gate.matrix(), lam, &mut out)
        }
        TermDescriptor::CnotIdentity { control, target, step } => {
            cnot_branch_numeric(basis, *control, *target, *step, 0, lam, &mut out)
        }
        TermDescriptor::CnotNot { control, target, step } => {
            cnot_branch_numeric(basis, *control, *target, *step, 1, lam, &mut out)
        }
        TermDescriptor::CnotPenalty { control, target, step } => {
            penalty_entries(basis, *control, *target, *step, &mut out)
        }
    }
    out
}

/// Matrix of one term at coupling λ.
pub fn build_term(term: &TermDescriptor, lambda: Lambda, basis: &BasisIndex) -> Result<OperatorMatrix> {
    check_step(basis, term.step())?;
    match term {
        TermDescriptor::Single { qubit, .. } => check_qubit(basis, *qubit)?,
        TermDescriptor::CnotIdentity { control, target, .. }
        | TermDescriptor::CnotNot { control, target, .. }
        | TermDescriptor::CnotPenalty { control, target, .. } => check_pair(basis, *control, *target)?,
    }
    Ok(OperatorMatrix::from_triplets(
        basis.dim(),
        term_triplets(term, lambda.value(), basis),
    ))
}

/// `h^j_A(λU)`, embedded with identity on the other qubits.
pub fn build_single_gate_term(
    qubit: usize,
    step: usize,
    gate: &Gate1Q,
    lambda: Lambda,
    basis: &BasisIndex,
) -> Result<OperatorMatrix> {
    build_term(
        &TermDescriptor::Single {
            qubit,
            step,
            gate: gate.clone(),
        },
        lambda,
        basis,
    )
}

/// Full CNOT term: identity branch + NOT branch + penalty.
pub fn build_cnot_term(
    control: usize,
    target: usize,
    step: usize,
    lambda: Lambda,
    basis: &BasisIndex,
) -> Result<OperatorMatrix> {
    check_step(basis, step)?;
    check_pair(basis, control, target)?;
    let lam = lambda.value();
    let mut t = Vec::new();
    cnot_branch_numeric(basis, control, target, step, 0, lam, &mut t);
    cnot_branch_numeric(basis, control, target, step, 1, lam, &mut t);
    penalty_entries(basis, control, target, step, &mut t);
    Ok(OperatorMatrix::from_triplets(basis.dim(), t))
}

/// `H(λ)` for the whole circuit.
pub fn build_hamiltonian(circuit: &Circuit, lambda: Lambda, basis: &BasisIndex) -> Result<OperatorMatrix> {
    build_hamiltonian_with(Execution::default(), circuit, lambda, basis)
}

pub fn build_hamiltonian_with(
    exec: Execution,
    circuit: &Circuit,
    lambda: Lambda,
    basis: &BasisIndex,
) -> Result<OperatorMatrix> {
    basis.check_circuit(circuit)?;
    let violations = crate::circuit::validate(circuit);
    if !violations.is_empty() {
        return Err(Error::InvalidCircuit(violations));
    }
    let terms = term_descriptors(circuit);
    let parts = par::map(exec, &terms, |t| term_triplets(t, lambda.value(), basis));
    let triplets: Vec<Triplet> = parts.into_iter().flatten().collect();
    Ok(OperatorMatrix::from_triplets(basis.dim(), triplets))
}

/// `H(λ) = Σ_p λ^p H_p` on a shared sparsity pattern.
#[derive(Debug, Clone)]
pub struct LambdaPolynomial {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    coeffs: Vec<[Complex64; MAX_LAMBDA_POWER + 1]>,
}

type Tagged = (usize, usize, usize, Complex64);

fn polynomial_entries(term: &TermDescriptor, basis: &BasisIndex, out: &mut Vec<Tagged>) {
    let one = Complex64::new(1.0, 0.0);
    match term {
        TermDescriptor::Single { qubit, step, gate } => {
            let (qubit, step) = (*qubit, *step);
            let u = gate.matrix();
            let udag_u = {
                let a = gate.adjoint_matrix();
                let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
                for (y, row) in m.iter_mut().enumerate() {
                    for (y2, v) in row.iter_mut().enumerate() {
                        *v = a[y][0] * u[0][y2] + a[y][1] * u[1][y2];
                    }
                }
                m
            };
            for env in environments(basis, &[qubit]) {
                let at = |row: usize, spin: usize| {
                    basis.with_local(env, qubit, BasisIndex::local_index(row, spin))
                };
                for x in 0..2 {
                    out.push((at(step, x), at(step, x), 0, one));
                    for y in 0..2 {
                        out.push((at(step, x), at(step - 1, y), 1, -u[x][y]));
                        out.push((at(step - 1, y), at(step, x), 1, -u[x][y].conj()));
                    }
                }
                for y in 0..2 {
                    for y2 in 0..2 {
                        out.push((at(step - 1, y), at(step - 1, y2), 2, udag_u[y][y2]));
                    }
                }
            }
        }
        TermDescriptor::CnotIdentity { control, target, step }
        | TermDescriptor::CnotNot { control, target, step } => {
            let a = usize::from(matches!(term, TermDescriptor::CnotNot { .. }));
            let (control, target, step) = (*control, *target, *step);
            for env in environments(basis, &[control, target]) {
                let at = |row: usize, b: usize| {
                    let f = basis.with_local(env, control, BasisIndex::local_index(row, a));
                    basis.with_local(f, target, BasisIndex::local_index(row, b))
                };
                for y in 0..2 {
                    let y_in = if a == 0 { y } else { 1 - y };
                    let (hi, lo) = (at(step, y), at(step - 1, y_in));
                    out.push((hi, hi, 0, one));
                    out.push((lo, lo, 4, one));
                    out.push((hi, lo, 2, -one));
                    out.push((lo, hi, 2, -one));
                }
            }
        }
        TermDescriptor::CnotPenalty { control, target, step } => {
            let mut t = Vec::new();
            penalty_entries(basis, *control, *target, *step, &mut t);
            out.extend(t.into_iter().map(|(r, c, v)| (r, c, 0, v)));
        }
    }
}

impl LambdaPolynomial {
    pub fn new(circuit: &Circuit, basis: &BasisIndex) -> Result<Self> {
        Self::new_with(Execution::default(), circuit, basis)
    }

    pub fn new_with(exec: Execution, circuit: &Circuit, basis: &BasisIndex) -> Result<Self> {
        basis.check_circuit(circuit)?;
        let violations = crate::circuit::validate(circuit);
        if !violations.is_empty() {
            return Err(Error::InvalidCircuit(violations));
        }
        let terms = term_descriptors(circuit);
        let parts = par::map(exec, &terms, |t| {
            let mut v = Vec::new();
            polynomial_entries(t, basis, &mut v);
            v
        });
        let mut tagged: Vec<Tagged> = parts.into_iter().flatten().collect();
        tagged.sort_by_key(|&(r, c, _, _)| (r, c));

        let dim = basis.dim();
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::new();
        let mut coeffs: Vec<[Complex64; MAX_LAMBDA_POWER + 1]> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (r, c, p, v) in tagged {
            if last != Some((r, c)) {
                row_ptr[r + 1] += 1;
                cols.push(c);
                coeffs.push([Complex64::new(0.0, 0.0); MAX_LAMBDA_POWER + 1]);
                last = Some((r, c));
            }
            coeffs.last_mut().unwrap()[p] += v;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            dim,
            row_ptr,
            cols,
            coeffs,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// `[1, λ, λ², λ³, λ⁴]`.
    pub fn powers(lam: f64) -> [f64; MAX_LAMBDA_POWER + 1] {
        let mut p = [1.0; MAX_LAMBDA_POWER + 1];
        for k in 1..=MAX_LAMBDA_POWER {
            p[k] = p[k - 1] * lam;
        }
        p
    }

    /// Operator with weight `weights[p]` on `H_p`.
    pub fn combine(&self, weights: &[f64; MAX_LAMBDA_POWER + 1]) -> OperatorMatrix {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v: Complex64 = self.coeffs[k]
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| c * w)
                    .sum();
                t.push((r, self.cols[k], v));
            }
        }
        OperatorMatrix::from_triplets(self.dim, t)
    }

    pub fn evaluate(&self, lambda: Lambda) -> OperatorMatrix {
        self.combine(&Self::powers(lambda.value()))
    }

    /// `y = (Σ_p weights[p] H_p) x` without materializing the sum.
    pub fn apply_combination(
        &self,
        exec: Execution,
        weights: &[f64; MAX_LAMBDA_POWER + 1],
        x: &[Complex64],
        y: &mut [Complex64],
    ) {
        par::rows_mut(exec, y, |r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = &self.coeffs[k];
                let mut v = c[0] * weights[0];
                for p in 1..=MAX_LAMBDA_POWER {
                    v += c[p] * weights[p];
                }
                acc += v * x[self.cols[k]];
            }
            acc
        });
    }

    /// Nonzero `(p, H_p)` pieces in increasing `p`.
    pub fn pieces(&self) -> Vec<(u32, OperatorMatrix)> {
        (0..=MAX_LAMBDA_POWER)
            .filter_map(|p| {
                let mut w = [0.0; MAX_LAMBDA_POWER + 1];
                w[p] = 1.0;
                let m = self.combine(&w);
                (m.nnz() > 0).then_some((p as u32, m))
            })
            .collect()
    }

    /// Gershgorin bound on `‖Σ_p w_p H_p‖` valid for every λ ∈ [0, 1] when
    /// `weights` are the absolute values `|d^k/dλ^k λ^p|` maxima.
    fn row_bound(&self, weights: &[f64; MAX_LAMBDA_POWER + 1]) -> f64 {
        (0..self.dim)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| {
                        self.coeffs[k]
                            .iter()
                            .zip(weights)
                            .map(|(c, w)| c.norm() * w)
                            .sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Upper bound on `‖H(λ)‖` uniformly over λ ∈ [0, 1].
    pub fn norm_bound(&self) -> f64 {
        self.row_bound(&[1.0; MAX_LAMBDA_POWER + 1])
    }

    /// Upper bound on `‖dH/dλ‖` uniformly over λ ∈ [0, 1].
    pub fn derivative_bound(&self) -> f64 {
        let mut w = [0.0; MAX_LAMBDA_POWER + 1];
        for (p, v) in w.iter_mut().enumerate() {
            *v = p as f64;
        }
        self.row_bound(&w)
    }
}

/// Exact split `H(λ) = Σ_p λ^p H_p`; only powers with nonzero pieces are
/// returned.
pub fn decompose_lambda(circuit: &Circuit, basis: &BasisIndex) -> Result<Vec<(u32, OperatorMatrix)>> {
    Ok(LambdaPolynomial::new(circuit, basis)?.pieces())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::circuit::parse_circuit;

    fn lam(v: f64) -> Lambda {
        Lambda::new(v).unwrap()
    }

    #[test]
    fn lambda_zero_single_term_is_onsite_projector() {
        let b = BasisIndex::new(1, 3).unwrap();
        let h = build_single_gate_term(0, 2, &Gate1Q::h(), lam(0.0), &b).unwrap();
        assert!(h.is_diagonal());
        let diag: Vec<f64> = (0..b.dim()).map(|k| h.get(k, k).re).collect();
        assert_eq!(diag, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_gate_block_at_lambda_one() {
        let b = BasisIndex::new(1, 1).unwrap();
        let h = build_single_gate_term(0, 1, &Gate1Q::identity(), lam(1.0), &b).unwrap();
        // rows (0,0),(0,1),(1,0),(1,1): [[1,-1],[-1,1]] ⊗ I
        let expect = [
            [1.0, 0.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, -1.0],
            [-1.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 1.0],
        ];
        for (r, row) in expect.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert!((h.get(r, c) - Complex64::new(v, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cnot_lambda_powers_are_squared() {
        let b = BasisIndex::new(2, 1).unwrap();
        let l = 0.6;
        let h = build_cnot_term(0, 1, 1, lam(l), &b).unwrap();
        for a in 0..2 {
            for y in 0..2 {
                let y_in = if a == 0 { y } else { 1 - y };
                let hi = b.encode(&[(1, a), (1, y)]).unwrap();
                let lo = b.encode(&[(0, a), (0, y_in)]).unwrap();
                assert!((h.get(hi, lo).re + l * l).abs() < 1e-15);
                assert!((h.get(lo, hi).re + l * l).abs() < 1e-15);
                assert!((h.get(lo, lo).re - l.powi(4)).abs() < 1e-15);
                assert!((h.get(hi, hi).re - 1.0).abs() < 1e-15);
            }
        }
        // desynchronized pair pays the penalty
        let k = b.encode(&[(1, 0), (0, 0)]).unwrap();
        assert_eq!(h.get(k, k).re, 1.0);
    }

    #[test]
    fn cnot_at_lambda_zero_is_diagonal() {
        let b = BasisIndex::new(2, 2).unwrap();
        let h = build_cnot_term(0, 1, 2, lam(0.0), &b).unwrap();
        assert!(h.is_diagonal());
        for flat in 0..b.dim() {
            let (ra, rb) = (b.row(flat, 0), b.row(flat, 1));
            let both_at_j = f64::from(ra == 2 && rb == 2);
            let penalty = f64::from((ra < 2) != (rb < 2));
            assert_eq!(h.get(flat, flat).re, both_at_j + penalty);
        }
    }

    #[test]
    fn term_argument_errors() {
        let b = BasisIndex::new(2, 2).unwrap();
        assert!(matches!(
            build_single_gate_term(0, 3, &Gate1Q::x(), lam(0.5), &b),
            Err(Error::StepOutOfRange { .. })
        ));
        assert!(matches!(
            build_single_gate_term(0, 0, &Gate1Q::x(), lam(0.5), &b),
            Err(Error::StepOutOfRange { .. })
        ));
        assert!(build_cnot_term(1, 1, 1, lam(0.5), &b).is_err());
        assert!(build_cnot_term(0, 2, 1, lam(0.5), &b).is_err());
    }

    #[test]
    fn hamiltonian_is_hermitian_and_lambda_zero_diagonal() {
        let c = catalog::bell_disentangle(5, catalog::Stage::Middle).unwrap();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let h = build_hamiltonian(&c, lam(0.37), &b).unwrap();
        assert!(h.hermiticity_deviation() <= 1e-12);
        let h0 = build_hamiltonian(&c, lam(0.0), &b).unwrap();
        assert!(h0.is_diagonal());
        assert_eq!(h0.get(0, 0).re, 0.0);
    }

    #[test]
    fn polynomial_matches_literal_assembly() {
        let c = parse_circuit(
            "qubits 2\nstep H 0, T 1\nstep CNOT 1 0\nstep S 0, PHASE(0.3) 1\nstep CNOT 0 1\n",
        )
        .unwrap();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let poly = LambdaPolynomial::new(&c, &b).unwrap();
        for l in [0.0, 0.37, 0.8, 1.0] {
            let direct = build_hamiltonian(&c, lam(l), &b).unwrap();
            assert!(poly.evaluate(lam(l)).max_abs_diff(&direct) <= 1e-14);
        }
        let powers: Vec<u32> = poly.pieces().iter().map(|(p, _)| *p).collect();
        assert_eq!(powers, vec![0, 1, 2, 4]);
    }

    #[test]
    fn single_qubit_decomposition_has_low_powers_only() {
        let c = catalog::deutsch_jozsa_example();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let powers: Vec<u32> = decompose_lambda(&c, &b).unwrap().iter().map(|(p, _)| *p).collect();
        assert_eq!(powers, vec![0, 1, 2]);
    }

    #[test]
    fn apply_combination_matches_evaluated_operator() {
        let c = catalog::bell();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let poly = LambdaPolynomial::new(&c, &b).unwrap();
        let x: Vec<Complex64> = (0..b.dim())
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let w = LambdaPolynomial::powers(0.55);
        let mut y = vec![Complex64::new(0.0, 0.0); b.dim()];
        poly.apply_combination(Execution::Sequential, &w, &x, &mut y);
        let y2 = poly.evaluate(lam(0.55)).apply(&x);
        for (a, e) in y.iter().zip(&y2) {
            assert!((a - e).norm() < 1e-13);
        }
        assert!(poly.norm_bound() >= poly.evaluate(lam(1.0)).gershgorin_bound() - 1e-12);
    }

    #[test]
    fn from_triplets_merges_and_drops_zeros() {
        let one = Complex64::new(1.0, 0.0);
        let m = OperatorMatrix::from_triplets(3, vec![(1, 1, one), (0, 2, one), (1, 1, one), (2, 0, one), (2, 0, -one)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 1).re, 2.0);
        assert_eq!(m.get(2, 0).re, 0.0);
    }
}
