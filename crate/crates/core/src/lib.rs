//! Ground-state quantum computation on the clock encoding.
//!
//! A circuit of `M` qubits and `N` steps becomes a positive semi-definite
//! Hamiltonian `H(λ)` on `[2(N+1)]^M` states whose zero-energy ground state
//! spreads the whole computation over rows `0..=N`. The crate compiles
//! circuits to sparse operators, measures spectral gaps, and runs the
//! adiabatic sweep from `λ = 0` to `λ = 1`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod adiabatic;
pub mod basis;
pub mod catalog;
pub mod circuit;
pub mod error;
pub mod hamiltonian;
pub mod io;
pub mod oracle;
pub mod par;
pub mod spectral;

pub use basis::{ground_state, initial_state, BasisIndex, Lambda, StateVector};
pub use circuit::{parse_circuit, render, Circuit, Gate1Q, Operation, Step};
pub use error::{Error, Result};
pub use hamiltonian::{build_hamiltonian, LambdaPolynomial, OperatorMatrix};
pub use par::Execution;
pub use spectral::Method;
