//! Circuit intermediate representation, the textual circuit format and
//! validation.
//!
//! A circuit is a list of layers ("steps"). Every qubit receives exactly one
//! operation per step: a single-qubit gate (identity when idle) or one end of
//! a CNOT. This is the row structure the clock encoding needs, since each
//! qubit's particle advances one row per step.
//!
//! Text format, one statement per line or separated by `;`, `#` comments:
//!
//! ```text
//! name bell
//! qubits 2
//! step H 0, I 1
//! step CNOT 0 1
//! ```
//!
//! Gates: `H X Y Z S T I`, `PHASE(<radians>)` and `U(<8 reals>)` giving the
//! matrix row-major as (re, im) pairs.

use std::fmt::Write as _;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

/// Max-norm tolerance on `U†U - I`.
pub const UNITARITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    I,
    Phase(f64),
    Custom,
}

/// A single-qubit gate. Named gates carry their explicit matrix too, so the
/// Hamiltonian builder has one code path for all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate1Q {
    kind: GateKind,
    matrix: Matrix2,
}

impl Gate1Q {
    pub fn h() -> Self {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            kind: GateKind::H,
            matrix: [[r, r], [r, -r]],
        }
    }

    pub fn x() -> Self {
        Self {
            kind: GateKind::X,
            matrix: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn y() -> Self {
        let i = Complex64::i();
        Self {
            kind: GateKind::Y,
            matrix: [[ZERO, -i], [i, ZERO]],
        }
    }

    pub fn z() -> Self {
        Self {
            kind: GateKind::Z,
            matrix: [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn s() -> Self {
        Self {
            kind: GateKind::S,
            matrix: [[ONE, ZERO], [ZERO, Complex64::i()]],
        }
    }

    pub fn t() -> Self {
        Self {
            kind: GateKind::T,
            matrix: [
                [ONE, ZERO],
                [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
            ],
        }
    }

    pub fn identity() -> Self {
        Self {
            kind: GateKind::I,
            matrix: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self {
            kind: GateKind::Phase(theta),
            matrix: [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, theta)]],
        }
    }

    /// A user-supplied matrix; rejected unless unitary within [`UNITARITY_TOL`].
    pub fn custom(matrix: Matrix2) -> Result<Self> {
        let gate = Self::custom_unchecked(matrix);
        let deviation = gate.unitarity_deviation();
        if deviation > UNITARITY_TOL || !deviation.is_finite() {
            return Err(Error::NonUnitary {
                line: 0,
                label: gate.label(),
                deviation,
            });
        }
        Ok(gate)
    }

    /// Skips the unitarity check; [`validate`] still reports it.
    pub fn custom_unchecked(matrix: Matrix2) -> Self {
        Self {
            kind: GateKind::Custom,
            matrix,
        }
    }

    /// Looks up a parameterless gate by its text-format name.
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "H" => Self::h(),
            "X" => Self::x(),
            "Y" => Self::y(),
            "Z" => Self::z(),
            "S" => Self::s(),
            "T" => Self::t(),
            "I" => Self::identity(),
            _ => return None,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }

    pub fn is_identity_kind(&self) -> bool {
        self.kind == GateKind::I
    }

    /// Label in the text format, e.g. `H`, `PHASE(...)`, `U(...)`.
    pub fn label(&self) -> String {
        match self.kind {
            GateKind::H => "H".into(),
            GateKind::X => "X".into(),
            GateKind::Y => "Y".into(),
            GateKind::Z => "Z".into(),
            GateKind::S => "S".into(),
            GateKind::T => "T".into(),
            GateKind::I => "I".into(),
            GateKind::Phase(theta) => format!("PHASE({})", fmt_real(theta)),
            GateKind::Custom => {
                let m = &self.matrix;
                let parts: Vec<String> = [m[0][0], m[0][1], m[1][0], m[1][1]]
                    .iter()
                    .flat_map(|z| [fmt_real(z.re), fmt_real(z.im)])
                    .collect();
                format!("U({})", parts.join(","))
            }
        }
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }

    pub fn adjoint_matrix(&self) -> Matrix2 {
        let m = &self.matrix;
        [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
    }
}

/// `max |(U†U - I)_{ab}|`.
pub fn unitarity_deviation(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let mut s = ZERO;
            for k in 0..2 {
                s += m[k][a].conj() * m[k][b];
            }
            if a == b {
                s -= ONE;
            }
            let d = s.norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operation {
    Single { qubit: usize, gate: Gate1Q },
    Cnot { control: usize, target: usize },
}

impl Operation {
    pub fn single(qubit: usize, gate: Gate1Q) -> Self {
        Operation::Single { qubit, gate }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Operation::Cnot { control, target }
    }

    /// Qubits touched, in (control, target) order for CNOT.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Operation::Single { qubit, .. } => vec![qubit],
            Operation::Cnot { control, target } => vec![control, target],
        }
    }
}

/// One layer of the circuit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Step {
    pub ops: Vec<Operation>,
}

impl Step {
    pub fn new(ops: Vec<Operation>) -> Self {
        Self { ops }
    }

    /// The single-qubit gate assigned to `qubit` in this step, if any.
    pub fn single_on(&self, qubit: usize) -> Option<&Gate1Q> {
        self.ops.iter().find_map(|op| match op {
            Operation::Single { qubit: q, gate } if *q == qubit => Some(gate),
            _ => None,
        })
    }

    pub fn cnots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ops.iter().filter_map(|op| match *op {
            Operation::Cnot { control, target } => Some((control, target)),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub name: String,
    pub num_qubits: usize,
    pub steps: Vec<Step>,
}

impl Circuit {
    /// Builds a circuit and rejects it if [`validate`] reports anything.
    pub fn new(name: impl Into<String>, num_qubits: usize, steps: Vec<Step>) -> Result<Self> {
        let circuit = Self {
            name: name.into(),
            num_qubits,
            steps,
        };
        let violations = validate(&circuit);
        if violations.is_empty() {
            Ok(circuit)
        } else {
            Err(Error::InvalidCircuit(violations))
        }
    }

    /// Number of steps N; the clock has rows 0..=N.
    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn is_valid(&self) -> bool {
        validate(self).is_empty()
    }

    pub fn has_cnot(&self) -> bool {
        self.steps.iter().any(|s| s.cnots().next().is_some())
    }

    pub fn cnot_count(&self) -> usize {
        self.steps.iter().map(|s| s.cnots().count()).sum()
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(render(self).as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest.iter() {
            let _ = write!(out, "{b:02x}");
        }
        out
    }

    /// A 64-bit seed derived from the circuit hash.
    pub fn seed(&self) -> u64 {
        let digest = Sha256::digest(render(self).as_bytes());
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(bytes)
    }

    /// Runs `self` then `other`.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::InvalidQubits(format!(
                "cannot concatenate {}-qubit and {}-qubit circuits",
                self.num_qubits, other.num_qubits
            )));
        }
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        Circuit::new(self.name.clone(), self.num_qubits, steps)
    }

    /// Same layout with every single-qubit gate replaced by the identity.
    /// For CNOT-free circuits this is the gauge-equivalent circuit whose
    /// Hamiltonian is unitarily equivalent to the original.
    pub fn with_identity_gates(&self) -> Circuit {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                Step::new(
                    s.ops
                        .iter()
                        .map(|op| match op {
                            Operation::Single { qubit, .. } => {
                                Operation::single(*qubit, Gate1Q::identity())
                            }
                            other => other.clone(),
                        })
                        .collect(),
                )
            })
            .collect();
        Circuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            steps,
        }
    }
}

/// Lists every invariant violation; empty iff the circuit is valid.
pub fn validate(circuit: &Circuit) -> Vec<String> {
    let mut out = Vec::new();
    let m = circuit.num_qubits;
    if m == 0 {
        out.push("circuit has no qubits".to_string());
    }
    if circuit.steps.is_empty() {
        out.push("circuit has no steps".to_string());
    }
    for (s, step) in circuit.steps.iter().enumerate() {
        let s = s + 1;
        let mut count = vec![0usize; m];
        let mut touch = |q: usize, out: &mut Vec<String>| {
            if q < m {
                count[q] += 1;
            } else {
                out.push(format!("step {s}: qubit {q} out of range"));
            }
        };
        for op in &step.ops {
            match op {
                Operation::Single { qubit, gate } => {
                    touch(*qubit, &mut out);
                    let dev = gate.unitarity_deviation();
                    if !(dev <= UNITARITY_TOL) {
                        out.push(format!(
                            "step {s}: gate {} on qubit {qubit} is not unitary",
                            gate.label()
                        ));
                    }
                }
                Operation::Cnot { control, target } => {
                    if control == target {
                        out.push(format!("step {s}: CNOT control equals target"));
                        touch(*control, &mut out);
                    } else {
                        touch(*control, &mut out);
                        touch(*target, &mut out);
                    }
                }
            }
        }
        for (q, &c) in count.iter().enumerate() {
            if c == 0 {
                out.push(format!("step {s}: qubit {q} unassigned"));
            } else if c > 1 {
                out.push(format!("step {s}: qubit {q} assigned more than once"));
            }
        }
    }
    out
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Canonical text rendering; `parse_circuit(&render(c)) == c` for valid `c`.
pub fn render(circuit: &Circuit) -> String {
    let mut out = String::new();
    if !circuit.name.is_empty() {
        let _ = writeln!(out, "name {}", circuit.name);
    }
    let _ = writeln!(out, "qubits {}", circuit.num_qubits);
    for step in &circuit.steps {
        let entries: Vec<String> = step
            .ops
            .iter()
            .map(|op| match op {
                Operation::Single { qubit, gate } => format!("{} {qubit}", gate.label()),
                Operation::Cnot { control, target } => format!("CNOT {control} {target}"),
            })
            .collect();
        let _ = writeln!(out, "step {}", entries.join(", "));
    }
    out
}

/// Parses the textual circuit format and validates the result.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    Parser::new(text).parse()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.line,
            column: self.col,
            message: message.into(),
        })
    }

    /// Skips blank space, separators and comments between statements.
    fn skip_between_statements(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() || c == ';' {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn skip_inline_space(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t' || c == '\r') {
            self.bump();
        }
    }

    fn at_statement_end(&mut self) -> bool {
        self.skip_inline_space();
        matches!(self.peek(), None | Some('\n') | Some(';') | Some('#'))
    }

    fn expect_statement_end(&mut self) -> Result<()> {
        if self.at_statement_end() {
            Ok(())
        } else {
            let c = self.peek().unwrap_or(' ');
            self.error(format!("unexpected '{c}'"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_inline_space();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
            return self.error("expected identifier");
        }
        Ok(s)
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_inline_space();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if s.is_empty() {
            return self.error("expected non-negative integer");
        }
        match s.parse() {
            Ok(v) => Ok(v),
            Err(_) => self.error(format!("integer '{s}' too large")),
        }
    }

    fn real(&mut self) -> Result<f64> {
        self.skip_inline_space();
        let (line, column) = (self.line, self.col);
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-') {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Syntax {
                line,
                column,
                message: format!("expected real number, found '{s}'"),
            }),
        }
    }

    fn expect_char(&mut self, want: char) -> Result<()> {
        self.skip_inline_space();
        if self.peek() == Some(want) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{want}'"))
        }
    }

    fn rest_of_statement(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if matches!(c, '\n' | ';' | '#') {
                break;
            }
            s.push(c);
            self.bump();
        }
        s.trim().to_string()
    }

    fn qubit(&mut self, num_qubits: usize) -> Result<usize> {
        let line = self.line;
        let q = self.integer()?;
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                line,
                qubit: q,
                num_qubits,
            });
        }
        Ok(q)
    }

    fn entry(&mut self, num_qubits: usize) -> Result<Operation> {
        self.skip_inline_space();
        let (line, column) = (self.line, self.col);
        let name = self.ident()?.to_ascii_uppercase();
        let gate = match name.as_str() {
            "CNOT" => {
                let control = self.qubit(num_qubits)?;
                let target = self.qubit(num_qubits)?;
                if control == target {
                    return Err(Error::StepAssignment {
                        line,
                        message: format!("CNOT control equals target ({control})"),
                    });
                }
                return Ok(Operation::cnot(control, target));
            }
            "PHASE" => {
                self.expect_char('(')?;
                let theta = self.real()?;
                self.expect_char(')')?;
                Gate1Q::phase(theta)
            }
            "U" => {
                self.expect_char('(')?;
                let mut vals = [0.0; 8];
                for (k, v) in vals.iter_mut().enumerate() {
                    if k > 0 {
                        self.expect_char(',')?;
                    }
                    *v = self.real()?;
                }
                self.expect_char(')')?;
                let c = |k: usize| Complex64::new(vals[2 * k], vals[2 * k + 1]);
                let gate = Gate1Q::custom_unchecked([[c(0), c(1)], [c(2), c(3)]]);
                let deviation = gate.unitarity_deviation();
                if !(deviation <= UNITARITY_TOL) {
                    return Err(Error::NonUnitary {
                        line,
                        label: gate.label(),
                        deviation,
                    });
                }
                gate
            }
            other => match Gate1Q::by_name(other) {
                Some(g) => g,
                None => {
                    return Err(Error::Syntax {
                        line,
                        column,
                        message: format!("unknown gate '{other}'"),
                    })
                }
            },
        };
        let qubit = self.qubit(num_qubits)?;
        Ok(Operation::single(qubit, gate))
    }

    fn step(&mut self, num_qubits: usize, index: usize) -> Result<Step> {
        let line = self.line;
        let mut ops = vec![self.entry(num_qubits)?];
        loop {
            if self.at_statement_end() {
                break;
            }
            self.expect_char(',')?;
            ops.push(self.entry(num_qubits)?);
        }
        let mut count = vec![0usize; num_qubits];
        for op in &ops {
            for q in op.qubits() {
                count[q] += 1;
            }
        }
        for (q, &c) in count.iter().enumerate() {
            let problem = match c {
                0 => "unassigned",
                1 => continue,
                _ => "assigned more than once",
            };
            return Err(Error::StepAssignment {
                line,
                message: format!("step {index}: qubit {q} {problem}"),
            });
        }
        Ok(Step::new(ops))
    }

    fn parse(mut self) -> Result<Circuit> {
        let mut name = String::new();
        let mut num_qubits: Option<usize> = None;
        let mut steps = Vec::new();
        loop {
            self.skip_between_statements();
            if self.peek().is_none() {
                break;
            }
            let keyword = self.ident()?;
            match keyword.as_str() {
                "name" => {
                    name = self.rest_of_statement();
                }
                "qubits" => {
                    if num_qubits.is_some() {
                        return self.error("duplicate 'qubits' header");
                    }
                    if !steps.is_empty() {
                        return self.error("'qubits' must precede all steps");
                    }
                    let m = self.integer()?;
                    if m == 0 {
                        return self.error("circuit needs at least one qubit");
                    }
                    num_qubits = Some(m);
                    self.expect_statement_end()?;
                }
                "step" => {
                    let Some(m) = num_qubits else {
                        return self.error("'step' before 'qubits' header");
                    };
                    let index = steps.len() + 1;
                    steps.push(self.step(m, index)?);
                }
                other => return self.error(format!("unknown statement '{other}'")),
            }
        }
        let Some(num_qubits) = num_qubits else {
            return self.error("missing 'qubits' header");
        };
        if steps.is_empty() {
            return self.error("circuit has no steps");
        }
        Circuit::new(name, num_qubits, steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_qubit(gates: Vec<Gate1Q>) -> Circuit {
        let steps = gates
            .into_iter()
            .map(|g| Step::new(vec![Operation::single(0, g)]))
            .collect();
        Circuit::new("", 1, steps).unwrap()
    }

    #[test]
    fn parses_single_line_program() {
        let c = parse_circuit("qubits 1; step H 0; step X 0;").unwrap();
        assert_eq!(c, one_qubit(vec![Gate1Q::h(), Gate1Q::x()]));
        assert_eq!(c.num_steps(), 2);
    }

    #[test]
    fn parses_two_qubit_program_with_cnot() {
        let c = parse_circuit("qubits 2; step H 0, I 1; step CNOT 0 1;").unwrap();
        assert_eq!(c.num_qubits, 2);
        assert_eq!(c.num_steps(), 2);
        assert_eq!(c.steps[1].cnots().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn rank_one_custom_gate_is_rejected() {
        let err = parse_circuit("qubits 1; step U(1,0,0,0,0,0,0,0) 0;").unwrap_err();
        assert!(matches!(err, Error::NonUnitary { line: 1, .. }), "{err}");
    }

    #[test]
    fn custom_unitary_is_accepted() {
        let c = parse_circuit("qubits 1\nstep U(0,0,1,0,1,0,0,0) 0\n").unwrap();
        assert_eq!(c.steps[0].single_on(0).unwrap().matrix(), Gate1Q::x().matrix());
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = parse_circuit("qubits 1\nstep H 0,\n").unwrap_err();
        match err {
            Error::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
        let err = parse_circuit("qubits 1\n  step FOO 0\n").unwrap_err();
        match err {
            Error::Syntax { line, column, message } => {
                assert_eq!((line, column), (2, 8));
                assert!(message.contains("FOO"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn qubit_out_of_range_is_reported() {
        let err = parse_circuit("qubits 2\nstep H 0, X 2\n").unwrap_err();
        assert!(matches!(err, Error::QubitOutOfRange { line: 2, qubit: 2, num_qubits: 2 }));
    }

    #[test]
    fn missing_and_duplicate_assignments_are_reported() {
        let err = parse_circuit("qubits 2\nstep H 0\n").unwrap_err();
        assert!(err.to_string().contains("qubit 1 unassigned"), "{err}");
        let err = parse_circuit("qubits 2\nstep H 0, CNOT 0 1\n").unwrap_err();
        assert!(err.to_string().contains("qubit 0 assigned more than once"), "{err}");
    }

    #[test]
    fn comments_and_names_are_handled() {
        let src = "# a comment\nname dj test\nqubits 1 # trailing\nstep H 0\n";
        let c = parse_circuit(src).unwrap();
        assert_eq!(c.name, "dj test");
    }

    #[test]
    fn validate_examples() {
        let bell = parse_circuit("qubits 2; step H 0, I 1; step CNOT 0 1").unwrap();
        assert!(validate(&bell).is_empty());

        let partial = Circuit {
            name: String::new(),
            num_qubits: 2,
            steps: vec![Step::new(vec![Operation::single(0, Gate1Q::h())])],
        };
        assert_eq!(validate(&partial), vec!["step 1: qubit 1 unassigned"]);

        let self_cnot = Circuit {
            name: String::new(),
            num_qubits: 1,
            steps: vec![Step::new(vec![Operation::cnot(0, 0)])],
        };
        assert_eq!(validate(&self_cnot), vec!["step 1: CNOT control equals target"]);
    }

    #[test]
    fn validate_flags_non_unitary_and_empty() {
        let bad = Circuit {
            name: String::new(),
            num_qubits: 1,
            steps: vec![Step::new(vec![Operation::single(
                0,
                Gate1Q::custom_unchecked([[ONE, ZERO], [ZERO, ZERO]]),
            )])],
        };
        assert_eq!(validate(&bad).len(), 1);
        let empty = Circuit {
            name: String::new(),
            num_qubits: 0,
            steps: vec![],
        };
        assert_eq!(validate(&empty).len(), 2);
    }

    #[test]
    fn named_gates_are_unitary() {
        let gates = [
            Gate1Q::h(),
            Gate1Q::x(),
            Gate1Q::y(),
            Gate1Q::z(),
            Gate1Q::s(),
            Gate1Q::t(),
            Gate1Q::identity(),
            Gate1Q::phase(0.7),
            Gate1Q::phase(-3.0),
        ];
        for g in gates {
            assert!(g.unitarity_deviation() <= UNITARITY_TOL, "{}", g.label());
        }
    }

    #[test]
    fn render_is_canonical() {
        let c = parse_circuit("qubits 2 ;step  H 0 ,I 1; step CNOT 0 1").unwrap();
        assert_eq!(render(&c), "qubits 2\nstep H 0, I 1\nstep CNOT 0 1\n");
        let p = one_qubit(vec![Gate1Q::phase(0.5)]);
        assert_eq!(render(&p), "qubits 1\nstep PHASE(5.0000000000000000e-1) 0\n");
    }

    #[test]
    fn hash_depends_on_content() {
        let a = one_qubit(vec![Gate1Q::h()]);
        let b = one_qubit(vec![Gate1Q::x()]);
        assert_ne!(a.hash_hex(), b.hash_hex());
        assert_eq!(a.hash_hex().len(), 64);
        assert_eq!(a.seed(), one_qubit(vec![Gate1Q::h()]).seed());
    }
}
