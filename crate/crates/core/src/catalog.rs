//! Bundled circuits: the single-qubit Deutsch-Jozsa example, Bell
//! entangle/disentangle families for gap-scaling studies, and identity chains.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate1Q, Operation, Step};
use crate::error::{Error, Result};

fn single_qubit(name: &str, gates: Vec<Gate1Q>) -> Circuit {
    let steps = gates
        .into_iter()
        .map(|g| Step::new(vec![Operation::single(0, g)]))
        .collect();
    Circuit::new(name, 1, steps).expect("single-qubit chain is valid")
}

/// One-qubit Deutsch-Jozsa for a constant function: `H`, the phase oracle
/// `|x> -> (-1)^{f(x)} |x>`, `H`. Four clock rows in total.
pub fn deutsch_jozsa(f_value: bool) -> Circuit {
    let oracle = if f_value {
        let m = Complex64::new(-1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Gate1Q::custom([[m, z], [z, m]]).expect("-I is unitary")
    } else {
        Gate1Q::identity()
    };
    let name = if f_value { "deutsch-jozsa-f1" } else { "deutsch-jozsa-f0" };
    single_qubit(name, vec![Gate1Q::h(), oracle, Gate1Q::h()])
}

/// The `f == 0` instance.
pub fn deutsch_jozsa_example() -> Circuit {
    deutsch_jozsa(false)
}

/// `N` identity gates on one qubit.
pub fn identity_chain(num_steps: usize) -> Result<Circuit> {
    if num_steps == 0 {
        return Err(Error::Precondition("identity chain needs N >= 1".into()));
    }
    Ok(single_qubit(
        &format!("identity-{num_steps}"),
        vec![Gate1Q::identity(); num_steps],
    ))
}

/// `H` on qubit 0 followed by `CNOT 0 1`.
pub fn bell() -> Circuit {
    Circuit::new(
        "bell",
        2,
        vec![
            Step::new(vec![
                Operation::single(0, Gate1Q::h()),
                Operation::single(1, Gate1Q::identity()),
            ]),
            Step::new(vec![Operation::cnot(0, 1)]),
        ],
    )
    .expect("bell circuit is valid")
}

/// Where the string of single-qubit gates sits in the Bell family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Before the entangling Hadamard.
    Before,
    /// Between the entangling and the disentangling CNOT.
    Middle,
    /// After the disentangling Hadamard.
    After,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Before, Stage::Middle, Stage::After];
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Before => "before",
            Stage::Middle => "middle",
            Stage::After => "after",
        })
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "before" => Ok(Stage::Before),
            "middle" => Ok(Stage::Middle),
            "after" => Ok(Stage::After),
            other => Err(Error::Precondition(format!(
                "unknown stage '{other}' (expected before|middle|after)"
            ))),
        }
    }
}

/// Two-qubit family with `N` steps: `H`, `CNOT` (Bell state), `CNOT`, `H`
/// (disentangle), plus `N - 4` steps of single-qubit gates on qubit 0
/// alternating `H`, `T` (qubit 1 idles) inserted at `stage`.
pub fn bell_disentangle(num_steps: usize, stage: Stage) -> Result<Circuit> {
    if num_steps < 4 {
        return Err(Error::Precondition(format!(
            "bell-disentangle family needs N >= 4, got {num_steps}"
        )));
    }
    let hadamard_step = || {
        Step::new(vec![
            Operation::single(0, Gate1Q::h()),
            Operation::single(1, Gate1Q::identity()),
        ])
    };
    let cnot_step = || Step::new(vec![Operation::cnot(0, 1)]);
    let core = [hadamard_step(), cnot_step(), cnot_step(), hadamard_step()];
    let string: Vec<Step> = (0..num_steps - 4)
        .map(|k| {
            let g = if k % 2 == 0 { Gate1Q::h() } else { Gate1Q::t() };
            Step::new(vec![
                Operation::single(0, g),
                Operation::single(1, Gate1Q::identity()),
            ])
        })
        .collect();
    let split = match stage {
        Stage::Before => 0,
        Stage::Middle => 2,
        Stage::After => 4,
    };
    let mut steps = core[..split].to_vec();
    steps.extend(string);
    steps.extend_from_slice(&core[split..]);
    Circuit::new(format!("bell-disentangle-{stage}-{num_steps}"), 2, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deutsch_jozsa_layout() {
        let c = deutsch_jozsa(false);
        assert_eq!(c.num_qubits, 1);
        assert_eq!(c.num_steps(), 3);
        assert!(c.steps[1].single_on(0).unwrap().is_identity_kind());

        let c1 = deutsch_jozsa(true);
        let m = c1.steps[1].single_on(0).unwrap().matrix();
        assert_eq!(m[0][0], Complex64::new(-1.0, 0.0));
        assert_eq!(m[1][1], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn bell_family_has_requested_length_and_two_cnots() {
        for stage in Stage::ALL {
            for n in 4..=12 {
                let c = bell_disentangle(n, stage).unwrap();
                assert_eq!(c.num_steps(), n);
                assert_eq!(c.cnot_count(), 2);
            }
        }
        assert!(bell_disentangle(3, Stage::After).is_err());
    }

    #[test]
    fn stage_round_trips_through_text() {
        for stage in Stage::ALL {
            assert_eq!(stage.to_string().parse::<Stage>().unwrap(), stage);
        }
    }
}
