use serde::Serialize;

use super::CtcError;
use crate::gates::{GateKind, Role};
use crate::network::NetworkState;

pub type BitMap = Box<dyn Fn(&[i8]) -> Vec<i8> + Send + Sync>;

/// Bits take values in {+1, −1}. Every input is either free (set from
/// outside) or looped (fed from an output through an identification).
pub struct ClassicalCtcProblem {
    pub bits: Vec<String>,
    pub free_bits: Vec<usize>,
    pub gate_map: BitMap,
    /// `(output slot, input slot)`: the input must equal that output.
    pub identifications: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalSolution {
    /// Values of the free bits, in `free_bits` order.
    pub free: Vec<i8>,
    /// Every full input assignment consistent with the identifications.
    pub consistent: Vec<Vec<i8>>,
}

fn assignments(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0u32..(1u32 << n)).map(move |m| (0..n).map(|k| if m >> k & 1 == 0 { 1 } else { -1 }).collect())
}

/// For each assignment of the free bits, all looped-bit assignments that
/// satisfy every identification. An empty `consistent` list is a
/// contradiction.
pub fn classical_ctc_enumerate(problem: &ClassicalCtcProblem) -> Result<Vec<ClassicalSolution>, CtcError> {
    let n = problem.bits.len();
    if n > 20 {
        return Err(CtcError::TooManyBits(n));
    }
    let looped: Vec<usize> = problem.identifications.iter().map(|(_, i)| *i).collect();
    for k in 0..n {
        let free = problem.free_bits.contains(&k);
        if free == looped.contains(&k) {
            return Err(CtcError::InvalidIdentification(format!(
                "bit '{}' must be exactly one of free or looped",
                problem.bits[k]
            )));
        }
    }
    let mut out = Vec::new();
    for free in assignments(problem.free_bits.len()) {
        let mut consistent = Vec::new();
        for lv in assignments(looped.len()) {
            let mut input = vec![0i8; n];
            for (k, v) in problem.free_bits.iter().zip(&free) {
                input[*k] = *v;
            }
            for (k, v) in looped.iter().zip(&lv) {
                input[*k] = *v;
            }
            let output = (problem.gate_map)(&input);
            if problem.identifications.iter().all(|(o, i)| output[*o] == input[*i]) {
                consistent.push(input);
            }
        }
        out.push(ClassicalSolution { free, consistent });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum BitGate {
    Not(usize),
    /// Flip `target` iff every `(control, reference)` pair disagrees.
    Conditional {
        pairs: Vec<(usize, usize)>,
        target: usize,
    },
}

/// The classical counterpart of a network: each qubit becomes a bit, NOT
/// flips, CNOT/CCNOT flip the target iff every control differs from its
/// reference, and the ctc pairs become identifications. Old qubits are the
/// looped inputs; everything else is free.
pub fn classical_problem_from_network(net: &NetworkState) -> Result<ClassicalCtcProblem, CtcError> {
    let (ident, _) = net.ctc.as_ref().ok_or(CtcError::NoIdentification)?;
    let bits: Vec<String> = net.qubits.ids().map(str::to_string).collect();
    let idx = |q: &str| bits.iter().position(|b| b == q).expect("gate qubits exist");
    let mut program = Vec::new();
    for slot in &net.schedule {
        for g in &slot.gates {
            match g.kind {
                GateKind::Wire => {}
                GateKind::Not => program.push(BitGate::Not(idx(g.with_role(Role::Subject)[0]))),
                GateKind::Cnot | GateKind::Ccnot => {
                    let controls = g.with_role(Role::Control);
                    let refs = g.with_role(Role::Reference);
                    program.push(BitGate::Conditional {
                        pairs: controls.iter().zip(&refs).map(|(c, r)| (idx(c), idx(r))).collect(),
                        target: idx(g.with_role(Role::Target)[0]),
                    });
                }
                _ => return Err(CtcError::NotClassical(g.name.clone())),
            }
        }
    }
    let identifications: Vec<(usize, usize)> = ident.pairs.iter().map(|p| (idx(&p.young), idx(&p.old))).collect();
    let free_bits = (0..bits.len()).filter(|k| !identifications.iter().any(|(_, i)| i == k)).collect();
    let gate_map = move |input: &[i8]| -> Vec<i8> {
        let mut x = input.to_vec();
        for g in &program {
            match g {
                BitGate::Not(a) => x[*a] = -x[*a],
                BitGate::Conditional { pairs, target } => {
                    if pairs.iter().all(|(c, r)| x[*c] * x[*r] == -1) {
                        x[*target] = -x[*target];
                    }
                }
            }
        }
        x
    };
    Ok(ClassicalCtcProblem { bits, free_bits, gate_map: Box::new(gate_map), identifications })
}
