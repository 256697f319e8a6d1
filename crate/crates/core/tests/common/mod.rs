#![allow(dead_code)]

use unorthodox::dynamics::EvolveOptions;
use unorthodox::gates::{apply_gate, not_gate, Attribute};
use unorthodox::qnum::DescriptorSet;
use unorthodox::{DescriptorTriple, HeisenbergState};

/// Flips every listed qubit with a NOT so its attribute becomes minus-one.
pub fn flip(set: &DescriptorSet, minus: &[&str]) -> DescriptorSet {
    let mut out = set.clone();
    for q in minus {
        out = apply_gate(&out, &not_gate(q), 0.0, &EvolveOptions::default()).unwrap().descriptors;
    }
    out
}

pub fn prepare(set: &DescriptorSet, attrs: &[(&str, Attribute)]) -> DescriptorSet {
    let minus: Vec<&str> = attrs.iter().filter(|(_, a)| *a == Attribute::MinusOne).map(|(q, _)| *q).collect();
    flip(set, &minus)
}

/// Control A and target B commute; reference C is a copy of A. Dim 4.
pub fn cnot_commuting() -> (DescriptorSet, HeisenbergState) {
    let a = DescriptorTriple::tensor_slot("A", 0, 2);
    let set = DescriptorSet::from_triples(4, [a.clone(), DescriptorTriple::tensor_slot("B", 1, 2), a.with_label("C")])
        .unwrap();
    (set, HeisenbergState::basis(4, 0))
}

/// Control, target and reference all share one qubit's algebra. Dim 2.
pub fn cnot_noncommuting() -> (DescriptorSet, HeisenbergState) {
    let set = DescriptorSet::from_triples(2, ["A", "B", "C"].map(DescriptorTriple::pauli)).unwrap();
    (set, HeisenbergState::basis(2, 0))
}

/// Controls A, B and target C on separate tensor slots; D, E copy A, B. Dim 8.
pub fn ccnot_commuting() -> (DescriptorSet, HeisenbergState) {
    let a = DescriptorTriple::tensor_slot("A", 0, 3);
    let b = DescriptorTriple::tensor_slot("B", 1, 3);
    let set = DescriptorSet::from_triples(
        8,
        [a.clone(), b.clone(), DescriptorTriple::tensor_slot("C", 2, 3), a.with_label("D"), b.with_label("E")],
    )
    .unwrap();
    (set, HeisenbergState::basis(8, 0))
}

/// All five qubits are copies of one Pauli triple. Dim 2.
pub fn ccnot_noncommuting() -> (DescriptorSet, HeisenbergState) {
    let set = DescriptorSet::from_triples(2, ["A", "B", "C", "D", "E"].map(DescriptorTriple::pauli)).unwrap();
    (set, HeisenbergState::basis(2, 0))
}

pub const BOTH: [Attribute; 2] = [Attribute::PlusOne, Attribute::MinusOne];
