//! Heisenberg-picture simulation of qubit networks whose descriptors need not
//! commute at spacelike separation.
//!
//! Descriptors are dense complex matrices. Each qubit carries a triple
//! `(q_x, q_y, q_z)` obeying the Pauli relations; gates are Hamiltonians
//! written in terms of the current descriptors, and closed-timelike-curve
//! identifications are enforced by fixed-point and root solving.

pub mod algebra;
pub mod ctc;
pub mod dynamics;
pub mod gates;
pub mod linalg;
pub mod network;
pub mod qnum;

pub use num_complex::Complex64 as C64;
pub use qnum::{Axis, DescriptorTriple, HeisenbergState, QNumber};
