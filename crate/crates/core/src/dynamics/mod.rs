//! Heisenberg-picture dynamics.
//!
//! Each qubit `a` carries a unitary `U_a(t)` with `q_a(t) = U_a†(t) q_a(0) U_a(t)`
//! and `dU_a/dt = i·U_a·H_a(q_1(t), …, q_n(t))`, where the Hamiltonian is an
//! expression in the current descriptors. With this sign convention a
//! Hamiltonian `(ω/2)·q_x` rotates `q_y` towards `q_z`:
//! `q_y(t) = cos(ωt) q_y + sin(ωt) q_z`.

mod evolve;
mod expr;

pub use evolve::{
    evolve, generator_from_trajectory, Evolution, EvolveOptions, Integrator, Method, UnitaryTrajectory, DRIFT_BOUND,
};
pub use expr::{eval_hamiltonian, eval_hamiltonian_with_tol, HamiltonianExpr};

use thiserror::Error;

use crate::qnum::{rot_x, DescriptorTriple, QnumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("unknown qubit '{0}'")]
    UnknownQubit(String),
    #[error("Hamiltonian {expr} is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64, expr: String },
    #[error("unitarity drift {defect:.3e} on qubit {qubit} at t = {time}; reduce the step")]
    UnitarityDrift { qubit: String, time: f64, defect: f64 },
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("invalid interval [{t0}, {t1}]")]
    InvalidInterval { t0: f64, t1: f64 },
    #[error("closed form requested but the Hamiltonians are not constant")]
    NotConstant,
    #[error("t = {t} is not interior to the sampled range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("trajectory has {0} samples; at least 3 are needed")]
    TooFewSamples(usize),
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

/// Closed-form rotation about the qubit's own x axis.
pub fn rotate_x(triple: &DescriptorTriple, angle: f64) -> DescriptorTriple {
    crate::qnum::RotationParameters { matrix: rot_x(angle), theta: 0.0, phi: 0.0, psi: 0.0 }.apply(triple)
}

/// `α(t) = 2·arctan(tanh t)`, the self-consistent angle of the two-qubit model.
pub fn model_alpha(t: f64) -> f64 {
    2.0 * t.tanh().atan()
}
