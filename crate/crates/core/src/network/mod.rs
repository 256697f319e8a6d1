//! Networks of qubits driven by an integer-time gate schedule, the JSON spec
//! format that describes them, and reporting.

mod report;
mod run;
mod spec;

pub use report::{report, write_csv, NetworkReport, PairReport, QubitReport};
pub use run::{run_schedule, RunOptions, RunOutput, Snapshot};
pub use spec::{
    build_network, parse_angle, GateDoc, HilbertRole, NetworkDoc, NetworkState, QubitDoc, QubitPreset, Slot, SlotDoc,
    StateDoc,
};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::dynamics::DynamicsError;
use crate::gates::GateError;
use crate::qnum::QnumError;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("cannot parse network spec: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("qubit '{0}' is declared twice")]
    DuplicateQubit(String),
    #[error("network has no qubits")]
    NoQubits,
    #[error("qubit '{qubit}': {reason}")]
    Preset { qubit: String, reason: String },
    #[error("qubit '{qubit}' fails the Pauli relations (residual {residual:.3e})")]
    NotPauli { qubit: String, residual: f64 },
    #[error("Heisenberg state: {0}")]
    State(QnumError),
    #[error("slot {slot}: {reason}")]
    Schedule { slot: i64, reason: String },
    #[error("slot {slot}: unknown gate '{gate}'")]
    UnknownGate { slot: i64, gate: String },
    #[error("slot {slot}: gate '{gate}': {reason}")]
    BadGate { slot: i64, gate: String, reason: String },
    #[error("slot {slot}: {source}")]
    Gate { slot: i64, source: GateError },
    #[error("slot {slot}: {source}")]
    Dynamics { slot: i64, source: DynamicsError },
    #[error("ctc: {0}")]
    Ctc(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Qnum(#[from] QnumError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
