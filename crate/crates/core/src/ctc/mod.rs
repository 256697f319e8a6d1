//! Closed-timelike-curve consistency: the younger copy of a qubit at time
//! `T` must equal the older copy at time 0. Provides the residual, a damped
//! fixed-point solver over initial triples, a scalar root solver, a
//! classical enumeration oracle and the built-in scenarios.

mod classical;
mod scenarios;
mod solver;

pub use classical::{classical_ctc_enumerate, classical_problem_from_network, ClassicalCtcProblem, ClassicalSolution};
pub use scenarios::{
    builtin_spec, run_classical_grandfather_scenario, run_grandfather_scenario, run_hilbert_creation_scenario,
    run_model_theory_scenario, Direction, GRANDFATHER_SPEC, HILBERT_CREATION_SPEC, MODEL_THEORY_SPEC,
};
pub use solver::{
    fixed_point_solve, fixed_point_solve_from, multistart_solve, scalar_self_consistency, MultistartReport, ScalarRoot,
    SolverOptions,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{run_schedule, NetworkError, NetworkState, RunOptions};
use crate::qnum::{DescriptorTriple, QnumError};

#[derive(Debug, Error)]
pub enum CtcError {
    #[error("invalid identification: {0}")]
    InvalidIdentification(String),
    #[error("network has no ctc section")]
    NoIdentification,
    #[error("x - f(x) does not change sign on [{lo}, {hi}] (values {g_lo:.3e}, {g_hi:.3e})")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("function is not finite at x = {0}")]
    NotFinite(f64),
    #[error("young qubit {qubit} left the span of its reference (residual {residual:.3e})")]
    NotProjectable { qubit: String, residual: f64 },
    #[error("no sharp z direction exists for {0} under the Heisenberg state")]
    NoSharpSubset(String),
    #[error("{0} bits is too many to enumerate (limit 20)")]
    TooManyBits(usize),
    #[error("gate '{0}' has no classical action")]
    NotClassical(String),
    #[error("failed checks: {}", .0.join(", "))]
    Verification(Vec<String>),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtcPair {
    /// Qubit read at the final time.
    pub young: String,
    /// Qubit read at time 0.
    pub old: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CtcIdentification {
    pub pairs: Vec<CtcPair>,
}

impl CtcIdentification {
    pub fn new(pairs: Vec<CtcPair>) -> Result<Self, CtcError> {
        let mut seen = BTreeSet::new();
        for p in &pairs {
            if p.young == p.old {
                return Err(CtcError::InvalidIdentification(format!("'{}' is identified with itself", p.young)));
            }
            for q in [&p.young, &p.old] {
                if !seen.insert(q.clone()) {
                    return Err(CtcError::InvalidIdentification(format!("'{q}' appears in more than one pair")));
                }
            }
        }
        Ok(CtcIdentification { pairs })
    }

    pub fn pair(young: &str, old: &str) -> Self {
        CtcIdentification { pairs: vec![CtcPair { young: young.into(), old: old.into() }] }
    }
}

/// Max over pairs of the componentwise trace-norm distance between the old
/// qubit at time 0 and the young qubit at time `t`.
pub fn consistency_residual(
    net: &NetworkState,
    ident: &CtcIdentification,
    t: f64,
    opts: &RunOptions,
) -> Result<f64, CtcError> {
    let out = run_schedule(net, &RunOptions { t_end: Some(t), ..*opts })?;
    Ok(pair_residual(net, ident, &out.final_descriptors))
}

fn pair_residual(net: &NetworkState, ident: &CtcIdentification, at_t: &crate::qnum::DescriptorSet) -> f64 {
    ident.pairs.iter().map(|p| net.qubits[p.old.as_str()].trace_distance(&at_t[p.young.as_str()])).fold(0.0, f64::max)
}

/// One named verification with its measured deviation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub solved: bool,
    pub residual: f64,
    pub iterations: usize,
    pub parameters: BTreeMap<String, f64>,
    pub initial_descriptors: BTreeMap<String, DescriptorTriple>,
    pub final_descriptors: BTreeMap<String, DescriptorTriple>,
    pub checks: Vec<Check>,
}

impl ScenarioResult {
    pub fn new(name: &str) -> Self {
        ScenarioResult { name: name.to_string(), ..Default::default() }
    }

    /// Passes when `value ≤ tol`.
    pub fn check(&mut self, name: impl Into<String>, value: f64, tol: f64) -> bool {
        let passed = value <= tol;
        self.checks.push(Check { name: name.into(), passed, value, tol });
        passed
    }

    pub fn check_flag(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn verify(&self) -> Result<(), CtcError> {
        let failed: Vec<String> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CtcError::Verification(failed))
        }
    }
}
