//! Named gates defined by their Hamiltonians, qubit attributes, and gate
//! validation.
//!
//! A gate is a set of Hamiltonians switched on for its duration; unitaries
//! on their own are not accepted as gate definitions.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{classify_pair, descriptor_algebra, AlgebraError, PairClassification, EVOLVED_RANK_TOL};
use crate::dynamics::{eval_hamiltonian_with_tol, evolve, DynamicsError, Evolution, EvolveOptions, HamiltonianExpr};
use crate::qnum::{expectation, is_sharp, Axis, DescriptorSet, DescriptorTriple, HeisenbergState, QNumber, QnumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("gate {gate}: duration must be positive, got {duration}")]
    InvalidDuration { gate: String, duration: f64 },
    #[error("gate {gate}: unknown qubit '{qubit}'")]
    UnknownQubit { gate: String, qubit: String },
    #[error("gate {gate}: qubit '{qubit}' appears more than once")]
    DuplicateParticipant { gate: String, qubit: String },
    #[error("gate {gate}: Hamiltonian on non-participant '{qubit}'")]
    StrayHamiltonian { gate: String, qubit: String },
    #[error("gate {gate}: precondition failed: {reason}")]
    Precondition { gate: String, reason: String },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Subject,
    Control,
    Target,
    Reference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub role: Role,
    pub qubit: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateKind {
    Not,
    SqrtNot,
    RotX { angle: f64 },
    Cnot,
    Ccnot,
    Wire,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub name: String,
    pub kind: GateKind,
    pub participants: Vec<Participant>,
    /// Hamiltonians of the participants; everything else is zero.
    pub hamiltonians: BTreeMap<String, HamiltonianExpr>,
    pub duration: f64,
}

impl GateSpec {
    pub fn qubits(&self) -> impl Iterator<Item = &str> {
        self.participants.iter().map(|p| p.qubit.as_str())
    }

    pub fn with_role(&self, role: Role) -> Vec<&str> {
        self.participants.iter().filter(|p| p.role == role).map(|p| p.qubit.as_str()).collect()
    }

    /// Structural checks that need no network.
    pub fn check(&self) -> Result<(), GateError> {
        if self.duration <= 0.0 || !self.duration.is_finite() {
            return Err(GateError::InvalidDuration { gate: self.name.clone(), duration: self.duration });
        }
        let mut seen = BTreeSet::new();
        for q in self.qubits() {
            if !seen.insert(q) {
                return Err(GateError::DuplicateParticipant { gate: self.name.clone(), qubit: q.to_string() });
            }
        }
        if let Some(q) = self.hamiltonians.keys().find(|q| !seen.contains(q.as_str())) {
            return Err(GateError::StrayHamiltonian { gate: self.name.clone(), qubit: q.clone() });
        }
        Ok(())
    }

    /// Structural checks plus existence of every participant in `set`.
    pub fn check_against(&self, set: &DescriptorSet) -> Result<(), GateError> {
        self.check()?;
        for q in self.qubits() {
            if !set.contains(q) {
                return Err(GateError::UnknownQubit { gate: self.name.clone(), qubit: q.to_string() });
            }
        }
        Ok(())
    }
}

fn single(name: &str, kind: GateKind, a: &str, h: HamiltonianExpr, duration: f64) -> GateSpec {
    GateSpec {
        name: name.to_string(),
        kind,
        participants: vec![Participant { role: Role::Subject, qubit: a.to_string() }],
        hamiltonians: BTreeMap::from([(a.to_string(), h)]),
        duration,
    }
}

/// `(π/2)·q_ax` for one unit.
pub fn not_gate(a: &str) -> GateSpec {
    single("not", GateKind::Not, a, HamiltonianExpr::q(a, Axis::X).scaled(FRAC_PI_2), 1.0)
}

/// The NOT Hamiltonian for half the duration.
pub fn sqrt_not_gate(a: &str) -> GateSpec {
    single("sqrt_not", GateKind::SqrtNot, a, HamiltonianExpr::q(a, Axis::X).scaled(FRAC_PI_2), 0.5)
}

/// `(angle/2)·q_ax`: rotates `(q_y, q_z)` by `angle` about the qubit's own x axis.
pub fn rot_x_gate(a: &str, angle: f64) -> GateSpec {
    single(
        &format!("rot_x({angle})"),
        GateKind::RotX { angle },
        a,
        HamiltonianExpr::q(a, Axis::X).scaled(angle / 2.0),
        1.0,
    )
}

/// Identity for one unit.
pub fn wire(a: &str) -> GateSpec {
    single("wire", GateKind::Wire, a, HamiltonianExpr::zero(), 1.0)
}

/// Target Hamiltonian `(π/2)·q_bx·P̄(q_az, q_cz)`.
pub fn cnot_gate(control: &str, target: &str, reference: &str) -> GateSpec {
    let h = HamiltonianExpr::product(HamiltonianExpr::q(target, Axis::X), HamiltonianExpr::p_bar(control, reference))
        .scaled(FRAC_PI_2);
    GateSpec {
        name: "cnot".into(),
        kind: GateKind::Cnot,
        participants: vec![
            Participant { role: Role::Control, qubit: control.into() },
            Participant { role: Role::Target, qubit: target.into() },
            Participant { role: Role::Reference, qubit: reference.into() },
        ],
        hamiltonians: BTreeMap::from([(target.to_string(), h)]),
        duration: 1.0,
    }
}

/// Target Hamiltonian `(π/2)·q_cx·P̄(q_az, q_dz)·P̄(q_bz, q_ez)`.
pub fn ccnot_gate(controls: [&str; 2], target: &str, references: [&str; 2]) -> GateSpec {
    let h = HamiltonianExpr::product(
        HamiltonianExpr::product(
            HamiltonianExpr::q(target, Axis::X),
            HamiltonianExpr::p_bar(controls[0], references[0]),
        ),
        HamiltonianExpr::p_bar(controls[1], references[1]),
    )
    .scaled(FRAC_PI_2);
    let mut participants: Vec<Participant> =
        controls.iter().map(|q| Participant { role: Role::Control, qubit: q.to_string() }).collect();
    participants.push(Participant { role: Role::Target, qubit: target.into() });
    participants.extend(references.iter().map(|q| Participant { role: Role::Reference, qubit: q.to_string() }));
    GateSpec {
        name: "ccnot".into(),
        kind: GateKind::Ccnot,
        participants,
        hamiltonians: BTreeMap::from([(target.to_string(), h)]),
        duration: 1.0,
    }
}

/// A gate given directly by its Hamiltonians; every key is a participant.
pub fn custom_gate(name: &str, hamiltonians: BTreeMap<String, HamiltonianExpr>, duration: f64) -> GateSpec {
    let mut qubits: BTreeSet<String> = hamiltonians.keys().cloned().collect();
    for h in hamiltonians.values() {
        qubits.extend(h.referenced_qubits());
    }
    GateSpec {
        name: name.to_string(),
        kind: GateKind::Custom,
        participants: qubits
            .into_iter()
            .map(|q| Participant {
                role: if hamiltonians.contains_key(&q) { Role::Subject } else { Role::Reference },
                qubit: q,
            })
            .collect(),
        hamiltonians,
        duration,
    }
}

/// `¼(2·1 − {q_az, q_cz})`.
pub fn p_bar(q_az: &QNumber, q_cz: &QNumber) -> QNumber {
    let n = q_az.dim();
    &QNumber::identity(n).scale(0.5) - &QNumber::anticommutator(q_az, q_cz).scale(0.25)
}

/// Sharp z value of a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attribute {
    PlusOne,
    MinusOne,
}

impl Attribute {
    pub fn value(self) -> f64 {
        match self {
            Attribute::PlusOne => 1.0,
            Attribute::MinusOne => -1.0,
        }
    }
}

/// Attribute of a single triple, if its z-observable is sharp at ±1.
pub fn attribute_of_triple(triple: &DescriptorTriple, state: &HeisenbergState, tol: f64) -> Option<Attribute> {
    let z = expectation(triple.z(), state).ok()?;
    if !is_sharp(triple.z(), state, tol).ok()? {
        return None;
    }
    if (z - 1.0).abs() <= tol {
        Some(Attribute::PlusOne)
    } else if (z + 1.0).abs() <= tol {
        Some(Attribute::MinusOne)
    } else {
        None
    }
}

/// Attribute of `qubit`; `None` when the qubit is unknown or not sharp at ±1.
pub fn attribute_of(set: &DescriptorSet, state: &HeisenbergState, qubit: &str, tol: f64) -> Option<Attribute> {
    attribute_of_triple(set.get(qubit)?, state, tol)
}

/// Control/reference pairing and reference attribute for conditional gates.
/// Other kinds have no preconditions beyond [`GateSpec::check_against`].
pub fn check_preconditions(
    gate: &GateSpec,
    set: &DescriptorSet,
    state: &HeisenbergState,
    tol: f64,
) -> Result<(), GateError> {
    gate.check_against(set)?;
    if !matches!(gate.kind, GateKind::Cnot | GateKind::Ccnot) {
        return Ok(());
    }
    let fail = |reason: String| GateError::Precondition { gate: gate.name.clone(), reason };
    let controls = gate.with_role(Role::Control);
    let references = gate.with_role(Role::Reference);
    if controls.len() != references.len() || controls.is_empty() {
        return Err(fail(format!("{} controls but {} references", controls.len(), references.len())));
    }
    for (a, c) in controls.iter().zip(&references) {
        let class = classify_pair(&set[*a], &set[*c], tol);
        if class != PairClassification::MaximallyNoncommuting {
            return Err(fail(format!("control {a} and reference {c} are {class:?}, not maximally non-commuting")));
        }
        if attribute_of(set, state, c, tol) != Some(Attribute::PlusOne) {
            return Err(fail(format!("reference {c} does not have attribute plus-one")));
        }
    }
    Ok(())
}

/// Runs `gate` from `t0` for its duration.
pub fn apply_gate(set: &DescriptorSet, gate: &GateSpec, t0: f64, opts: &EvolveOptions) -> Result<Evolution, GateError> {
    gate.check_against(set)?;
    Ok(evolve(set, &gate.hamiltonians, t0, t0 + gate.duration, opts)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateReport {
    pub gate: String,
    pub passed: bool,
    pub hermitian: bool,
    pub preconditions: bool,
    pub algebra_before: Option<usize>,
    pub algebra_after: Option<usize>,
    pub failures: Vec<String>,
}

impl GateReport {
    fn new(gate: &str) -> Self {
        GateReport {
            gate: gate.to_string(),
            passed: false,
            hermitian: false,
            preconditions: false,
            algebra_before: None,
            algebra_after: None,
            failures: Vec::new(),
        }
    }

    pub fn algebra_reduced(&self) -> bool {
        matches!((self.algebra_before, self.algebra_after), (Some(b), Some(a)) if a < b)
    }
}

fn algebra_dim(set: &DescriptorSet) -> Result<usize, AlgebraError> {
    Ok(descriptor_algebra(set.triples(), EVOLVED_RANK_TOL)?.dimension())
}

/// Checks preconditions, Hermiticity of every Hamiltonian on `set`, and that
/// running the gate preserves the dimension of the generated algebra.
pub fn validate_gate(
    set: &DescriptorSet,
    state: &HeisenbergState,
    gate: &GateSpec,
    opts: &EvolveOptions,
) -> Result<GateReport, GateError> {
    let mut report = GateReport::new(&gate.name);
    match check_preconditions(gate, set, state, crate::qnum::EVOLVED_TOL) {
        Ok(()) => report.preconditions = true,
        Err(GateError::Precondition { reason, .. }) => {
            report.failures.push(format!("precondition: {reason}"));
            return Ok(report);
        }
        Err(e) => return Err(e),
    }
    report.hermitian = true;
    for (q, h) in &gate.hamiltonians {
        if let Err(e) = eval_hamiltonian_with_tol(h, set, opts.hermitian_tol) {
            report.hermitian = false;
            report.failures.push(format!("hamiltonian of {q}: {e}"));
        }
    }
    if !report.hermitian {
        return Ok(report);
    }
    let before = algebra_dim(set)?;
    let ev = apply_gate(set, gate, 0.0, &EvolveOptions { record: false, ..*opts })?;
    let after = algebra_dim(&ev.descriptors)?;
    report.algebra_before = Some(before);
    report.algebra_after = Some(after);
    if before != after {
        report.failures.push(format!("algebra dimension changed {before} -> {after}"));
    }
    report.passed = report.failures.is_empty();
    Ok(report)
}

/// A gate given only as per-qubit unitaries, `q_a -> U_a† q_a U_a`.
#[derive(Clone, Debug)]
pub struct RawUnitaryGate {
    pub name: String,
    pub unitaries: BTreeMap<String, QNumber>,
}

/// `½(1 + Σ_i q_ai q_bi)`, which exchanges the descriptors of `a` and `b`
/// when they commute.
pub fn swap_unitary(a: &DescriptorTriple, b: &DescriptorTriple) -> QNumber {
    let mut acc = QNumber::identity(a.dim());
    for axis in Axis::ALL {
        acc = &acc + &(a.get(axis) * b.get(axis));
    }
    acc.scale(0.5)
}

/// The swap-plus-wire pair: swap unitary on `a`, identity on `b`.
pub fn swap_plus_wire(set: &DescriptorSet, a: &str, b: &str) -> Result<RawUnitaryGate, GateError> {
    let unknown = |q: &str| GateError::UnknownQubit { gate: "swap+wire".into(), qubit: q.to_string() };
    let ta = set.get(a).ok_or_else(|| unknown(a))?;
    let tb = set.get(b).ok_or_else(|| unknown(b))?;
    Ok(RawUnitaryGate {
        name: "swap+wire".into(),
        unitaries: BTreeMap::from([
            (a.to_string(), swap_unitary(ta, tb)),
            (b.to_string(), QNumber::identity(set.dim())),
        ]),
    })
}

/// Applies the conjugations and reports the algebra dimensions. Always
/// rejected: a gate must be defined by Hamiltonians.
pub fn validate_raw_unitary_gate(
    set: &DescriptorSet,
    gate: &RawUnitaryGate,
) -> Result<(GateReport, DescriptorSet), GateError> {
    let mut report = GateReport::new(&gate.name);
    let mut out = set.clone();
    for (q, u) in &gate.unitaries {
        let t = set.get(q).ok_or_else(|| GateError::UnknownQubit { gate: gate.name.clone(), qubit: q.clone() })?;
        out.insert(t.conjugate_by(u))?;
    }
    let before = algebra_dim(set)?;
    let after = algebra_dim(&out)?;
    report.algebra_before = Some(before);
    report.algebra_after = Some(after);
    report.failures.push("no generating Hamiltonian".into());
    if after < before {
        report.failures.push(format!("algebra dimension reduced {before} -> {after}"));
    } else if after != before {
        report.failures.push(format!("algebra dimension changed {before} -> {after}"));
    }
    Ok((report, out))
}
