use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::ctc::{CtcIdentification, CtcPair};
use crate::dynamics::{eval_hamiltonian_with_tol, HamiltonianExpr};
use crate::gates::{
    ccnot_gate, check_preconditions, cnot_gate, custom_gate, not_gate, rot_x_gate, sqrt_not_gate, wire, GateKind,
    GateSpec, Role,
};
use crate::qnum::{
    common_plus_one_state, matrix_from_doc, matrix_to_doc, validate_pauli_triple, DescriptorSet, DescriptorTriple,
    HeisenbergState, MatrixDoc, QNumber, EVOLVED_TOL, EXACT_TOL,
};

/// The four qubits of the Hilbert-space creation construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HilbertRole {
    Q1,
    Q2,
    Q3,
    Q4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QubitPreset {
    /// Pauli matrices in tensor factor `index` of `of` (0-based).
    TensorSlot {
        index: usize,
        of: usize,
    },
    /// Same initial triple as an earlier qubit.
    CopyOf {
        qubit: String,
    },
    Explicit {
        x: MatrixDoc,
        y: MatrixDoc,
        z: MatrixDoc,
    },
    HilbertCreationSlot {
        role: HilbertRole,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitDoc {
    pub id: String,
    pub preset: QubitPreset,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub amplitudes: Vec<[f64; 2]>,
}

/// One gate in a slot. `gate` is one of `not`, `sqrt_not`, `rot_x(<angle>)`,
/// `cnot`, `ccnot`, `wire` or `hamiltonian`; the remaining fields depend on it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDoc {
    pub gate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub references: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonians: Option<BTreeMap<String, HamiltonianExpr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotDoc {
    pub slot: i64,
    pub gates: Vec<GateDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtcDoc {
    pub pairs: Vec<CtcPair>,
    pub time: f64,
}

/// Top-level spec document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub qubits: Vec<QubitDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateDoc>,
    #[serde(default)]
    pub schedule: Vec<SlotDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ctc: Option<CtcDoc>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slot {
    pub slot: i64,
    pub gates: Vec<GateSpec>,
}

impl Slot {
    /// `max(1, longest gate)`.
    pub fn length(&self) -> f64 {
        self.gates.iter().map(|g| g.duration).fold(1.0, f64::max)
    }
}

/// A built network: initial descriptors, Heisenberg state, schedule and
/// optional time-loop identification.
#[derive(Clone, Debug)]
pub struct NetworkState {
    pub name: String,
    pub qubits: DescriptorSet,
    pub state: HeisenbergState,
    pub schedule: Vec<Slot>,
    pub ctc: Option<(CtcIdentification, f64)>,
}

impl NetworkState {
    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        build_network(&serde_json::from_str(text)?)
    }

    pub fn hilbert_dim(&self) -> usize {
        self.qubits.dim()
    }

    /// End of the last slot.
    pub fn schedule_end(&self) -> f64 {
        self.schedule.iter().map(|s| s.slot as f64 + s.length()).fold(0.0, f64::max)
    }

    /// Same network with some initial triples replaced.
    pub fn with_initial(&self, triples: impl IntoIterator<Item = DescriptorTriple>) -> Result<Self, NetworkError> {
        let mut out = self.clone();
        for t in triples {
            if !out.qubits.contains(t.label()) {
                return Err(NetworkError::Preset { qubit: t.label().to_string(), reason: "not in the network".into() });
            }
            out.qubits.insert(t)?;
        }
        Ok(out)
    }

    /// Spec document with every triple and the state written out explicitly.
    pub fn to_doc(&self) -> NetworkDoc {
        NetworkDoc {
            name: self.name.clone(),
            description: None,
            qubits: self
                .qubits
                .iter()
                .map(|(id, t)| QubitDoc {
                    id: id.to_string(),
                    preset: QubitPreset::Explicit {
                        x: matrix_to_doc(t.x().matrix()),
                        y: matrix_to_doc(t.y().matrix()),
                        z: matrix_to_doc(t.z().matrix()),
                    },
                })
                .collect(),
            state: Some(StateDoc { amplitudes: self.state.amplitudes().iter().map(|c| [c.re, c.im]).collect() }),
            schedule: self
                .schedule
                .iter()
                .map(|s| SlotDoc { slot: s.slot, gates: s.gates.iter().map(gate_to_doc).collect() })
                .collect(),
            ctc: self.ctc.as_ref().map(|(id, t)| CtcDoc { pairs: id.pairs.clone(), time: *t }),
        }
    }
}

fn hilbert_creation_triple(role: HilbertRole) -> [QNumber; 3] {
    let one = QNumber::identity(2);
    let (x, y, z) = (QNumber::sigma_x(), QNumber::sigma_y(), QNumber::sigma_z());
    match role {
        HilbertRole::Q1 | HilbertRole::Q2 => [x.kron(&one), y.kron(&one), z.kron(&one)],
        HilbertRole::Q3 => [x.kron(&one), y.kron(&z), z.kron(&z)],
        HilbertRole::Q4 => [x.kron(&x), y.kron(&x), z.kron(&one)],
    }
}

fn preset_triple(
    id: &str,
    preset: &QubitPreset,
    built: &BTreeMap<String, DescriptorTriple>,
) -> Result<DescriptorTriple, NetworkError> {
    let bad = |reason: String| NetworkError::Preset { qubit: id.to_string(), reason };
    Ok(match preset {
        QubitPreset::TensorSlot { index, of } => {
            if *of == 0 || index >= of || *of > 10 {
                return Err(bad(format!("invalid tensor slot {index} of {of}")));
            }
            DescriptorTriple::tensor_slot(id, *index, *of)
        }
        QubitPreset::CopyOf { qubit } => built
            .get(qubit)
            .ok_or_else(|| bad(format!("copy_of refers to undeclared qubit '{qubit}'")))?
            .clone()
            .with_label(id),
        QubitPreset::Explicit { x, y, z } => {
            let m = |d: &MatrixDoc| -> Result<QNumber, NetworkError> {
                QNumber::new(matrix_from_doc(d).map_err(|e| bad(e.to_string()))?).map_err(|e| bad(e.to_string()))
            };
            DescriptorTriple::new(id, m(x)?, m(y)?, m(z)?).map_err(|e| bad(e.to_string()))?
        }
        QubitPreset::HilbertCreationSlot { role } => DescriptorTriple::from_array(id, hilbert_creation_triple(*role))?,
    })
}

/// Parses `pi`, `pi/2`, `3*pi/4`, `-pi`, or a plain number.
pub fn parse_angle(text: &str) -> Option<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().ok()?),
        None => (s.as_str(), 1.0),
    };
    let coeff = match num {
        "pi" => 1.0,
        "-pi" => -1.0,
        _ => num.strip_suffix("*pi")?.parse::<f64>().ok()?,
    };
    Some(coeff * PI / den)
}

fn gate_from_doc(slot: i64, doc: &GateDoc) -> Result<GateSpec, NetworkError> {
    let bad = |reason: &str| NetworkError::BadGate { slot, gate: doc.gate.clone(), reason: reason.to_string() };
    let need = |field: &Option<String>, name: &str| field.clone().ok_or_else(|| bad(&format!("missing '{name}'")));
    let pair = |field: &Option<Vec<String>>, name: &str| -> Result<[String; 2], NetworkError> {
        match field.as_deref() {
            Some([a, b]) => Ok([a.clone(), b.clone()]),
            _ => Err(bad(&format!("'{name}' must list exactly two qubits"))),
        }
    };
    let mut gate = match doc.gate.as_str() {
        "not" => not_gate(&need(&doc.qubit, "qubit")?),
        "sqrt_not" => sqrt_not_gate(&need(&doc.qubit, "qubit")?),
        "wire" => wire(&need(&doc.qubit, "qubit")?),
        "cnot" => cnot_gate(
            &need(&doc.control, "control")?,
            &need(&doc.target, "target")?,
            &need(&doc.reference, "reference")?,
        ),
        "ccnot" => {
            let c = pair(&doc.controls, "controls")?;
            let r = pair(&doc.references, "references")?;
            ccnot_gate([&c[0], &c[1]], &need(&doc.target, "target")?, [&r[0], &r[1]])
        }
        "hamiltonian" => {
            let hs = doc.hamiltonians.clone().ok_or_else(|| bad("missing 'hamiltonians'"))?;
            custom_gate(doc.label.as_deref().unwrap_or("hamiltonian"), hs, doc.duration.unwrap_or(1.0))
        }
        other => match other.strip_prefix("rot_x(").and_then(|r| r.strip_suffix(')')) {
            Some(arg) => {
                let angle = parse_angle(arg).ok_or_else(|| bad("cannot parse the angle"))?;
                rot_x_gate(&need(&doc.qubit, "qubit")?, angle)
            }
            None => return Err(NetworkError::UnknownGate { slot, gate: other.to_string() }),
        },
    };
    if let Some(d) = doc.duration {
        gate.duration = d;
    }
    gate.check().map_err(|source| NetworkError::Gate { slot, source })?;
    Ok(gate)
}

fn gate_to_doc(g: &GateSpec) -> GateDoc {
    let one = |role: Role| g.with_role(role).first().map(|s| s.to_string());
    let many = |role: Role| Some(g.with_role(role).iter().map(|s| s.to_string()).collect::<Vec<_>>());
    let duration = if g.duration != default_duration(&g.kind) { Some(g.duration) } else { None };
    match &g.kind {
        GateKind::Not | GateKind::SqrtNot | GateKind::Wire | GateKind::RotX { .. } => GateDoc {
            gate: match &g.kind {
                GateKind::Not => "not".into(),
                GateKind::SqrtNot => "sqrt_not".into(),
                GateKind::Wire => "wire".into(),
                GateKind::RotX { angle } => format!("rot_x({angle:?})"),
                _ => unreachable!(),
            },
            qubit: one(Role::Subject),
            duration,
            ..Default::default()
        },
        GateKind::Cnot => GateDoc {
            gate: "cnot".into(),
            control: one(Role::Control),
            target: one(Role::Target),
            reference: one(Role::Reference),
            duration,
            ..Default::default()
        },
        GateKind::Ccnot => GateDoc {
            gate: "ccnot".into(),
            controls: many(Role::Control),
            target: one(Role::Target),
            references: many(Role::Reference),
            duration,
            ..Default::default()
        },
        GateKind::Custom => GateDoc {
            gate: "hamiltonian".into(),
            label: Some(g.name.clone()),
            hamiltonians: Some(g.hamiltonians.clone()),
            duration: Some(g.duration),
            ..Default::default()
        },
    }
}

fn default_duration(kind: &GateKind) -> f64 {
    if *kind == GateKind::SqrtNot {
        0.5
    } else {
        1.0
    }
}

/// Builds and validates a network from its spec document.
///
/// Triples must satisfy the Pauli relations; the state defaults to the
/// unique joint +1 eigenvector of all initial z-observables. Gate
/// preconditions and Hamiltonian Hermiticity are checked here for gates
/// whose participants have not been acted on by an earlier slot; the rest
/// are checked when the schedule runs.
pub fn build_network(doc: &NetworkDoc) -> Result<NetworkState, NetworkError> {
    if doc.qubits.is_empty() {
        return Err(NetworkError::NoQubits);
    }
    let mut built: BTreeMap<String, DescriptorTriple> = BTreeMap::new();
    let mut order = Vec::new();
    for q in &doc.qubits {
        if built.contains_key(&q.id) {
            return Err(NetworkError::DuplicateQubit(q.id.clone()));
        }
        let t = preset_triple(&q.id, &q.preset, &built)?;
        let rep = validate_pauli_triple(&t, EXACT_TOL)
            .map_err(|e| NetworkError::Preset { qubit: q.id.clone(), reason: e.to_string() })?;
        if !rep.passed {
            return Err(NetworkError::NotPauli { qubit: q.id.clone(), residual: rep.max_residual() });
        }
        built.insert(q.id.clone(), t.clone());
        order.push(t);
    }
    let dim = order[0].dim();
    let mut qubits = DescriptorSet::new(dim);
    for t in order {
        let id = t.label().to_string();
        qubits.insert(t).map_err(|e| NetworkError::Preset { qubit: id, reason: e.to_string() })?;
    }

    let state = match &doc.state {
        Some(s) => {
            let amps = DVector::from_iterator(
                s.amplitudes.len(),
                s.amplitudes.iter().map(|[re, im]| crate::C64::new(*re, *im)),
            );
            if amps.len() != dim {
                return Err(NetworkError::State(crate::qnum::QnumError::DimensionMismatch {
                    expected: dim,
                    found: amps.len(),
                }));
            }
            HeisenbergState::new(amps).map_err(NetworkError::State)?
        }
        None => {
            let zs: Vec<QNumber> = qubits.triples().map(|t| t.z().clone()).collect();
            common_plus_one_state(&zs).map_err(NetworkError::State)?
        }
    };

    let mut schedule = Vec::new();
    let mut touched: BTreeSet<String> = BTreeSet::new();
    let mut last_end: Option<f64> = None;
    for sd in &doc.schedule {
        let slot = sd.slot;
        if slot < 0 {
            return Err(NetworkError::Schedule { slot, reason: "slots start at 0".into() });
        }
        if let Some(prev) = schedule.last().map(|s: &Slot| s.slot) {
            if slot <= prev {
                return Err(NetworkError::Schedule { slot, reason: "slots must be strictly increasing".into() });
            }
        }
        if let Some(end) = last_end {
            if (slot as f64) < end - 1e-12 {
                return Err(NetworkError::Schedule {
                    slot,
                    reason: format!("starts before the previous slot ends at {end}"),
                });
            }
        }
        let gates = sd.gates.iter().map(|g| gate_from_doc(slot, g)).collect::<Result<Vec<_>, _>>()?;
        let mut seen = BTreeSet::new();
        for g in &gates {
            g.check_against(&qubits).map_err(|source| NetworkError::Gate { slot, source })?;
            for q in g.qubits() {
                if !seen.insert(q.to_string()) {
                    return Err(NetworkError::Schedule {
                        slot,
                        reason: format!("qubit '{q}' is in two gates of the slot"),
                    });
                }
            }
        }
        for g in &gates {
            if g.qubits().all(|q| !touched.contains(q)) {
                check_preconditions(g, &qubits, &state, EVOLVED_TOL)
                    .map_err(|source| NetworkError::Gate { slot, source })?;
                for h in g.hamiltonians.values() {
                    eval_hamiltonian_with_tol(h, &qubits, EXACT_TOL)
                        .map_err(|e| NetworkError::Gate { slot, source: e.into() })?;
                }
            }
        }
        for g in &gates {
            touched.extend(g.hamiltonians.iter().filter(|(_, h)| !h.is_structurally_zero()).map(|(q, _)| q.clone()));
        }
        let s = Slot { slot, gates };
        last_end = Some(slot as f64 + s.length());
        schedule.push(s);
    }

    let ctc = match &doc.ctc {
        Some(c) => {
            let ident = CtcIdentification::new(c.pairs.clone()).map_err(|e| NetworkError::Ctc(e.to_string()))?;
            for p in &ident.pairs {
                for q in [&p.young, &p.old] {
                    if !qubits.contains(q) {
                        return Err(NetworkError::Ctc(format!("unknown qubit '{q}'")));
                    }
                }
            }
            if c.time <= 0.0 || !c.time.is_finite() {
                return Err(NetworkError::Ctc(format!("time must be positive, got {}", c.time)));
            }
            Some((ident, c.time))
        }
        None => None,
    };

    Ok(NetworkState { name: doc.name.clone(), qubits, state, schedule, ctc })
}
