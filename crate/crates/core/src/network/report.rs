use std::io::Write;

use serde::Serialize;

use super::{NetworkError, Snapshot};
use crate::algebra::{
    classify_pair, descriptor_algebra, hilbert_dimension, HilbertDimension, PairClassification, EVOLVED_RANK_TOL,
};
use crate::gates::{attribute_of_triple, Attribute};
use crate::qnum::{expectation, is_sharp, Axis, DescriptorSet, HeisenbergState, EVOLVED_TOL};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QubitReport {
    pub id: String,
    pub expectation: [f64; 3],
    pub sharp: [bool; 3],
    pub attribute: Option<Attribute>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub a: String,
    pub b: String,
    pub classification: PairClassification,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetworkReport {
    pub time: f64,
    pub hilbert_dim: usize,
    pub qubits: Vec<QubitReport>,
    pub pairs: Vec<PairReport>,
    pub algebra_dimension: usize,
    pub inferred_hilbert_dimension: HilbertDimension,
}

/// Per-qubit expectations, sharpness and attributes, pair classifications,
/// and the generated algebra of all descriptors.
pub fn report(set: &DescriptorSet, state: &HeisenbergState, time: f64) -> Result<NetworkReport, NetworkError> {
    let mut qubits = Vec::new();
    for (id, t) in set.iter() {
        let mut e = [0.0; 3];
        let mut s = [false; 3];
        for axis in Axis::ALL {
            e[axis.index()] = expectation(t.get(axis), state)?;
            s[axis.index()] = is_sharp(t.get(axis), state, EVOLVED_TOL)?;
        }
        qubits.push(QubitReport {
            id: id.to_string(),
            expectation: e,
            sharp: s,
            attribute: attribute_of_triple(t, state, EVOLVED_TOL),
        });
    }
    let triples: Vec<_> = set.iter().collect();
    let mut pairs = Vec::new();
    for (i, (a, ta)) in triples.iter().enumerate() {
        for (b, tb) in &triples[i + 1..] {
            pairs.push(PairReport {
                a: a.to_string(),
                b: b.to_string(),
                classification: classify_pair(ta, tb, EVOLVED_TOL),
            });
        }
    }
    let alg = descriptor_algebra(set.triples(), EVOLVED_RANK_TOL)?;
    Ok(NetworkReport {
        time,
        hilbert_dim: set.dim(),
        qubits,
        pairs,
        algebra_dimension: alg.dimension(),
        inferred_hilbert_dimension: hilbert_dimension(&alg)?,
    })
}

/// Columns `time,qubit,axis,expectation,sharp` with `sharp` as 0/1.
pub fn write_csv<W: Write>(out: W, snapshots: &[Snapshot], state: &HeisenbergState) -> Result<(), NetworkError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["time", "qubit", "axis", "expectation", "sharp"])?;
    for s in snapshots {
        for (id, t) in s.descriptors.iter() {
            for axis in Axis::ALL {
                let e = expectation(t.get(axis), state)?;
                let sharp = is_sharp(t.get(axis), state, EVOLVED_TOL)?;
                w.write_record([
                    format!("{}", s.time),
                    id.to_string(),
                    axis.to_string(),
                    format!("{e:.12}"),
                    if sharp { "1" } else { "0" }.to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| NetworkError::Csv(e.into()))?;
    Ok(())
}
