use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{DescriptorTriple, QnumError};

/// Ordered map from qubit id to its current triple, all on one carrier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSet {
    dim: usize,
    qubits: IndexMap<String, DescriptorTriple>,
}

impl DescriptorSet {
    pub fn new(dim: usize) -> Self {
        DescriptorSet { dim, qubits: IndexMap::new() }
    }

    pub fn from_triples(dim: usize, triples: impl IntoIterator<Item = DescriptorTriple>) -> Result<Self, QnumError> {
        let mut set = DescriptorSet::new(dim);
        for t in triples {
            set.insert(t)?;
        }
        Ok(set)
    }

    /// Inserts under the triple's label, replacing any previous entry.
    pub fn insert(&mut self, triple: DescriptorTriple) -> Result<(), QnumError> {
        if triple.dim() != self.dim {
            return Err(QnumError::DimensionMismatch { expected: self.dim, found: triple.dim() });
        }
        self.qubits.insert(triple.label().to_string(), triple);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&DescriptorTriple> {
        self.qubits.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.qubits.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.qubits.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DescriptorTriple)> {
        self.qubits.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn triples(&self) -> impl Iterator<Item = &DescriptorTriple> {
        self.qubits.values()
    }
}

impl std::ops::Index<&str> for DescriptorSet {
    type Output = DescriptorTriple;

    fn index(&self, id: &str) -> &DescriptorTriple {
        &self.qubits[id]
    }
}
