use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Axis, QNumber, QnumError, KRONECKER, LEVI_CIVITA};

/// The `(x, y, z)` descriptors of one qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripleDoc", into = "TripleDoc")]
pub struct DescriptorTriple {
    label: String,
    comps: [QNumber; 3],
}

#[derive(Clone, Serialize, Deserialize)]
struct TripleDoc {
    label: String,
    x: QNumber,
    y: QNumber,
    z: QNumber,
}

impl From<DescriptorTriple> for TripleDoc {
    fn from(t: DescriptorTriple) -> Self {
        let [x, y, z] = t.comps;
        TripleDoc { label: t.label, x, y, z }
    }
}

impl TryFrom<TripleDoc> for DescriptorTriple {
    type Error = QnumError;
    fn try_from(d: TripleDoc) -> Result<Self, QnumError> {
        DescriptorTriple::new(d.label, d.x, d.y, d.z)
    }
}

impl DescriptorTriple {
    pub fn new(label: impl Into<String>, x: QNumber, y: QNumber, z: QNumber) -> Result<Self, QnumError> {
        let dim = x.dim();
        y.check_dim(dim)?;
        z.check_dim(dim)?;
        Ok(DescriptorTriple { label: label.into(), comps: [x, y, z] })
    }

    pub fn from_array(label: impl Into<String>, comps: [QNumber; 3]) -> Result<Self, QnumError> {
        let [x, y, z] = comps;
        Self::new(label, x, y, z)
    }

    /// `(σx, σy, σz)` on a two-dimensional carrier.
    pub fn pauli(label: impl Into<String>) -> Self {
        DescriptorTriple { label: label.into(), comps: [QNumber::sigma_x(), QNumber::sigma_y(), QNumber::sigma_z()] }
    }

    /// Pauli matrices in factor `slot` of `n` two-level factors.
    pub fn tensor_slot(label: impl Into<String>, slot: usize, n: usize) -> Self {
        let comps = Axis::ALL.map(|a| QNumber::embed(&QNumber::pauli(a), slot, n));
        DescriptorTriple { label: label.into(), comps }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.comps[0].dim()
    }

    pub fn get(&self, axis: Axis) -> &QNumber {
        &self.comps[axis.index()]
    }

    pub fn x(&self) -> &QNumber {
        &self.comps[0]
    }

    pub fn y(&self) -> &QNumber {
        &self.comps[1]
    }

    pub fn z(&self) -> &QNumber {
        &self.comps[2]
    }

    pub fn components(&self) -> &[QNumber; 3] {
        &self.comps
    }

    pub fn iter(&self) -> impl Iterator<Item = (Axis, &QNumber)> {
        Axis::ALL.into_iter().zip(self.comps.iter())
    }

    /// Applies `f` to every component; the caller keeps dimensions equal.
    pub fn map(&self, f: impl Fn(&QNumber) -> QNumber) -> DescriptorTriple {
        DescriptorTriple { label: self.label.clone(), comps: [f(&self.comps[0]), f(&self.comps[1]), f(&self.comps[2])] }
    }

    /// `U† q U` componentwise.
    pub fn conjugate_by(&self, u: &QNumber) -> DescriptorTriple {
        self.map(|q| q.conjugate_by(u))
    }

    /// Largest componentwise trace-norm distance.
    pub fn trace_distance(&self, other: &DescriptorTriple) -> f64 {
        (0..3).map(|i| self.comps[i].trace_distance(&other.comps[i])).fold(0.0, f64::max)
    }

    /// Largest componentwise max-abs entry difference.
    pub fn max_abs_diff(&self, other: &DescriptorTriple) -> f64 {
        (0..3).map(|i| (&self.comps[i] - &other.comps[i]).max_abs()).fold(0.0, f64::max)
    }

    pub fn bit_identical(&self, other: &DescriptorTriple) -> bool {
        self.comps == other.comps
    }
}

/// Outcome of checking the Pauli relations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliReport {
    pub passed: bool,
    /// Largest Frobenius residual of `q_i q_j − δ_ij − i ε_ijk q_k`.
    pub max_product_residual: f64,
    pub max_hermitian_residual: f64,
    pub worst_pair: (Axis, Axis),
}

impl PauliReport {
    pub fn max_residual(&self) -> f64 {
        self.max_product_residual.max(self.max_hermitian_residual)
    }
}

pub fn validate_pauli_triple(triple: &DescriptorTriple, tol: f64) -> Result<PauliReport, QnumError> {
    validate_pauli_components(&triple.comps, tol)
}

pub fn validate_pauli_components(comps: &[QNumber; 3], tol: f64) -> Result<PauliReport, QnumError> {
    let dim = comps[0].dim();
    comps[1].check_dim(dim)?;
    comps[2].check_dim(dim)?;

    let one = QNumber::identity(dim);
    let i = C64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    let mut worst_pair = (Axis::X, Axis::X);
    for a in 0..3 {
        for b in 0..3 {
            let mut expected = one.scale(KRONECKER[a][b]);
            for (c, q) in comps.iter().enumerate() {
                let e = LEVI_CIVITA[a][b][c];
                if e != 0.0 {
                    expected = &expected + &q.scale_c(i * e);
                }
            }
            let r = (&comps[a] * &comps[b]).distance(&expected);
            if r > worst {
                worst = r;
                worst_pair = (Axis::from_index(a), Axis::from_index(b));
            }
        }
    }
    let herm = comps.iter().map(QNumber::hermitian_residual).fold(0.0, f64::max);
    Ok(PauliReport {
        passed: worst <= tol && herm <= tol,
        max_product_residual: worst,
        max_hermitian_residual: herm,
        worst_pair,
    })
}
