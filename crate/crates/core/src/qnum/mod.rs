//! q-numbers: complex matrices standing for a single descriptor component.
//!
//! Every q-number lives on the network's Hilbert space of dimension `N`. The
//! Pauli structure constants are kept here as fixed tables so that validation
//! and the equations of motion read from one place.

mod rotation;
mod set;
mod state;
mod triple;

pub(crate) use rotation::apply_matrix;
pub use rotation::{
    induced_coefficients, nearest_rotation, rot_x, rot_y, rot_z, rotation_parameters, RotationParameters,
};
pub use set::DescriptorSet;
pub use state::{common_plus_one_state, common_plus_one_state_with_tol, expectation, is_sharp, HeisenbergState};
pub use triple::{validate_pauli_components, validate_pauli_triple, DescriptorTriple, PauliReport};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;

/// Tolerance for exactly constructed matrices.
pub const EXACT_TOL: f64 = 1e-9;
/// Tolerance for quantities that went through the integrator.
pub const EVOLVED_TOL: f64 = 1e-6;

/// Kronecker delta δ_ij.
pub const KRONECKER: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Levi-Civita symbol ε_ijk.
pub const LEVI_CIVITA: [[[f64; 3]; 3]; 3] = [
    [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
    [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
    [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QnumError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("empty matrix")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("state is not normalised (norm {norm})")]
    NotUnitNorm { norm: f64 },
    #[error("observables {i} and {j} do not commute (residual {residual:.3e})")]
    NonCommuting { i: usize, j: usize, residual: f64 },
    #[error("no common +1 eigenvector")]
    NoCommonEigenvector,
    #[error("joint +1 eigenspace has dimension {dimension}; supply the state explicitly")]
    DegenerateEigenspace { dimension: usize },
    #[error("expectation has imaginary part {imag:.3e}")]
    ComplexExpectation { imag: f64 },
    #[error("triple lies outside the span of the reference (residual {residual:.3e})")]
    OutsideSpan { residual: f64 },
    #[error("coefficient matrix is not a proper rotation (residual {residual:.3e})")]
    NotARotation { residual: f64 },
    #[error("invalid axis '{0}'")]
    InvalidAxis(String),
}

/// One component of a descriptor triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i % 3]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Axis {
    type Err = QnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(QnumError::InvalidAxis(other.to_string())),
        }
    }
}

/// Row-major nested `[re, im]` pairs, the on-disk matrix layout.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

/// A square complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct QNumber(DMatrix<C64>);

impl QNumber {
    pub fn new(m: DMatrix<C64>) -> Result<Self, QnumError> {
        if m.nrows() == 0 {
            return Err(QnumError::Empty);
        }
        if m.nrows() != m.ncols() {
            return Err(QnumError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        Ok(QNumber(m))
    }

    /// Wraps a matrix already known to be square.
    pub(crate) fn from_square(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        QNumber(m)
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self, QnumError> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(QnumError::NotSquare { rows: n, cols: r.len() });
            }
        }
        QNumber::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        QNumber(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        QNumber(DMatrix::zeros(dim, dim))
    }

    pub fn pauli(axis: Axis) -> Self {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let m = match axis {
            Axis::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Axis::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Axis::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        };
        QNumber(m)
    }

    pub fn sigma_x() -> Self {
        Self::pauli(Axis::X)
    }

    pub fn sigma_y() -> Self {
        Self::pauli(Axis::Y)
    }

    pub fn sigma_z() -> Self {
        Self::pauli(Axis::Z)
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &QNumber) -> QNumber {
        QNumber(self.0.kronecker(&other.0))
    }

    /// `1 ⊗ … ⊗ m ⊗ … ⊗ 1` with `m` in `slot` of `n` two-level factors.
    pub fn embed(m: &QNumber, slot: usize, n: usize) -> QNumber {
        let mut out = QNumber::identity(1);
        for k in 0..n {
            if k == slot {
                out = out.kron(m);
            } else {
                out = out.kron(&QNumber::identity(m.dim()));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> QNumber {
        QNumber(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> QNumber {
        QNumber((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn scale(&self, c: f64) -> QNumber {
        QNumber(&self.0 * C64::new(c, 0.0))
    }

    pub fn scale_c(&self, c: C64) -> QNumber {
        QNumber(&self.0 * c)
    }

    /// `A B − B A`.
    pub fn commutator(a: &QNumber, b: &QNumber) -> QNumber {
        QNumber(&a.0 * &b.0 - &b.0 * &a.0)
    }

    /// `A B + B A`.
    pub fn anticommutator(a: &QNumber, b: &QNumber) -> QNumber {
        QNumber(&a.0 * &b.0 + &b.0 * &a.0)
    }

    /// `U† A U`.
    pub fn conjugate_by(&self, u: &QNumber) -> QNumber {
        QNumber(u.0.adjoint() * &self.0 * &u.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm(&self.0)
    }

    /// Trace inner product `Tr(A† B)`.
    pub fn inner(&self, other: &QNumber) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn distance(&self, other: &QNumber) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub fn trace_distance(&self, other: &QNumber) -> f64 {
        linalg::trace_norm(&(&self.0 - &other.0))
    }

    pub fn check_dim(&self, dim: usize) -> Result<(), QnumError> {
        if self.dim() != dim {
            return Err(QnumError::DimensionMismatch { expected: dim, found: self.dim() });
        }
        Ok(())
    }
}

impl From<QNumber> for MatrixDoc {
    fn from(q: QNumber) -> MatrixDoc {
        matrix_to_doc(&q.0)
    }
}

impl TryFrom<MatrixDoc> for QNumber {
    type Error = QnumError;

    fn try_from(doc: MatrixDoc) -> Result<Self, Self::Error> {
        QNumber::new(matrix_from_doc(&doc)?)
    }
}

pub fn matrix_to_doc(m: &DMatrix<C64>) -> MatrixDoc {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<DMatrix<C64>, QnumError> {
    let rows = doc.len();
    if rows == 0 {
        return Err(QnumError::Empty);
    }
    let cols = doc[0].len();
    if doc.iter().any(|r| r.len() != cols) || cols != rows {
        let bad = doc.iter().map(|r| r.len()).find(|&c| c != rows).unwrap_or(cols);
        return Err(QnumError::NotSquare { rows, cols: bad });
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| C64::new(doc[i][j][0], doc[i][j][1])))
}

impl<'a> Add<&'a QNumber> for &'a QNumber {
    type Output = QNumber;
    fn add(self, rhs: &QNumber) -> QNumber {
        QNumber(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a QNumber> for &'a QNumber {
    type Output = QNumber;
    fn sub(self, rhs: &QNumber) -> QNumber {
        QNumber(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a QNumber> for &'a QNumber {
    type Output = QNumber;
    fn mul(self, rhs: &QNumber) -> QNumber {
        QNumber(&self.0 * &rhs.0)
    }
}

impl Neg for &QNumber {
    type Output = QNumber;
    fn neg(self) -> QNumber {
        QNumber(-&self.0)
    }
}

impl fmt::Display for QNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
