use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{QNumber, QnumError, EXACT_TOL};
use crate::linalg;

const NORM_TOL: f64 = 1e-9;

/// The constant state vector that expectation values are taken in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct HeisenbergState {
    amplitudes: DVector<C64>,
}

impl HeisenbergState {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self, QnumError> {
        if amplitudes.is_empty() {
            return Err(QnumError::Empty);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QnumError::NotUnitNorm { norm });
        }
        Ok(HeisenbergState { amplitudes })
    }

    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self, QnumError> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QnumError::NotUnitNorm { norm });
        }
        Self::new(amplitudes / C64::new(norm, 0.0))
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        HeisenbergState { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `⟨Ψ|A|Ψ⟩` without Hermiticity checks.
    pub fn raw_expectation(&self, a: &QNumber) -> C64 {
        self.amplitudes.dotc(&(a.matrix() * &self.amplitudes))
    }
}

impl From<HeisenbergState> for Vec<[f64; 2]> {
    fn from(s: HeisenbergState) -> Self {
        s.amplitudes.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl TryFrom<Vec<[f64; 2]>> for HeisenbergState {
    type Error = QnumError;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self, QnumError> {
        HeisenbergState::new(DVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1]))))
    }
}

pub fn common_plus_one_state(z_observables: &[QNumber]) -> Result<HeisenbergState, QnumError> {
    common_plus_one_state_with_tol(z_observables, EXACT_TOL)
}

/// The unique joint +1 eigenvector of mutually commuting Hermitian observables.
pub fn common_plus_one_state_with_tol(z_observables: &[QNumber], tol: f64) -> Result<HeisenbergState, QnumError> {
    let first = z_observables.first().ok_or(QnumError::Empty)?;
    let dim = first.dim();
    for q in z_observables {
        q.check_dim(dim)?;
        let r = q.hermitian_residual();
        if r > tol {
            return Err(QnumError::NotHermitian { residual: r });
        }
    }
    for (i, a) in z_observables.iter().enumerate() {
        for (j, b) in z_observables.iter().enumerate().skip(i + 1) {
            let residual = QNumber::commutator(a, b).max_abs();
            if residual > tol {
                return Err(QnumError::NonCommuting { i, j, residual });
            }
        }
    }

    // Σ (q − 1)² is positive semidefinite and vanishes exactly on the joint +1 eigenspace.
    let one = QNumber::identity(dim);
    let mut m = QNumber::zeros(dim);
    for q in z_observables {
        let d = q - &one;
        m = &m + &(&d * &d);
    }
    let (vals, vecs) = linalg::hermitian_eigen(m.matrix());
    let null: Vec<usize> = (0..dim).filter(|&k| vals[k].abs() <= tol.max(1e-12) * 10.0).collect();
    match null.len() {
        0 => return Err(QnumError::NoCommonEigenvector),
        1 => {}
        d => return Err(QnumError::DegenerateEigenspace { dimension: d }),
    }
    let mut v: DVector<C64> = vecs.column(null[0]).into_owned();

    // Fix the global phase: largest component real and positive.
    let (kmax, _) = v.iter().enumerate().fold(
        (0, 0.0),
        |best, (k, z)| {
            if z.norm() > best.1 + 1e-12 {
                (k, z.norm())
            } else {
                best
            }
        },
    );
    let phase = v[kmax] / C64::new(v[kmax].norm(), 0.0);
    v /= phase;
    v /= C64::new(v.norm(), 0.0);

    for q in z_observables {
        let r = (q.matrix() * &v - &v).norm();
        if r > tol.max(1e-12) * 10.0 {
            return Err(QnumError::NoCommonEigenvector);
        }
    }
    HeisenbergState::new(v)
}

/// `⟨Ψ|A|Ψ⟩` for Hermitian `A`.
pub fn expectation(a: &QNumber, state: &HeisenbergState) -> Result<f64, QnumError> {
    a.check_dim(state.dim())?;
    let scale = a.max_abs().max(1.0);
    let h = a.hermitian_residual();
    if h > EXACT_TOL * scale {
        return Err(QnumError::NotHermitian { residual: h });
    }
    let z = state.raw_expectation(a);
    if z.im.abs() > EXACT_TOL * scale {
        return Err(QnumError::ComplexExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// `|⟨A⟩² − ⟨A²⟩| ≤ tol`.
pub fn is_sharp(a: &QNumber, state: &HeisenbergState, tol: f64) -> Result<bool, QnumError> {
    let m = expectation(a, state)?;
    let m2 = expectation(&(a * a).hermitian_part(), state)?;
    Ok((m * m - m2).abs() <= tol)
}
