//! Rigid rotations of a descriptor triple.
//!
//! Elementary rotations act on the component column `(q_x, q_y, q_z)`:
//! `rot_x(θ)` sends it to `(q_x, cos θ q_y + sin θ q_z, cos θ q_z − sin θ q_y)`,
//! and `rot_y`, `rot_z` follow by cyclic relabelling. A full rotation is
//! composed x first, then y, then z: `R = rot_z(ψ)·rot_y(φ)·rot_x(θ)`.

use std::f64::consts::TAU;

use nalgebra::Matrix3;
use serde::Serialize;

use super::{DescriptorTriple, QNumber, QnumError};

pub fn rot_x(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c)
}

pub fn rot_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c)
}

pub fn rot_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0)
}

fn wrap(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU - 1e-15 {
        0.0
    } else {
        w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationParameters {
    pub matrix: Matrix3<f64>,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl RotationParameters {
    pub fn from_angles(theta: f64, phi: f64, psi: f64) -> Self {
        RotationParameters {
            matrix: rot_z(psi) * rot_y(phi) * rot_x(theta),
            theta: wrap(theta),
            phi: wrap(phi),
            psi: wrap(psi),
        }
    }

    /// Decomposes a proper rotation into x-y-z angles.
    pub fn from_matrix(m: &Matrix3<f64>, tol: f64) -> Result<Self, QnumError> {
        let residual = orthogonality_residual(m);
        if residual > tol {
            return Err(QnumError::NotARotation { residual });
        }
        // m = Rz(−ψ)Ry(−φ)Rx(−θ) in the textbook active convention.
        let s = (-m[(2, 0)]).clamp(-1.0, 1.0);
        let b = s.asin();
        let (a, c) = if s.abs() > 1.0 - 1e-12 {
            ((-m[(0, 1)]).atan2(m[(1, 1)]), 0.0)
        } else {
            (m[(1, 0)].atan2(m[(0, 0)]), m[(2, 1)].atan2(m[(2, 2)]))
        };
        Ok(RotationParameters { matrix: *m, theta: wrap(-c), phi: wrap(-b), psi: wrap(-a) })
    }

    /// `q_i = Σ_j R_ij ref_j`.
    pub fn apply(&self, reference: &DescriptorTriple) -> DescriptorTriple {
        apply_matrix(&self.matrix, reference)
    }
}

pub(crate) fn apply_matrix(r: &Matrix3<f64>, reference: &DescriptorTriple) -> DescriptorTriple {
    let refs = reference.components();
    let comp = |i: usize| {
        let mut q = QNumber::zeros(reference.dim());
        for (j, rj) in refs.iter().enumerate() {
            if r[(i, j)] != 0.0 {
                q = &q + &rj.scale(r[(i, j)]);
            }
        }
        q
    };
    DescriptorTriple::from_array(reference.label(), [comp(0), comp(1), comp(2)]).expect("same dimension")
}

/// `max |RᵀR − 1|` combined with `|det R − 1|`.
fn orthogonality_residual(m: &Matrix3<f64>) -> f64 {
    let g = m.transpose() * m - Matrix3::identity();
    g.amax().max((m.determinant() - 1.0).abs())
}

/// Coefficients `C_ij = Tr(q_i ref_j)/dim` and the worst normalised
/// distance of a component from the span of the reference.
pub fn induced_coefficients(
    triple: &DescriptorTriple,
    reference: &DescriptorTriple,
) -> Result<(Matrix3<f64>, f64), QnumError> {
    let dim = reference.dim();
    triple.x().check_dim(dim)?;
    let n = dim as f64;
    let mut c = Matrix3::zeros();
    for (i, qi) in triple.components().iter().enumerate() {
        for (j, rj) in reference.components().iter().enumerate() {
            c[(i, j)] = rj.inner(qi).re / n;
        }
    }
    let fitted = apply_matrix(&c, reference);
    let residual =
        (0..3).map(|i| triple.components()[i].distance(&fitted.components()[i]) / n.sqrt()).fold(0.0, f64::max);
    Ok((c, residual))
}

pub fn rotation_parameters(
    triple: &DescriptorTriple,
    reference: &DescriptorTriple,
    tol: f64,
) -> Result<RotationParameters, QnumError> {
    let (c, residual) = induced_coefficients(triple, reference)?;
    if residual > tol {
        return Err(QnumError::OutsideSpan { residual });
    }
    RotationParameters::from_matrix(&c, tol)
}

/// Closest proper rotation to `m` in Frobenius norm, with the smallest
/// singular value of `m` (zero means the projection is not unique).
pub fn nearest_rotation(m: &Matrix3<f64>) -> (Matrix3<f64>, f64) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v requested");
    let smin = svd.singular_values.min();
    let d = (u * v_t).determinant().signum();
    let mut fix = Matrix3::identity();
    // Flip the direction belonging to the smallest singular value.
    let kmin = svd.singular_values.imin();
    fix[(kmin, kmin)] = d;
    (u * fix * v_t, smin)
}
