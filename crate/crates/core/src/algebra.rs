//! Operator-algebra engine: spans, generated algebras, commutants and
//! intersections of finite sets of q-numbers.
//!
//! Matrices are flattened to vectors in `C^{N²}`, where the trace inner product
//! `Tr(A†B)` is the Euclidean one. Rank decisions use singular values against
//! a threshold relative to the largest singular value.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::qnum::{DescriptorTriple, QNumber, QnumError};

/// Default relative singular-value threshold for exactly constructed inputs.
pub const RANK_TOL: f64 = 1e-8;
/// Threshold for inputs that went through the integrator.
pub const EVOLVED_RANK_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("no elements given")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("span is a plain linear span, not a generated algebra")]
    NotAnAlgebra,
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("parameter count overflows for {0} qubits")]
    Overflow(u32),
    #[error("the anticommutator identity is stated for a two-dimensional carrier, got {0}")]
    NotTwoDimensional(usize),
    #[error(transparent)]
    Qnum(#[from] QnumError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanKind {
    LinearSpan,
    GeneratedAlgebra,
}

/// Orthonormal basis (trace inner product) of a subspace of `M_N`.
#[derive(Clone, Debug)]
pub struct AlgebraSpan {
    dim_hilbert: usize,
    /// `N² × k`, orthonormal columns.
    coords: DMatrix<C64>,
    kind: SpanKind,
}

impl AlgebraSpan {
    fn from_coords(dim_hilbert: usize, coords: DMatrix<C64>, kind: SpanKind) -> Self {
        AlgebraSpan { dim_hilbert, coords, kind }
    }

    /// All of `M_N`.
    pub fn full(n: usize) -> Self {
        Self::from_coords(n, DMatrix::identity(n * n, n * n), SpanKind::GeneratedAlgebra)
    }

    pub fn dim_hilbert(&self) -> usize {
        self.dim_hilbert
    }

    pub fn dimension(&self) -> usize {
        self.coords.ncols()
    }

    pub fn kind(&self) -> SpanKind {
        self.kind
    }

    pub fn basis(&self) -> Vec<QNumber> {
        (0..self.dimension()).map(|k| self.element(k)).collect()
    }

    fn element(&self, k: usize) -> QNumber {
        QNumber::from_square(linalg::unflatten(self.coords.column(k).as_slice(), self.dim_hilbert))
    }

    /// Distance of `q` from the span relative to `max(‖q‖, 1)`.
    pub fn membership_residual(&self, q: &QNumber) -> f64 {
        let v = linalg::flatten(q.matrix());
        let proj = &self.coords * (self.coords.adjoint() * &v);
        (v - proj).norm() / q.frobenius_norm().max(1.0)
    }

    pub fn contains(&self, q: &QNumber, tol: f64) -> bool {
        q.dim() == self.dim_hilbert && self.membership_residual(q) <= tol
    }

    /// Every basis element of `self` lies in `other`.
    pub fn is_subspace_of(&self, other: &AlgebraSpan, tol: f64) -> bool {
        self.dim_hilbert == other.dim_hilbert && self.basis().iter().all(|b| other.contains(b, tol))
    }

    pub fn same_span(&self, other: &AlgebraSpan, tol: f64) -> bool {
        self.dimension() == other.dimension() && self.is_subspace_of(other, tol) && other.is_subspace_of(self, tol)
    }

    /// Largest residual of `b_i b_j` against the span.
    pub fn closure_residual(&self) -> f64 {
        let basis = self.basis();
        let mut worst: f64 = 0.0;
        for a in &basis {
            for b in &basis {
                worst = worst.max(self.membership_residual(&(a * b)));
            }
        }
        worst
    }

    /// Real dimension of the Hermitian elements of the span.
    pub fn hermitian_real_dimension(&self, rank_tol: f64) -> usize {
        let n2 = self.dim_hilbert * self.dim_hilbert;
        let k = self.dimension();
        if k == 0 {
            return 0;
        }
        // Hermitian parts (B + B†)/2 and (B − B†)/2i, as real vectors of length 2N².
        let mut real = DMatrix::<C64>::zeros(2 * n2, 2 * k);
        let half = C64::new(0.5, 0.0);
        let half_i = C64::new(0.0, -0.5);
        for (col, b) in self.basis().iter().enumerate() {
            let h1 = (b.matrix() + b.matrix().adjoint()) * half;
            let h2 = (b.matrix() - b.matrix().adjoint()) * half_i;
            for (slot, h) in [h1, h2].iter().enumerate() {
                for (r, z) in h.as_slice().iter().enumerate() {
                    real[(r, 2 * col + slot)] = C64::new(z.re, 0.0);
                    real[(n2 + r, 2 * col + slot)] = C64::new(z.im, 0.0);
                }
            }
        }
        linalg::orthonormal_columns(&real, rank_tol).ncols()
    }
}

fn common_dim(elements: &[QNumber]) -> Result<usize, AlgebraError> {
    let dim = elements.first().ok_or(AlgebraError::Empty)?.dim();
    for e in elements {
        if e.dim() != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: e.dim() });
        }
    }
    Ok(dim)
}

/// Flattened, normalised columns; near-zero elements are dropped.
fn column_matrix(elements: &[QNumber], dim: usize) -> DMatrix<C64> {
    let cols: Vec<_> = elements
        .iter()
        .filter_map(|e| {
            let v = linalg::flatten(e.matrix());
            let n = v.norm();
            (n > 1e-14).then(|| v / C64::new(n, 0.0))
        })
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(dim * dim, 0);
    }
    DMatrix::from_columns(&cols)
}

pub fn linear_span(elements: &[QNumber]) -> Result<AlgebraSpan, AlgebraError> {
    linear_span_with_tol(elements, RANK_TOL)
}

pub fn linear_span_with_tol(elements: &[QNumber], rank_tol: f64) -> Result<AlgebraSpan, AlgebraError> {
    let dim = common_dim(elements)?;
    let m = column_matrix(elements, dim);
    Ok(AlgebraSpan::from_coords(dim, linalg::orthonormal_columns(&m, rank_tol), SpanKind::LinearSpan))
}

pub fn generated_algebra(generators: &[QNumber]) -> Result<AlgebraSpan, AlgebraError> {
    generated_algebra_with_tol(generators, RANK_TOL)
}

/// Smallest algebra containing the identity and the generators: the span is
/// extended by all pairwise products until its dimension stops growing.
pub fn generated_algebra_with_tol(generators: &[QNumber], rank_tol: f64) -> Result<AlgebraSpan, AlgebraError> {
    let dim = common_dim(generators)?;
    let mut seed = vec![QNumber::identity(dim)];
    seed.extend_from_slice(generators);
    let mut coords = linalg::orthonormal_columns(&column_matrix(&seed, dim), rank_tol);
    loop {
        let span = AlgebraSpan::from_coords(dim, coords.clone(), SpanKind::GeneratedAlgebra);
        let basis = span.basis();
        let mut elements = basis.clone();
        for a in &basis {
            for b in &basis {
                elements.push(a * b);
            }
        }
        let next = linalg::orthonormal_columns(&column_matrix(&elements, dim), rank_tol);
        if next.ncols() == coords.ncols() {
            return Ok(span);
        }
        coords = next;
    }
}

/// Algebra generated by every component of the given triples.
pub fn descriptor_algebra<'a>(
    triples: impl IntoIterator<Item = &'a DescriptorTriple>,
    rank_tol: f64,
) -> Result<AlgebraSpan, AlgebraError> {
    let gens: Vec<QNumber> = triples.into_iter().flat_map(|t| t.components().iter().cloned()).collect();
    generated_algebra_with_tol(&gens, rank_tol)
}

pub fn commutant(sub: &AlgebraSpan, within: &AlgebraSpan) -> Result<AlgebraSpan, AlgebraError> {
    commutant_with_tol(sub, within, RANK_TOL)
}

/// `{X ∈ within : [X, B] = 0 for all B in sub}`.
pub fn commutant_with_tol(sub: &AlgebraSpan, within: &AlgebraSpan, tol: f64) -> Result<AlgebraSpan, AlgebraError> {
    let n = within.dim_hilbert;
    if sub.dim_hilbert != n {
        return Err(AlgebraError::DimensionMismatch { expected: n, found: sub.dim_hilbert });
    }
    let kw = within.dimension();
    let n2 = n * n;
    let ws = within.basis();
    let ss = sub.basis();
    let mut map = DMatrix::<C64>::zeros(n2 * ss.len().max(1), kw);
    for (l, s) in ss.iter().enumerate() {
        for (k, w) in ws.iter().enumerate() {
            let c = linalg::flatten(QNumber::commutator(w, s).matrix());
            map.view_mut((l * n2, k), (n2, 1)).copy_from(&c);
        }
    }
    let null = linalg::null_space(&map, tol);
    let coords = if kw == 0 { DMatrix::zeros(n2, 0) } else { &within.coords * null };
    Ok(AlgebraSpan::from_coords(n, coords, within.kind))
}

pub fn span_intersection(a: &AlgebraSpan, b: &AlgebraSpan) -> Result<AlgebraSpan, AlgebraError> {
    span_intersection_with_tol(a, b, RANK_TOL)
}

/// `a ∩ b` from the null space of `[A | −B]`.
pub fn span_intersection_with_tol(a: &AlgebraSpan, b: &AlgebraSpan, tol: f64) -> Result<AlgebraSpan, AlgebraError> {
    let n = a.dim_hilbert;
    if b.dim_hilbert != n {
        return Err(AlgebraError::DimensionMismatch { expected: n, found: b.dim_hilbert });
    }
    let kind = if a.kind == SpanKind::GeneratedAlgebra && b.kind == SpanKind::GeneratedAlgebra {
        SpanKind::GeneratedAlgebra
    } else {
        SpanKind::LinearSpan
    };
    let (ka, kb) = (a.dimension(), b.dimension());
    if ka == 0 || kb == 0 {
        return Ok(AlgebraSpan::from_coords(n, DMatrix::zeros(n * n, 0), kind));
    }
    let mut stacked = DMatrix::<C64>::zeros(n * n, ka + kb);
    stacked.view_mut((0, 0), (n * n, ka)).copy_from(&a.coords);
    stacked.view_mut((0, ka), (n * n, kb)).copy_from(&(-&b.coords));
    // Singular values of [A | −B] lie in [0, √2]; zero ones are common directions.
    let null = linalg::null_space_abs(&stacked, tol);
    let coords = if null.ncols() == 0 {
        DMatrix::zeros(n * n, 0)
    } else {
        linalg::orthonormal_columns(&(&a.coords * null.rows(0, ka)), RANK_TOL)
    };
    Ok(AlgebraSpan::from_coords(n, coords, kind))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClassification {
    Commuting,
    MaximallyNoncommuting,
    General,
}

/// Commuting if all nine cross-commutators vanish; maximally non-commuting if
/// both triples span the same subspace; general otherwise.
pub fn classify_pair(a: &DescriptorTriple, b: &DescriptorTriple, tol: f64) -> PairClassification {
    if a.dim() != b.dim() {
        return PairClassification::General;
    }
    let commuting =
        a.components().iter().all(|p| b.components().iter().all(|q| QNumber::commutator(p, q).max_abs() <= tol));
    if commuting {
        return PairClassification::Commuting;
    }
    let sa = linear_span(a.components());
    let sb = linear_span(b.components());
    match (sa, sb) {
        (Ok(sa), Ok(sb)) if sa.same_span(&sb, tol) => PairClassification::MaximallyNoncommuting,
        _ => PairClassification::General,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HilbertDimension {
    /// The algebra is a full matrix algebra `M_n` (possibly repeated on a larger carrier).
    Full { n: usize },
    /// A proper subalgebra with a non-trivial centre or non-square dimension.
    NotFull { dimension: usize, centre_dimension: usize },
}

/// Infers the Hilbert-space dimension an algebra acts on.
///
/// An algebra with trivial centre is a factor `M_k` and reports `k`; anything
/// else is flagged with its dimension.
pub fn hilbert_dimension(alg: &AlgebraSpan) -> Result<HilbertDimension, AlgebraError> {
    if alg.kind != SpanKind::GeneratedAlgebra {
        return Err(AlgebraError::NotAnAlgebra);
    }
    let centre = commutant(alg, alg)?;
    let d = alg.dimension();
    let k = (d as f64).sqrt().round() as usize;
    if centre.dimension() == 1 && k * k == d {
        Ok(HilbertDimension::Full { n: k })
    } else {
        Ok(HilbertDimension::NotFull { dimension: d, centre_dimension: centre.dimension() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnticommutatorCheck {
    pub holds: bool,
    pub residual: f64,
    /// `Tr(a b)`.
    pub scalar: f64,
}

/// `{a, b} = Tr(a b)·1` on a two-dimensional carrier.
pub fn anticommutator_trace_check(a: &QNumber, b: &QNumber, tol: f64) -> Result<AnticommutatorCheck, AlgebraError> {
    if a.dim() != 2 {
        return Err(AlgebraError::NotTwoDimensional(a.dim()));
    }
    if b.dim() != 2 {
        return Err(AlgebraError::NotTwoDimensional(b.dim()));
    }
    let scalar = (a * b).trace().re;
    let residual = (&QNumber::anticommutator(a, b) - &QNumber::identity(2).scale(scalar)).max_abs();
    Ok(AnticommutatorCheck { holds: residual <= tol, residual, scalar })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    MaximallyNoncommuting,
    Orthodox,
}

/// Real parameters needed to fix the descriptors of `n` qubits.
pub fn parameter_count(n_qubits: u32, regime: Regime) -> Result<u128, AlgebraError> {
    if n_qubits == 0 {
        return Err(AlgebraError::NoQubits);
    }
    match regime {
        Regime::MaximallyNoncommuting => Ok(3 * n_qubits as u128),
        Regime::Orthodox => 2u128.checked_pow(2 * n_qubits).map(|p| p - 1).ok_or(AlgebraError::Overflow(n_qubits)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::Axis;

    fn s(a: Axis) -> QNumber {
        QNumber::pauli(a)
    }

    #[test]
    fn two_paulis_generate_m2() {
        let alg = generated_algebra(&[s(Axis::X), s(Axis::Y)]).unwrap();
        assert_eq!(alg.dimension(), 4);
        assert!(alg.contains(&s(Axis::Z), 1e-12));
        assert_eq!(hilbert_dimension(&alg).unwrap(), HilbertDimension::Full { n: 2 });
    }

    #[test]
    fn identity_generates_scalars() {
        let alg = generated_algebra(&[QNumber::identity(3)]).unwrap();
        assert_eq!(alg.dimension(), 1);
    }

    #[test]
    fn linear_spans() {
        assert_eq!(linear_span(&[s(Axis::X), s(Axis::Y), s(Axis::Z)]).unwrap().dimension(), 3);
        assert_eq!(linear_span(&[s(Axis::X), s(Axis::X).scale(2.0)]).unwrap().dimension(), 1);
        assert!(linear_span(&[]).is_err());
        assert!(linear_span(&[s(Axis::X), QNumber::identity(4)]).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        let alg = generated_algebra(&[s(Axis::X).kron(&s(Axis::Z)), s(Axis::Y).kron(&QNumber::identity(2))]).unwrap();
        let b = alg.basis();
        for (i, p) in b.iter().enumerate() {
            for (j, q) in b.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((p.inner(q) - C64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
        assert!(alg.closure_residual() < 1e-10);
    }

    #[test]
    fn commutant_examples() {
        let m2 = AlgebraSpan::full(2);
        let paulis = linear_span(&[s(Axis::X), s(Axis::Y), s(Axis::Z)]).unwrap();
        assert_eq!(commutant(&paulis, &m2).unwrap().dimension(), 1);
        let one = linear_span(&[QNumber::identity(2)]).unwrap();
        assert_eq!(commutant(&one, &m2).unwrap().dimension(), 4);

        let left = DescriptorTriple::tensor_slot("a", 0, 2);
        let sub = linear_span(left.components()).unwrap();
        let c = commutant(&sub, &AlgebraSpan::full(4)).unwrap();
        assert_eq!(c.dimension(), 4);
        for a in [QNumber::identity(2), s(Axis::X), s(Axis::Y), s(Axis::Z)] {
            assert!(c.contains(&QNumber::identity(2).kron(&a), 1e-10));
        }
    }

    #[test]
    fn intersections() {
        let p = linear_span(&[s(Axis::X), s(Axis::Y), s(Axis::Z)]).unwrap();
        assert_eq!(span_intersection(&p, &p).unwrap().dimension(), 3);
        let a = linear_span(DescriptorTriple::tensor_slot("a", 0, 2).components()).unwrap();
        let b = linear_span(DescriptorTriple::tensor_slot("b", 1, 2).components()).unwrap();
        assert_eq!(span_intersection(&a, &b).unwrap().dimension(), 0);
        let xy = linear_span(&[s(Axis::X), s(Axis::Y)]).unwrap();
        let yz = linear_span(&[s(Axis::Y), s(Axis::Z)]).unwrap();
        let i = span_intersection(&xy, &yz).unwrap();
        assert_eq!(i.dimension(), 1);
        assert!(i.contains(&s(Axis::Y), 1e-12));
    }

    #[test]
    fn pair_classes() {
        let a = DescriptorTriple::pauli("a");
        assert_eq!(classify_pair(&a, &a.clone().with_label("b"), 1e-9), PairClassification::MaximallyNoncommuting);
        let l = DescriptorTriple::tensor_slot("l", 0, 2);
        let r = DescriptorTriple::tensor_slot("r", 1, 2);
        assert_eq!(classify_pair(&l, &r, 1e-9), PairClassification::Commuting);
    }

    #[test]
    fn diagonal_algebra_is_not_full() {
        let z0 = QNumber::embed(&s(Axis::Z), 0, 2);
        let z1 = QNumber::embed(&s(Axis::Z), 1, 2);
        let alg = generated_algebra(&[z0, z1]).unwrap();
        assert_eq!(hilbert_dimension(&alg).unwrap(), HilbertDimension::NotFull { dimension: 4, centre_dimension: 4 });
    }

    #[test]
    fn factor_on_larger_carrier() {
        let t = DescriptorTriple::tensor_slot("a", 0, 2);
        let alg = generated_algebra(t.components()).unwrap();
        assert_eq!(hilbert_dimension(&alg).unwrap(), HilbertDimension::Full { n: 2 });
        assert!(matches!(hilbert_dimension(&linear_span(t.components()).unwrap()), Err(AlgebraError::NotAnAlgebra)));
    }

    #[test]
    fn anticommutator_examples() {
        let r = anticommutator_trace_check(&s(Axis::Y), &s(Axis::Z), 1e-12).unwrap();
        assert!(r.holds && r.scalar.abs() < 1e-15);
        let r = anticommutator_trace_check(&s(Axis::Z), &s(Axis::Z), 1e-12).unwrap();
        assert!(r.holds && (r.scalar - 2.0).abs() < 1e-15);
        assert!(anticommutator_trace_check(&QNumber::identity(4), &QNumber::identity(4), 1e-9).is_err());
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(parameter_count(1, Regime::MaximallyNoncommuting).unwrap(), 3);
        assert_eq!(parameter_count(1, Regime::Orthodox).unwrap(), 3);
        assert_eq!(parameter_count(3, Regime::MaximallyNoncommuting).unwrap(), 9);
        assert_eq!(parameter_count(3, Regime::Orthodox).unwrap(), 63);
        assert!(parameter_count(0, Regime::Orthodox).is_err());
        assert!(parameter_count(64, Regime::Orthodox).is_err());
    }

    #[test]
    fn hermitian_dimension_matches_complex_one() {
        let alg = generated_algebra(&[s(Axis::X), s(Axis::Z)]).unwrap();
        assert_eq!(alg.hermitian_real_dimension(RANK_TOL), 4);
    }
}
