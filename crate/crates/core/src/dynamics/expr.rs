use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::qnum::{Axis, DescriptorSet, QNumber};

/// A Hamiltonian written in terms of the current descriptors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum HamiltonianExpr {
    Descriptor {
        qubit: String,
        axis: Axis,
    },
    Identity,
    Scale {
        factor: f64,
        expr: Box<HamiltonianExpr>,
    },
    Sum {
        terms: Vec<HamiltonianExpr>,
    },
    Product {
        left: Box<HamiltonianExpr>,
        right: Box<HamiltonianExpr>,
    },
    Anticommutator {
        left: Box<HamiltonianExpr>,
        right: Box<HamiltonianExpr>,
    },
    /// `i[left, right]`.
    CommutatorTimesI {
        left: Box<HamiltonianExpr>,
        right: Box<HamiltonianExpr>,
    },
}

impl HamiltonianExpr {
    pub fn q(qubit: impl Into<String>, axis: Axis) -> Self {
        HamiltonianExpr::Descriptor { qubit: qubit.into(), axis }
    }

    pub fn zero() -> Self {
        HamiltonianExpr::Sum { terms: Vec::new() }
    }

    pub fn scaled(self, factor: f64) -> Self {
        HamiltonianExpr::Scale { factor, expr: Box::new(self) }
    }

    pub fn sum(terms: Vec<HamiltonianExpr>) -> Self {
        HamiltonianExpr::Sum { terms }
    }

    pub fn product(left: HamiltonianExpr, right: HamiltonianExpr) -> Self {
        HamiltonianExpr::Product { left: Box::new(left), right: Box::new(right) }
    }

    pub fn anticommutator(left: HamiltonianExpr, right: HamiltonianExpr) -> Self {
        HamiltonianExpr::Anticommutator { left: Box::new(left), right: Box::new(right) }
    }

    pub fn i_commutator(left: HamiltonianExpr, right: HamiltonianExpr) -> Self {
        HamiltonianExpr::CommutatorTimesI { left: Box::new(left), right: Box::new(right) }
    }

    /// `¼(2·1 − {q_az, q_cz})`.
    pub fn p_bar(control: &str, reference: &str) -> Self {
        HamiltonianExpr::sum(vec![
            HamiltonianExpr::Identity.scaled(0.5),
            HamiltonianExpr::anticommutator(
                HamiltonianExpr::q(control, Axis::Z),
                HamiltonianExpr::q(reference, Axis::Z),
            )
            .scaled(-0.25),
        ])
    }

    /// True when the expression is zero regardless of the descriptors.
    pub fn is_structurally_zero(&self) -> bool {
        match self {
            HamiltonianExpr::Descriptor { .. } | HamiltonianExpr::Identity => false,
            HamiltonianExpr::Scale { factor, expr } => *factor == 0.0 || expr.is_structurally_zero(),
            HamiltonianExpr::Sum { terms } => terms.iter().all(HamiltonianExpr::is_structurally_zero),
            HamiltonianExpr::Product { left, right }
            | HamiltonianExpr::Anticommutator { left, right }
            | HamiltonianExpr::CommutatorTimesI { left, right } => {
                left.is_structurally_zero() || right.is_structurally_zero()
            }
        }
    }

    /// Every `(qubit, axis)` the expression reads.
    pub fn referenced_descriptors(&self) -> BTreeSet<(String, Axis)> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    pub fn referenced_qubits(&self) -> BTreeSet<String> {
        self.referenced_descriptors().into_iter().map(|(q, _)| q).collect()
    }

    fn collect(&self, out: &mut BTreeSet<(String, Axis)>) {
        match self {
            HamiltonianExpr::Descriptor { qubit, axis } => {
                out.insert((qubit.clone(), *axis));
            }
            HamiltonianExpr::Identity => {}
            HamiltonianExpr::Scale { expr, .. } => expr.collect(out),
            HamiltonianExpr::Sum { terms } => terms.iter().for_each(|t| t.collect(out)),
            HamiltonianExpr::Product { left, right }
            | HamiltonianExpr::Anticommutator { left, right }
            | HamiltonianExpr::CommutatorTimesI { left, right } => {
                left.collect(out);
                right.collect(out);
            }
        }
    }

    /// Matrix value without the Hermiticity check.
    pub fn eval_raw(&self, set: &DescriptorSet) -> Result<QNumber, DynamicsError> {
        let dim = set.dim();
        Ok(match self {
            HamiltonianExpr::Descriptor { qubit, axis } => {
                set.get(qubit).ok_or_else(|| DynamicsError::UnknownQubit(qubit.clone()))?.get(*axis).clone()
            }
            HamiltonianExpr::Identity => QNumber::identity(dim),
            HamiltonianExpr::Scale { factor, expr } => expr.eval_raw(set)?.scale(*factor),
            HamiltonianExpr::Sum { terms } => {
                let mut acc = QNumber::zeros(dim);
                for t in terms {
                    acc = &acc + &t.eval_raw(set)?;
                }
                acc
            }
            HamiltonianExpr::Product { left, right } => &left.eval_raw(set)? * &right.eval_raw(set)?,
            HamiltonianExpr::Anticommutator { left, right } => {
                QNumber::anticommutator(&left.eval_raw(set)?, &right.eval_raw(set)?)
            }
            HamiltonianExpr::CommutatorTimesI { left, right } => {
                QNumber::commutator(&left.eval_raw(set)?, &right.eval_raw(set)?).scale_c(C64::new(0.0, 1.0))
            }
        })
    }
}

impl fmt::Display for HamiltonianExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HamiltonianExpr::Descriptor { qubit, axis } => write!(f, "{qubit}.{axis}"),
            HamiltonianExpr::Identity => write!(f, "1"),
            HamiltonianExpr::Scale { factor, expr } => write!(f, "{factor}*({expr})"),
            HamiltonianExpr::Sum { terms } if terms.is_empty() => write!(f, "0"),
            HamiltonianExpr::Sum { terms } => {
                let parts: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
            HamiltonianExpr::Product { left, right } => write!(f, "({left})({right})"),
            HamiltonianExpr::Anticommutator { left, right } => write!(f, "{{{left}, {right}}}"),
            HamiltonianExpr::CommutatorTimesI { left, right } => write!(f, "i[{left}, {right}]"),
        }
    }
}

/// Evaluates `expr` and checks the result is Hermitian within
/// `tol·max(1, ‖H‖_max)`; the Hermitian part is returned.
pub fn eval_hamiltonian_with_tol(
    expr: &HamiltonianExpr,
    set: &DescriptorSet,
    tol: f64,
) -> Result<QNumber, DynamicsError> {
    let h = expr.eval_raw(set)?;
    let residual = h.hermitian_residual();
    if residual > tol * h.max_abs().max(1.0) {
        return Err(DynamicsError::NonHermitian { residual, expr: expr.to_string() });
    }
    Ok(h.hermitian_part())
}

pub fn eval_hamiltonian(expr: &HamiltonianExpr, set: &DescriptorSet) -> Result<QNumber, DynamicsError> {
    eval_hamiltonian_with_tol(expr, set, crate::qnum::EXACT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::DescriptorTriple;
    use std::f64::consts::FRAC_PI_2;

    fn two_copies() -> DescriptorSet {
        DescriptorSet::from_triples(2, [DescriptorTriple::pauli("Q1"), DescriptorTriple::pauli("Q2")]).unwrap()
    }

    #[test]
    fn not_expression() {
        let h = eval_hamiltonian(&HamiltonianExpr::q("Q1", Axis::X).scaled(FRAC_PI_2), &two_copies()).unwrap();
        assert!(h.distance(&QNumber::sigma_x().scale(FRAC_PI_2)) < 1e-15);
    }

    #[test]
    fn model_hamiltonian_at_zero() {
        let inner =
            HamiltonianExpr::anticommutator(HamiltonianExpr::q("Q1", Axis::Z), HamiltonianExpr::q("Q2", Axis::Z));
        let e = HamiltonianExpr::anticommutator(inner, HamiltonianExpr::q("Q1", Axis::X)).scaled(0.25);
        let h = eval_hamiltonian(&e, &two_copies()).unwrap();
        // ¼{{σz,σz},σx} = ¼{2, σx} = σx
        assert!(h.distance(&QNumber::sigma_x()) < 1e-15);
    }

    #[test]
    fn zero_and_unknown() {
        let set = two_copies();
        assert_eq!(eval_hamiltonian(&HamiltonianExpr::zero(), &set).unwrap(), QNumber::zeros(2));
        assert!(HamiltonianExpr::zero().is_structurally_zero());
        assert!(matches!(
            eval_hamiltonian(&HamiltonianExpr::q("Q9", Axis::X), &set),
            Err(DynamicsError::UnknownQubit(_))
        ));
    }

    #[test]
    fn non_hermitian_product_rejected() {
        let e = HamiltonianExpr::product(HamiltonianExpr::q("Q1", Axis::X), HamiltonianExpr::q("Q2", Axis::Y));
        assert!(matches!(eval_hamiltonian(&e, &two_copies()), Err(DynamicsError::NonHermitian { .. })));
        let c = HamiltonianExpr::i_commutator(HamiltonianExpr::q("Q1", Axis::X), HamiltonianExpr::q("Q2", Axis::Y));
        // i[σx, σy] = −2σz
        let h = eval_hamiltonian(&c, &two_copies()).unwrap();
        assert!(h.distance(&QNumber::sigma_z().scale(-2.0)) < 1e-15);
    }

    #[test]
    fn p_bar_builder_reads_z_only() {
        let refs = HamiltonianExpr::p_bar("A", "C").referenced_descriptors();
        assert_eq!(refs.len(), 2);
        assert!(refs.iter().all(|(_, a)| *a == Axis::Z));
    }

    #[test]
    fn json_round_trip() {
        let e = HamiltonianExpr::product(HamiltonianExpr::q("B", Axis::X), HamiltonianExpr::p_bar("A", "C"))
            .scaled(FRAC_PI_2);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<HamiltonianExpr>(&s).unwrap(), e);
    }
}
