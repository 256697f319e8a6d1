use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{eval_hamiltonian_with_tol, DynamicsError, HamiltonianExpr};
use crate::linalg;
use crate::qnum::{DescriptorSet, QNumber};

/// Hard bound on `max|U†U − 1|` after a raw step.
pub const DRIFT_BOUND: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Closed form when the Hamiltonians are provably constant, RK4 otherwise.
    Auto,
    Rk4,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Static,
    Rk4,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub step: f64,
    pub integrator: Integrator,
    /// Keep the unitary at every step.
    pub record: bool,
    /// Relative Hermiticity tolerance for Hamiltonian evaluations.
    pub hermitian_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { step: 1e-3, integrator: Integrator::Auto, record: true, hermitian_tol: 1e-6 }
    }
}

impl EvolveOptions {
    pub fn with_step(step: f64) -> Self {
        EvolveOptions { step, ..Default::default() }
    }
}

/// Sampled `U(t)` of one qubit.
#[derive(Clone, Debug)]
pub struct UnitaryTrajectory {
    pub step: f64,
    pub samples: Vec<(f64, QNumber)>,
}

impl UnitaryTrajectory {
    pub fn identity(dim: usize, t0: f64, t1: f64) -> Self {
        UnitaryTrajectory { step: t1 - t0, samples: vec![(t0, QNumber::identity(dim)), (t1, QNumber::identity(dim))] }
    }

    pub fn final_unitary(&self) -> &QNumber {
        &self.samples.last().expect("non-empty trajectory").1
    }

    /// Index of the sample closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let mut best = 0;
        for (k, (tk, _)) in self.samples.iter().enumerate() {
            if (tk - t).abs() < (self.samples[best].0 - t).abs() {
                best = k;
            }
        }
        best
    }
}

/// Outcome of one evolution call.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub initial: DescriptorSet,
    pub descriptors: DescriptorSet,
    pub trajectories: BTreeMap<String, UnitaryTrajectory>,
    pub method: Method,
    pub t0: f64,
    pub t1: f64,
}

impl Evolution {
    /// Sample times shared by all recorded trajectories.
    pub fn sample_times(&self) -> Vec<f64> {
        match self.trajectories.values().next() {
            Some(tr) => tr.samples.iter().map(|(t, _)| *t).collect(),
            None => vec![self.t0, self.t1],
        }
    }

    /// Descriptors at sample `k`.
    pub fn descriptors_at(&self, k: usize) -> DescriptorSet {
        let mut set = self.initial.clone();
        for (id, tr) in &self.trajectories {
            let u = &tr.samples[k.min(tr.samples.len() - 1)].1;
            let t = self.initial.get(id).expect("trajectory of known qubit").conjugate_by(u);
            set.insert(t).expect("same dimension");
        }
        set
    }
}

fn current_set(initial: &DescriptorSet, active: &[String], us: &[DMatrix<C64>]) -> DescriptorSet {
    let mut set = initial.clone();
    for (id, u) in active.iter().zip(us) {
        let u = QNumber::from_square(u.clone());
        let t = initial.get(id).expect("active qubit present").conjugate_by(&u);
        set.insert(t).expect("same dimension");
    }
    set
}

/// Integrates `dU_a/dt = i·U_a·H_a(q(t))` with `q_a(t) = U_a† q_a(t0) U_a`.
///
/// Qubits without a Hamiltonian (or with a structurally zero one) are left
/// untouched, so their descriptors come back bit-identical.
pub fn evolve(
    set: &DescriptorSet,
    hamiltonians: &BTreeMap<String, HamiltonianExpr>,
    t0: f64,
    t1: f64,
    opts: &EvolveOptions,
) -> Result<Evolution, DynamicsError> {
    if opts.step <= 0.0 || !opts.step.is_finite() {
        return Err(DynamicsError::InvalidStep(opts.step));
    }
    if t1.partial_cmp(&t0).is_none_or(|o| o.is_lt()) {
        return Err(DynamicsError::InvalidInterval { t0, t1 });
    }
    for (id, h) in hamiltonians {
        if !set.contains(id) {
            return Err(DynamicsError::UnknownQubit(id.clone()));
        }
        for q in h.referenced_qubits() {
            if !set.contains(&q) {
                return Err(DynamicsError::UnknownQubit(q));
            }
        }
    }
    let active: Vec<String> =
        hamiltonians.iter().filter(|(_, h)| !h.is_structurally_zero()).map(|(id, _)| id.clone()).collect();
    let dim = set.dim();

    if active.is_empty() || t1 == t0 {
        let trajectories = active.iter().map(|id| (id.clone(), UnitaryTrajectory::identity(dim, t0, t1))).collect();
        return Ok(Evolution {
            initial: set.clone(),
            descriptors: set.clone(),
            trajectories,
            method: Method::Static,
            t0,
            t1,
        });
    }

    let n_steps = (((t1 - t0) / opts.step) - 1e-9).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n_steps as f64;

    let want_closed = matches!(opts.integrator, Integrator::Auto | Integrator::ClosedForm);
    if want_closed {
        if let Some(h0) = constant_hamiltonians(set, hamiltonians, &active, opts.hermitian_tol)? {
            return Ok(closed_form(set, &active, &h0, t0, t1, n_steps, h, opts.record));
        }
        if opts.integrator == Integrator::ClosedForm {
            return Err(DynamicsError::NotConstant);
        }
    }

    let exprs: Vec<&HamiltonianExpr> = active.iter().map(|id| &hamiltonians[id]).collect();
    let rhs = |us: &[DMatrix<C64>]| -> Result<Vec<DMatrix<C64>>, DynamicsError> {
        let cur = current_set(set, &active, us);
        let i = C64::new(0.0, 1.0);
        us.iter()
            .zip(&exprs)
            .map(|(u, e)| {
                let hm = eval_hamiltonian_with_tol(e, &cur, opts.hermitian_tol)?;
                Ok(u * hm.matrix() * i)
            })
            .collect()
    };

    let mut us: Vec<DMatrix<C64>> = vec![DMatrix::identity(dim, dim); active.len()];
    let mut samples: Vec<Vec<(f64, QNumber)>> = vec![Vec::new(); active.len()];
    if opts.record {
        for s in samples.iter_mut() {
            s.push((t0, QNumber::identity(dim)));
        }
    }
    let axpy = |base: &[DMatrix<C64>], k: &[DMatrix<C64>], c: f64| -> Vec<DMatrix<C64>> {
        base.iter().zip(k).map(|(u, k)| u + k * C64::new(c, 0.0)).collect()
    };
    for step in 0..n_steps {
        let t = t0 + (step + 1) as f64 * h;
        let k1 = rhs(&us)?;
        let k2 = rhs(&axpy(&us, &k1, h / 2.0))?;
        let k3 = rhs(&axpy(&us, &k2, h / 2.0))?;
        let k4 = rhs(&axpy(&us, &k3, h))?;
        for (a, u) in us.iter_mut().enumerate() {
            let incr =
                (&k1[a] + &k2[a] * C64::new(2.0, 0.0) + &k3[a] * C64::new(2.0, 0.0) + &k4[a]) * C64::new(h / 6.0, 0.0);
            let raw = &*u + incr;
            let defect = linalg::unitarity_defect(&raw);
            if defect > DRIFT_BOUND {
                return Err(DynamicsError::UnitarityDrift { qubit: active[a].clone(), time: t, defect });
            }
            *u = linalg::polar_unitary(&raw);
        }
        if opts.record {
            for (a, u) in us.iter().enumerate() {
                samples[a].push((t, QNumber::from_square(u.clone())));
            }
        }
    }
    if !opts.record {
        for (a, u) in us.iter().enumerate() {
            samples[a] = vec![(t0, QNumber::identity(dim)), (t1, QNumber::from_square(u.clone()))];
        }
    }

    let descriptors = current_set(set, &active, &us);
    let step = if opts.record { h } else { t1 - t0 };
    let trajectories =
        active.iter().cloned().zip(samples).map(|(id, s)| (id, UnitaryTrajectory { step, samples: s })).collect();
    Ok(Evolution { initial: set.clone(), descriptors, trajectories, method: Method::Rk4, t0, t1 })
}

/// Hamiltonians at `t0` when every descriptor they read is stationary:
/// a component of an active qubit that commutes with that qubit's own
/// Hamiltonian never moves, and inactive qubits never move, so all
/// Hamiltonians then stay constant and `U_a = exp(i H_a t)` is exact.
fn constant_hamiltonians(
    set: &DescriptorSet,
    hamiltonians: &BTreeMap<String, HamiltonianExpr>,
    active: &[String],
    hermitian_tol: f64,
) -> Result<Option<BTreeMap<String, QNumber>>, DynamicsError> {
    let mut h0 = BTreeMap::new();
    for id in active {
        h0.insert(id.clone(), eval_hamiltonian_with_tol(&hamiltonians[id], set, hermitian_tol)?);
    }
    for id in active {
        for (q, axis) in hamiltonians[id].referenced_descriptors() {
            if let Some(hq) = h0.get(&q) {
                let comp = set.get(&q).expect("checked").get(axis);
                let scale = hq.max_abs().max(1.0);
                if QNumber::commutator(hq, comp).max_abs() > 1e-12 * scale {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(h0))
}

#[allow(clippy::too_many_arguments)]
fn closed_form(
    set: &DescriptorSet,
    active: &[String],
    h0: &BTreeMap<String, QNumber>,
    t0: f64,
    t1: f64,
    n_steps: usize,
    h: f64,
    record: bool,
) -> Evolution {
    let dim = set.dim();
    let mut trajectories = BTreeMap::new();
    let mut finals = Vec::new();
    for id in active {
        let (vals, vecs) = linalg::hermitian_eigen(h0[id].matrix());
        let at = |tau: f64| {
            let d = DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    C64::from_polar(1.0, vals[i] * tau)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            QNumber::from_square(&vecs * d * vecs.adjoint())
        };
        let samples: Vec<(f64, QNumber)> = if record {
            (0..=n_steps)
                .map(|k| (t0 + k as f64 * h, if k == 0 { QNumber::identity(dim) } else { at(k as f64 * h) }))
                .collect()
        } else {
            vec![(t0, QNumber::identity(dim)), (t1, at(t1 - t0))]
        };
        finals.push(samples.last().expect("non-empty").1.matrix().clone());
        let step = if record { h } else { t1 - t0 };
        trajectories.insert(id.clone(), UnitaryTrajectory { step, samples });
    }
    let descriptors = current_set(set, active, &finals);
    Evolution { initial: set.clone(), descriptors, trajectories, method: Method::ClosedForm, t0, t1 }
}

/// Central-difference estimate of `i·(dU†/dt)·U` at the sample nearest `t`.
pub fn generator_from_trajectory(traj: &UnitaryTrajectory, t: f64) -> Result<QNumber, DynamicsError> {
    let n = traj.samples.len();
    if n < 3 {
        return Err(DynamicsError::TooFewSamples(n));
    }
    let (lo, hi) = (traj.samples[0].0, traj.samples[n - 1].0);
    let k = traj.nearest_index(t);
    if k == 0 || k == n - 1 || t < lo || t > hi {
        return Err(DynamicsError::OutOfRange { t, lo, hi });
    }
    let (tm, um) = &traj.samples[k - 1];
    let (tp, up) = &traj.samples[k + 1];
    let d_udag = (&up.adjoint() - &um.adjoint()).scale(1.0 / (tp - tm));
    Ok((&d_udag * &traj.samples[k].1).scale_c(C64::new(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{Axis, DescriptorTriple};
    use std::f64::consts::FRAC_PI_2;

    fn single() -> DescriptorSet {
        DescriptorSet::from_triples(2, [DescriptorTriple::pauli("A")]).unwrap()
    }

    fn not_h() -> BTreeMap<String, HamiltonianExpr> {
        BTreeMap::from([("A".to_string(), HamiltonianExpr::q("A", Axis::X).scaled(FRAC_PI_2))])
    }

    #[test]
    fn not_via_both_paths() {
        for integrator in [Integrator::Rk4, Integrator::ClosedForm] {
            let opts = EvolveOptions { integrator, ..Default::default() };
            let ev = evolve(&single(), &not_h(), 0.0, 1.0, &opts).unwrap();
            let a = ev.descriptors.get("A").unwrap();
            assert!(a.x().distance(&QNumber::sigma_x()) < 1e-9);
            assert!(a.y().distance(&QNumber::sigma_y().scale(-1.0)) < 1e-9);
            assert!(a.z().distance(&QNumber::sigma_z().scale(-1.0)) < 1e-9);
        }
    }

    #[test]
    fn auto_picks_closed_form_for_not() {
        let ev = evolve(&single(), &not_h(), 0.0, 1.0, &EvolveOptions::default()).unwrap();
        assert_eq!(ev.method, Method::ClosedForm);
    }

    #[test]
    fn zero_hamiltonians_leave_everything() {
        let h = BTreeMap::from([("A".to_string(), HamiltonianExpr::zero())]);
        let ev = evolve(&single(), &h, 0.0, 1.0, &EvolveOptions::default()).unwrap();
        assert_eq!(ev.method, Method::Static);
        assert_eq!(ev.descriptors, single());
    }

    #[test]
    fn bad_arguments() {
        let o = EvolveOptions::with_step(0.0);
        assert!(matches!(evolve(&single(), &not_h(), 0.0, 1.0, &o), Err(DynamicsError::InvalidStep(_))));
        let o = EvolveOptions::default();
        assert!(matches!(evolve(&single(), &not_h(), 1.0, 0.0, &o), Err(DynamicsError::InvalidInterval { .. })));
        let h = BTreeMap::from([("B".to_string(), HamiltonianExpr::q("A", Axis::X))]);
        assert!(matches!(evolve(&single(), &h, 0.0, 1.0, &o), Err(DynamicsError::UnknownQubit(_))));
    }

    #[test]
    fn huge_step_is_rejected_for_drift() {
        let set = DescriptorSet::from_triples(2, [DescriptorTriple::pauli("A"), DescriptorTriple::pauli("B")]).unwrap();
        let inner = HamiltonianExpr::anticommutator(HamiltonianExpr::q("A", Axis::Z), HamiltonianExpr::q("B", Axis::Z));
        let h = BTreeMap::from([(
            "A".to_string(),
            HamiltonianExpr::anticommutator(inner, HamiltonianExpr::q("A", Axis::X)).scaled(5.0),
        )]);
        let r = evolve(&set, &h, 0.0, 1.0, &EvolveOptions::with_step(0.5));
        assert!(matches!(r, Err(DynamicsError::UnitarityDrift { .. })));
    }

    #[test]
    fn generator_of_closed_form_not() {
        let ev = evolve(&single(), &not_h(), 0.0, 1.0, &EvolveOptions::default()).unwrap();
        let g = generator_from_trajectory(&ev.trajectories["A"], 0.5).unwrap();
        assert!(g.distance(&QNumber::sigma_x().scale(FRAC_PI_2)) < 1e-5);
        assert!(generator_from_trajectory(&ev.trajectories["A"], 0.0).is_err());
    }
}
