use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use super::{
    classical_ctc_enumerate, classical_problem_from_network, consistency_residual, fixed_point_solve, pair_residual,
    scalar_self_consistency, CtcError, ScenarioResult, SolverOptions,
};
use crate::algebra::{generated_algebra_with_tol, hilbert_dimension, HilbertDimension, EVOLVED_RANK_TOL};
use crate::dynamics::{eval_hamiltonian, model_alpha, rotate_x, EvolveOptions, Integrator};
use crate::gates::attribute_of;
use crate::network::{run_schedule, NetworkState, RunOptions};
use crate::qnum::{expectation, induced_coefficients, is_sharp, Axis, DescriptorSet, DescriptorTriple, QNumber};

pub const MODEL_THEORY_SPEC: &str = include_str!("../../scenarios/model_theory.json");
pub const GRANDFATHER_SPEC: &str = include_str!("../../scenarios/grandfather.json");
pub const HILBERT_CREATION_SPEC: &str = include_str!("../../scenarios/hilbert_creation.json");

/// Spec text of a built-in scenario.
pub fn builtin_spec(name: &str) -> Option<&'static str> {
    match name {
        "model-theory" => Some(MODEL_THEORY_SPEC),
        "grandfather" | "classical-grandfather" => Some(GRANDFATHER_SPEC),
        "hilbert-creation" | "hilbert-destruction" => Some(HILBERT_CREATION_SPEC),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

fn triple(label: &str, comps: [QNumber; 3]) -> DescriptorTriple {
    DescriptorTriple::from_array(label, comps).expect("equal dimensions")
}

fn to_map(set: &DescriptorSet) -> std::collections::BTreeMap<String, DescriptorTriple> {
    set.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Angle of the rotation about x taking `reference` to `t`, in `[−π/2, 3π/2)`.
fn x_angle(t: &DescriptorTriple, reference: &DescriptorTriple) -> Result<f64, CtcError> {
    let (c, _) = induced_coefficients(t, reference)?;
    let a = c[(1, 2)].atan2(c[(1, 1)]);
    Ok(if a < -FRAC_PI_2 { a + TAU } else { a })
}

/// Rotation angle the cnot applies to Q1 when Q2 starts as Q1 rotated by `phi + π`.
fn cnot_angle(net: &NetworkState, sigma: &DescriptorTriple, phi: f64, run: &RunOptions) -> Result<f64, CtcError> {
    let q2 = rotate_x(sigma, phi + PI).with_label("Q2");
    let out = run_schedule(&net.with_initial([q2])?, &RunOptions { t_end: Some(1.0), ..*run })?;
    x_angle(&out.final_descriptors["Q1"], sigma)
}

/// The time-travel paradox network: solves for Q2's initial triple and
/// checks the resulting evolution table.
pub fn run_grandfather_scenario(step: f64, tol: f64) -> Result<ScenarioResult, CtcError> {
    let net = NetworkState::from_json(GRANDFATHER_SPEC)?;
    let (ident, t_final) = net.ctc.clone().ok_or(CtcError::NoIdentification)?;
    let sigma = net.qubits["Q1"].clone();
    let run = RunOptions::with_step(step);
    let mut r = ScenarioResult::new("grandfather");

    let failure: RefCell<Option<CtcError>> = RefCell::new(None);
    let f = |phi: f64| match cnot_angle(&net, &sigma, phi, &run) {
        Ok(a) => a,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let root = scalar_self_consistency(f, 0.0, PI, 1e-13);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let root = root?;
    let phi = root.root;
    r.iterations = root.iterations;
    r.parameters.insert("phi".into(), phi);
    r.check("phi = pi/2", (phi - FRAC_PI_2).abs(), 1e-9);
    let mut worst: f64 = 0.0;
    for k in 0..=8 {
        let p = k as f64 * PI / 8.0;
        worst = worst.max((f(p) - FRAC_PI_2 * (1.0 + p.cos())).abs());
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    r.check("simulated self-consistency map equals (pi/2)(1 + cos phi)", worst, 1e-9);

    let solved = net.with_initial([rotate_x(&sigma, phi + PI).with_label("Q2")])?;
    let out = run_schedule(&solved, &run)?;
    let (x, y, z) = (QNumber::sigma_x(), QNumber::sigma_y(), QNumber::sigma_z());
    let (s, c) = phi.sin_cos();
    let at = |t: f64, q: &str| out.at(t).map(|d| d[q].clone()).ok_or(CtcError::NoIdentification);
    let q1_1 = triple("Q1", [x.clone(), &y.scale(c) + &z.scale(s), &z.scale(c) - &y.scale(s)]);
    let q1_2 = triple("Q1", [x.clone(), &y.scale(-c) - &z.scale(s), &z.scale(-c) + &y.scale(s)]);
    r.check("q1(1) is q1(0) rotated by phi", at(1.0, "Q1")?.trace_distance(&q1_1), tol);
    r.check("q1(2) is q1(0) rotated by phi + pi", at(2.0, "Q1")?.trace_distance(&q1_2), tol);

    let plain = triple("", [x.clone(), y.clone(), z.clone()]);
    let solved_q2 = triple("", [x.clone(), z.scale(-1.0), y.clone()]);
    let after_cnot = triple("", [x.clone(), z.clone(), y.scale(-1.0)]);
    let table = [(0.0, &plain, &solved_q2), (1.0, &after_cnot, &solved_q2), (2.0, &solved_q2, &solved_q2)];
    for (t, e1, e2) in table {
        r.check(format!("table t={t} q1"), at(t, "Q1")?.trace_distance(e1), tol);
        r.check(format!("table t={t} q2"), at(t, "Q2")?.trace_distance(e2), tol);
    }
    let q3_fixed = out.snapshots.iter().all(|s| s.descriptors["Q3"].bit_identical(&net.qubits["Q3"]));
    r.check_flag("q3 unchanged throughout", q3_fixed);

    let q2z = solved.qubits["Q2"].z();
    let e = expectation(q2z, &solved.state)?;
    r.parameters.insert("<q2z(0)>".into(), e);
    r.check("<q2z(0)> = 0", e.abs(), tol);
    r.check_flag("q2z(0) is not sharp", !is_sharp(q2z, &solved.state, tol)?);
    r.check_flag("q2 has no attribute", attribute_of(&solved.qubits, &solved.state, "Q2", tol).is_none());

    let mut rk = run;
    rk.evolve.integrator = Integrator::Rk4;
    r.residual = consistency_residual(&solved, &ident, t_final, &rk)?;
    r.solved = r.residual <= tol;
    r.check("consistency residual (RK4 re-simulation)", r.residual, tol);

    let fp = fixed_point_solve(&net, &ident, t_final, &SolverOptions { tol: 1e-9, run, ..Default::default() })?;
    r.parameters.insert("fixed_point_iterations".into(), fp.iterations as f64);
    let agree = fp.initial_descriptors.get("Q2").map_or(f64::INFINITY, |g| g.max_abs_diff(&solved.qubits["Q2"]));
    r.check_flag("fixed-point solver converges", fp.solved);
    r.check("fixed-point solution equals the scalar solution", agree, 1e-6);

    r.initial_descriptors = to_map(&solved.qubits);
    r.final_descriptors = to_map(&out.final_descriptors);
    Ok(r)
}

fn pair_dimension(a: &DescriptorTriple, b: &DescriptorTriple) -> Result<(usize, HilbertDimension), CtcError> {
    let gens: Vec<QNumber> = a.components().iter().chain(b.components()).cloned().collect();
    let alg = generated_algebra_with_tol(&gens, EVOLVED_RANK_TOL)
        .map_err(|e| CtcError::InvalidIdentification(e.to_string()))?;
    let hd = hilbert_dimension(&alg).map_err(|e| CtcError::InvalidIdentification(e.to_string()))?;
    Ok((alg.dimension(), hd))
}

fn hd_value(hd: HilbertDimension) -> f64 {
    match hd {
        HilbertDimension::Full { n } => n as f64,
        HilbertDimension::NotFull { .. } => f64::NAN,
    }
}

/// Two qubits travel back in time and emerge with a larger joint algebra
/// (forward), or the same protocol run backwards (reverse).
pub fn run_hilbert_creation_scenario(direction: Direction, tol: f64) -> Result<ScenarioResult, CtcError> {
    let net = NetworkState::from_json(HILBERT_CREATION_SPEC)?;
    let (ident, _) = net.ctc.clone().ok_or(CtcError::NoIdentification)?;
    let run = RunOptions {
        evolve: EvolveOptions { integrator: Integrator::ClosedForm, ..Default::default() },
        ..Default::default()
    };
    let out = run_schedule(&net, &run)?;
    let one = QNumber::identity(2);
    let (x, y, z) = (QNumber::sigma_x(), QNumber::sigma_y(), QNumber::sigma_z());

    match direction {
        Direction::Forward => {
            let mut r = ScenarioResult::new("hilbert-creation");
            let h_expected = x.kron(&(&one - &z)).scale(FRAC_PI_4);
            let gate = &net.schedule[0].gates[0];
            let mut h_dev: f64 = 0.0;
            for q in ["Q1", "Q2"] {
                h_dev = h_dev.max(
                    eval_hamiltonian(&gate.hamiltonians[q], &net.qubits)
                        .map_err(|e| CtcError::InvalidIdentification(e.to_string()))?
                        .distance(&h_expected),
                );
            }
            r.check("Hamiltonians reduce to (pi/4) sx(1 - sz)", h_dev, tol);

            let a = triple("", [x.kron(&one), y.kron(&z), z.kron(&z)]);
            let b = triple("", [x.kron(&x), y.kron(&x), z.kron(&one)]);
            for (q, e) in [("Q1", &a), ("Q2", &b), ("Q3", &a), ("Q4", &b)] {
                r.check(format!("{q}(1) output row"), out.final_descriptors[q].trace_distance(e), tol);
            }
            r.residual = pair_residual(&net, &ident, &out.final_descriptors);
            r.solved = r.residual <= tol;
            r.check("consistency residual", r.residual, tol);

            let (_, young) = pair_dimension(&net.qubits["Q1"], &net.qubits["Q2"])?;
            let (d_old, old) = pair_dimension(&out.final_descriptors["Q3"], &out.final_descriptors["Q4"])?;
            r.parameters.insert("young_hilbert_dimension".into(), hd_value(young));
            r.parameters.insert("old_hilbert_dimension".into(), hd_value(old));
            r.parameters.insert("old_algebra_dimension".into(), d_old as f64);
            r.check_flag("Q1(0), Q2(0) act on a 2-dimensional Hilbert space", young == HilbertDimension::Full { n: 2 });
            r.check_flag("Q3(1), Q4(1) act on a 4-dimensional Hilbert space", old == HilbertDimension::Full { n: 4 });
            r.check_flag("Q3(1), Q4(1) generate 16 basis elements", d_old == 16);
            r.initial_descriptors = to_map(&net.qubits);
            r.final_descriptors = to_map(&out.final_descriptors);
            Ok(r)
        }
        Direction::Reverse => {
            let mut r = ScenarioResult::new("hilbert-destruction");
            let mut rev = net.with_initial(out.final_descriptors.triples().cloned())?;
            for slot in rev.schedule.iter_mut() {
                for g in slot.gates.iter_mut() {
                    for h in g.hamiltonians.values_mut() {
                        *h = h.clone().scaled(-1.0);
                    }
                }
            }
            let back = run_schedule(&rev, &RunOptions { check_preconditions: false, ..run })?;
            let (_, past) = pair_dimension(&rev.qubits["Q3"], &rev.qubits["Q4"])?;
            let (_, future) = pair_dimension(&back.final_descriptors["Q1"], &back.final_descriptors["Q2"])?;
            r.parameters.insert("past_hilbert_dimension".into(), hd_value(past));
            r.parameters.insert("future_hilbert_dimension".into(), hd_value(future));
            r.check_flag(
                "Q3, Q4 entering act on a 4-dimensional Hilbert space",
                past == HilbertDimension::Full { n: 4 },
            );
            r.check_flag(
                "Q1, Q2 leaving act on a 2-dimensional Hilbert space",
                future == HilbertDimension::Full { n: 2 },
            );
            let mut worst: f64 = 0.0;
            for q in ["Q1", "Q2"] {
                let d = back.final_descriptors[q].trace_distance(&net.qubits[q]);
                worst = worst.max(d);
                r.check(format!("{q} returns to its initial triple"), d, tol);
            }
            r.residual = worst;
            r.solved = worst <= tol;
            r.initial_descriptors = to_map(&rev.qubits);
            r.final_descriptors = to_map(&back.final_descriptors);
            Ok(r)
        }
    }
}

/// Two maximally non-commuting qubits, one driven by a Hamiltonian that
/// reads the other's z-observable; compared against the closed-form angle
/// `2·atan(tanh t)`.
pub fn run_model_theory_scenario(step: f64, tol: f64) -> Result<ScenarioResult, CtcError> {
    let net = NetworkState::from_json(MODEL_THEORY_SPEC)?;
    let out = run_schedule(&net, &RunOptions { sample_dt: Some(0.01), ..RunOptions::with_step(step) })?;
    let (x, y, z) = (QNumber::sigma_x(), QNumber::sigma_y(), QNumber::sigma_z());
    let mut r = ScenarioResult::new("model-theory");
    let (mut err, mut e1, mut e2): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in &out.snapshots {
        let a = model_alpha(s.time);
        let (sa, ca) = a.sin_cos();
        let expect = triple("Q1", [x.clone(), &y.scale(ca) + &z.scale(sa), &z.scale(ca) - &y.scale(sa)]);
        err = err.max(s.descriptors["Q1"].trace_distance(&expect));
        for (axis, v) in Axis::ALL.into_iter().zip([0.0, sa, ca]) {
            e1 = e1.max((expectation(s.descriptors["Q1"].get(axis), &net.state)? - v).abs());
        }
        for (axis, v) in Axis::ALL.into_iter().zip([0.0, 0.0, 1.0]) {
            e2 = e2.max((expectation(s.descriptors["Q2"].get(axis), &net.state)? - v).abs());
        }
    }
    r.parameters.insert("alpha(3)".into(), model_alpha(out.end_time));
    r.parameters.insert("samples".into(), out.snapshots.len() as f64);
    r.check("q1(t) matches the closed form", err, tol);
    r.check("<q1(t)> = (0, sin a, cos a)", e1, tol);
    r.check("<q2(t)> = (0, 0, 1)", e2, tol);
    r.check_flag(
        "q2 unchanged throughout",
        out.snapshots.iter().all(|s| s.descriptors["Q2"].bit_identical(&net.qubits["Q2"])),
    );
    r.residual = err;
    r.solved = true;
    r.iterations = out.snapshots.len();
    r.initial_descriptors = to_map(&net.qubits);
    r.final_descriptors = to_map(&out.final_descriptors);
    Ok(r)
}

/// The grandfather network with every qubit replaced by a ±1 bit.
pub fn run_classical_grandfather_scenario() -> Result<ScenarioResult, CtcError> {
    let net = NetworkState::from_json(GRANDFATHER_SPEC)?;
    let problem = classical_problem_from_network(&net)?;
    let sols = classical_ctc_enumerate(&problem)?;
    let pos = |q: &str| problem.free_bits.iter().position(|k| problem.bits[*k] == q);
    let (i1, i3) = (pos("Q1"), pos("Q3"));
    let count = |x1: i8| -> usize {
        sols.iter()
            .filter(|s| i1.is_some_and(|i| s.free[i] == x1) && i3.is_some_and(|i| s.free[i] == 1))
            .map(|s| s.consistent.len())
            .sum()
    };
    let (plus, minus) = (count(1), count(-1));
    let mut r = ScenarioResult::new("classical-grandfather");
    r.parameters.insert("consistent_x1_plus".into(), plus as f64);
    r.parameters.insert("consistent_x1_minus".into(), minus as f64);
    r.check_flag("no consistent x2 when x1 = 1", plus == 0);
    r.check_flag("two consistent x2 when x1 = -1", minus == 2);
    r.solved = plus > 0 && minus > 0;
    r.residual = if r.solved { 0.0 } else { 1.0 };
    Ok(r)
}
