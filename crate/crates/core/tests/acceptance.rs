//! Acceptance suite: prints one PASS/FAIL line per criterion, with the
//! failing sub-checks underneath. Exits nonzero only when the set of failing
//! sub-checks differs from `KNOWN_RED` (in either direction).

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unorthodox::algebra::{
    descriptor_algebra, generated_algebra, hilbert_dimension, parameter_count, HilbertDimension, Regime,
    EVOLVED_RANK_TOL,
};
use unorthodox::ctc::*;
use unorthodox::dynamics::{evolve, EvolveOptions, HamiltonianExpr, Integrator};
use unorthodox::gates::*;
use unorthodox::linalg::exp_i_hermitian;
use unorthodox::network::{run_schedule, NetworkState, RunOptions};
use unorthodox::qnum::{
    expectation, is_sharp, rotation_parameters, validate_pauli_triple, DescriptorSet, RotationParameters,
};
use unorthodox::{Axis, DescriptorTriple, HeisenbergState, QNumber, C64};

/// Sub-checks that fail for reasons recorded in the README.
const KNOWN_RED: &[(u8, &str)] = &[
    (4, "imprint <q_bz(t+1)> = <q_az(t)>, 20 random controls (non-commuting)"),
    (4, "imprint <q_bz(t+1)> = <q_az(t)>, 20 random controls (commuting)"),
    (7, "q2(1) equals the tabulated output"),
    (7, "consistency residual"),
];

const TOL: f64 = 1e-6;

struct Sub {
    name: String,
    value: f64,
    tol: f64,
}

impl Sub {
    fn passed(&self) -> bool {
        self.value <= self.tol
    }
}

#[derive(Default)]
struct Criterion {
    subs: Vec<Sub>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        self.subs.push(Sub { name: name.into(), value, tol });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    /// Records an error from the library as a failed sub-check.
    fn attempt<T>(&mut self, name: &str, r: Result<T, impl std::fmt::Display>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(format!("{name}: {e}"), f64::INFINITY, 0.0);
                None
            }
        }
    }
}

fn pauli(label: &str) -> DescriptorTriple {
    DescriptorTriple::pauli(label)
}

fn triple(label: &str, x: QNumber, y: QNumber, z: QNumber) -> DescriptorTriple {
    DescriptorTriple::new(label, x, y, z).unwrap()
}

fn sx() -> QNumber {
    QNumber::sigma_x()
}
fn sy() -> QNumber {
    QNumber::sigma_y()
}
fn sz() -> QNumber {
    QNumber::sigma_z()
}

fn random_rotation(rng: &mut ChaCha8Rng) -> RotationParameters {
    RotationParameters::from_angles(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU))
}

/// Oracle: α(t) = 2 atan(tanh t) and the rotated triple it implies.
fn model_oracle(t: f64) -> DescriptorTriple {
    let a = 2.0 * t.tanh().atan();
    let (s, c) = a.sin_cos();
    triple("Q1", sx(), &sy().scale(c) + &sz().scale(s), &sz().scale(c) - &sy().scale(s))
}

fn model_hamiltonians() -> BTreeMap<String, HamiltonianExpr> {
    let zz = HamiltonianExpr::anticommutator(HamiltonianExpr::q("Q1", Axis::Z), HamiltonianExpr::q("Q2", Axis::Z));
    BTreeMap::from([(
        "Q1".to_string(),
        HamiltonianExpr::anticommutator(zz, HamiltonianExpr::q("Q1", Axis::X)).scaled(0.25),
    )])
}

/// Worst trace-norm error of q1 against the oracle over [0, 3], plus the
/// worst expectation errors of q1 and q2.
fn model_errors(step: f64) -> (f64, f64, f64) {
    let set = DescriptorSet::from_triples(2, [pauli("Q1"), pauli("Q2")]).unwrap();
    let state = HeisenbergState::basis(2, 0);
    let ev = evolve(&set, &model_hamiltonians(), 0.0, 3.0, &EvolveOptions::with_step(step)).unwrap();
    let (mut err, mut e1, mut e2): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (k, t) in ev.sample_times().iter().enumerate() {
        let d = ev.descriptors_at(k);
        err = err.max(d["Q1"].trace_distance(&model_oracle(*t)));
        let a = 2.0 * t.tanh().atan();
        for (axis, v) in Axis::ALL.into_iter().zip([0.0, a.sin(), a.cos()]) {
            e1 = e1.max((expectation(d["Q1"].get(axis), &state).unwrap() - v).abs());
        }
        for (axis, v) in Axis::ALL.into_iter().zip([0.0, 0.0, 1.0]) {
            e2 = e2.max((expectation(d["Q2"].get(axis), &state).unwrap() - v).abs());
        }
    }
    (err, e1, e2)
}

fn criterion_1(c: &mut Criterion) {
    let start = Instant::now();
    let (err, e1, e2) = model_errors(1e-3);
    let elapsed = start.elapsed().as_secs_f64();
    c.check("q1(t) trace-norm error vs closed form", err, 1e-6);
    c.check("<q1(t)> = (0, sin a, cos a)", e1, 1e-6);
    c.check("<q2(t)> = (0, 0, 1)", e2, 1e-6);
    c.check("runtime (s)", elapsed, 5.0);
}

fn criterion_2(c: &mut Criterion) {
    let set = DescriptorSet::from_triples(2, [pauli("A")]).unwrap();
    let expect = triple("A", sx(), sy().scale(-1.0), sz().scale(-1.0));
    let with = |integrator| EvolveOptions { integrator, ..Default::default() };
    if let Some(ev) = c.attempt("not via RK4", apply_gate(&set, &not_gate("A"), 0.0, &with(Integrator::Rk4))) {
        c.check("not via RK4", ev.descriptors["A"].max_abs_diff(&expect), 1e-6);
    }
    if let Some(ev) =
        c.attempt("not via closed form", apply_gate(&set, &not_gate("A"), 0.0, &with(Integrator::ClosedForm)))
    {
        c.check("not via closed form", ev.descriptors["A"].max_abs_diff(&expect), 1e-12);
    }
    let once = apply_gate(&set, &sqrt_not_gate("A"), 0.0, &EvolveOptions::default()).unwrap().descriptors;
    let twice = apply_gate(&once, &sqrt_not_gate("A"), 0.5, &EvolveOptions::default()).unwrap().descriptors;
    c.check("sqrt-not twice equals not", twice["A"].max_abs_diff(&expect), 1e-6);
}

fn criterion_3(c: &mut Criterion) {
    let one4 = QNumber::identity(4);
    let z4 = sz().kron(&QNumber::identity(2));
    c.check("aligned -> 0 (2x2)", p_bar(&sz(), &sz()).max_abs(), 1e-12);
    c.check("aligned -> 0 (4x4)", p_bar(&z4, &z4).max_abs(), 1e-12);
    c.check("anti-aligned -> 1 (2x2)", p_bar(&sz().scale(-1.0), &sz()).distance(&QNumber::identity(2)), 1e-12);
    c.check("anti-aligned -> 1 (4x4)", p_bar(&z4.scale(-1.0), &z4).distance(&one4), 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = random_rotation(&mut rng).apply(&pauli("a"));
        let p = p_bar(a.z(), &sz());
        let scalar = p.trace().re / 2.0;
        worst = worst.max(p.distance(&QNumber::identity(2).scale(scalar)));
    }
    c.check("maximally non-commuting -> multiple of 1 (20 random)", worst, 1e-9);
}

/// Oracle: the classical controlled-NOT on ±1 values.
fn cnot_oracle(a: f64, b: f64) -> (f64, f64) {
    (a, if a < 0.0 { -b } else { b })
}

fn value(a: Attribute) -> f64 {
    a.value()
}

fn criterion_4(c: &mut Criterion) {
    for (label, setup) in [("commuting", cnot_commuting as fn() -> _), ("non-commuting", cnot_noncommuting)] {
        let mut worst: f64 = 0.0;
        let mut control_moved = false;
        for a in BOTH {
            for b in BOTH {
                let (set, state) = setup();
                let input = prepare(&set, &[("A", a), ("B", b)]);
                let out =
                    apply_gate(&input, &cnot_gate("A", "B", "C"), 0.0, &EvolveOptions::default()).unwrap().descriptors;
                let (ea, eb) = cnot_oracle(value(a), value(b));
                worst = worst.max((expectation(out["A"].z(), &state).unwrap() - ea).abs());
                worst = worst.max((expectation(out["B"].z(), &state).unwrap() - eb).abs());
                control_moved |= !out["A"].bit_identical(&input["A"]);
            }
        }
        c.check(format!("truth table ({label})"), worst, TOL);
        c.flag(format!("control unchanged ({label})"), !control_moved);
    }

    // target starts at +1; the control is rotated away from the reference
    for (label, setup) in [("non-commuting", cnot_noncommuting as fn() -> _), ("commuting", cnot_commuting)] {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let (mut worst, mut closed): (f64, f64) = (0.0, 0.0);
        for _ in 0..20 {
            let (set, state) = setup();
            let mut input = set.clone();
            input.insert(random_rotation(&mut rng).apply(&set["A"])).unwrap();
            let out =
                apply_gate(&input, &cnot_gate("A", "B", "C"), 0.0, &EvolveOptions::default()).unwrap().descriptors;
            let az = expectation(input["A"].z(), &state).unwrap();
            let bz = expectation(out["B"].z(), &state).unwrap();
            worst = worst.max((bz - az).abs());
            // P-bar of control and reference is ((1 - r)/2)·1, so the target turns by π(1 - r)/2
            closed = closed.max((bz - (PI * (1.0 - az) / 2.0).cos()).abs());
        }
        c.check(format!("imprint <q_bz(t+1)> = <q_az(t)>, 20 random controls ({label})"), worst, TOL);
        c.check(format!("<q_bz(t+1)> = cos(pi(1 - r)/2), 20 random controls ({label})"), closed, TOL);
    }
    let mut worst: f64 = 0.0;
    for a in BOTH {
        let (set, state) = cnot_noncommuting();
        let input = prepare(&set, &[("A", a)]);
        let out = apply_gate(&input, &cnot_gate("A", "B", "C"), 0.0, &EvolveOptions::default()).unwrap().descriptors;
        worst = worst.max((expectation(out["B"].z(), &state).unwrap() - value(a)).abs());
    }
    c.check("imprint for sharp controls", worst, TOL);
}

fn criterion_5(c: &mut Criterion) {
    for (label, setup) in [("commuting", ccnot_commuting as fn() -> _), ("non-commuting", ccnot_noncommuting)] {
        let mut worst: f64 = 0.0;
        for a in BOTH {
            for b in BOTH {
                for t in BOTH {
                    let (set, state) = setup();
                    let input = prepare(&set, &[("A", a), ("B", b), ("C", t)]);
                    let out =
                        apply_gate(&input, &ccnot_gate(["A", "B"], "C", ["D", "E"]), 0.0, &EvolveOptions::default())
                            .unwrap()
                            .descriptors;
                    // Toffoli on ±1 values: flip iff both controls are −1
                    let (va, vb, vt) = (value(a), value(b), value(t));
                    let et = if va < 0.0 && vb < 0.0 { -vt } else { vt };
                    for (q, e) in [("A", va), ("B", vb), ("C", et)] {
                        worst = worst.max((expectation(out[q].z(), &state).unwrap() - e).abs());
                    }
                }
            }
        }
        c.check(format!("8 combinations ({label})"), worst, TOL);
    }
}

fn criterion_6(c: &mut Criterion) {
    let Some(r) = c.attempt("grandfather scalar solve", run_grandfather_scenario(1e-3, TOL)) else {
        return;
    };
    c.check("phi = pi/2", (r.parameters["phi"] - FRAC_PI_2).abs(), 1e-9);

    let net = NetworkState::from_json(GRANDFATHER_SPEC).unwrap();
    let plain = triple("", sx(), sy(), sz());
    let old = triple("Q2", sx(), sz().scale(-1.0), sy());
    let after_cnot = triple("", sx(), sz(), sy().scale(-1.0));
    let solved = net.with_initial([old.clone()]).unwrap();
    let out = run_schedule(&solved, &RunOptions::default()).unwrap();
    let table = [(0.0, &plain, &old), (1.0, &after_cnot, &old), (2.0, &old, &old)];
    let mut worst: f64 = 0.0;
    for (t, e1, e2) in table {
        let d = out.at(t).unwrap();
        worst = worst.max(d["Q1"].trace_distance(e1)).max(d["Q2"].trace_distance(e2));
    }
    c.check("evolution table t = 0, 1, 2", worst, TOL);
    c.flag(
        "q3 invariant throughout",
        out.snapshots.iter().all(|s| s.descriptors["Q3"].bit_identical(&plain.clone().with_label("Q3"))),
    );
    let q2z = solved.qubits["Q2"].z();
    c.check("<q2z(0)> = 0", expectation(q2z, &solved.state).unwrap().abs(), TOL);
    c.flag("q2z(0) non-sharp", !is_sharp(q2z, &solved.state, TOL).unwrap());

    // classical oracle: x2 must equal −x1·x2 with x3 = +1
    let problem = classical_problem_from_network(&net).unwrap();
    let sols = classical_ctc_enumerate(&problem).unwrap();
    let idx = |q: &str| problem.free_bits.iter().position(|k| problem.bits[*k] == q).unwrap();
    let count = |x1: i8| -> usize {
        sols.iter().filter(|s| s.free[idx("Q1")] == x1 && s.free[idx("Q3")] == 1).map(|s| s.consistent.len()).sum()
    };
    let brute = |x1: i8| [1i8, -1].iter().filter(|&&x2| x2 == -x1 * x2).count();
    c.flag("classical: 0 consistent for x1 = 1", count(1) == 0 && brute(1) == 0);
    c.flag("classical: 2 consistent for x1 = -1", count(-1) == 2 && brute(-1) == 2);
}

fn pair_hilbert(a: &DescriptorTriple, b: &DescriptorTriple) -> (usize, HilbertDimension) {
    let gens: Vec<QNumber> = a.components().iter().chain(b.components()).cloned().collect();
    let alg = generated_algebra(&gens).unwrap();
    (alg.dimension(), hilbert_dimension(&alg).unwrap())
}

fn criterion_7(c: &mut Criterion) {
    let net = NetworkState::from_json(HILBERT_CREATION_SPEC).unwrap();
    let one = QNumber::identity(2);
    let plain = triple("", sx().kron(&one), sy().kron(&one), sz().kron(&one));
    let a = triple("", sx().kron(&one), sy().kron(&sz()), sz().kron(&sz()));
    let b = triple("", sx().kron(&sx()), sy().kron(&sx()), sz().kron(&one));
    let mut worst_in: f64 = 0.0;
    for (q, e) in [("Q1", &plain), ("Q2", &plain), ("Q3", &a), ("Q4", &b)] {
        worst_in = worst_in.max(net.qubits[q].trace_distance(e));
    }
    c.check("initial representation as tabulated", worst_in, 1e-12);
    let run = RunOptions {
        evolve: EvolveOptions { integrator: Integrator::ClosedForm, ..Default::default() },
        ..Default::default()
    };
    let Some(out) = c.attempt("hilbert-creation run", run_schedule(&net, &run)) else {
        return;
    };
    let d = &out.final_descriptors;
    for (q, e) in [("Q1", &a), ("Q2", &b), ("Q3", &a), ("Q4", &b)] {
        c.check(format!("{}(1) equals the tabulated output", q.to_lowercase()), d[q].trace_distance(e), 1e-9);
    }
    let residual = d["Q1"].trace_distance(&net.qubits["Q3"]).max(d["Q2"].trace_distance(&net.qubits["Q4"]));
    c.check("consistency residual", residual, 1e-9);

    let young = pair_hilbert(&net.qubits["Q1"], &net.qubits["Q2"]);
    let old = pair_hilbert(&d["Q3"], &d["Q4"]);
    c.flag("young pair Hilbert dimension 2", young.1 == HilbertDimension::Full { n: 2 });
    c.flag("old pair Hilbert dimension 4", old.1 == HilbertDimension::Full { n: 4 });
    c.check("old pair algebra has 16 basis elements", (old.0 as f64 - 16.0).abs(), 0.0);

    if let Some(r) = c.attempt("reverse protocol", run_hilbert_creation_scenario(Direction::Reverse, 1e-9)) {
        c.flag(
            "reverse protocol 4 -> 2",
            r.parameters["past_hilbert_dimension"] == 4.0 && r.parameters["future_hilbert_dimension"] == 2.0,
        );
    }
}

fn random_expr(rng: &mut ChaCha8Rng, ids: &[String], depth: u32) -> HamiltonianExpr {
    let leaf = |rng: &mut ChaCha8Rng| {
        HamiltonianExpr::q(ids[rng.random_range(0..ids.len())].clone(), Axis::from_index(rng.random_range(0..3)))
    };
    if depth == 0 {
        return leaf(rng).scaled(rng.random_range(-1.0..1.0));
    }
    let l = random_expr(rng, ids, depth - 1);
    let r = random_expr(rng, ids, depth - 1);
    match rng.random_range(0..4) {
        0 => HamiltonianExpr::sum(vec![l, r]),
        1 => HamiltonianExpr::anticommutator(l, r),
        2 => HamiltonianExpr::i_commutator(l, r),
        _ => l.scaled(rng.random_range(-2.0..2.0)),
    }
}

fn criterion_8(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mut worst = 0usize;
    let mut sizes = Vec::new();
    for _ in 0..25 {
        let n = rng.random_range(1..=3usize);
        let factors = rng.random_range(1..=n);
        let dim = 1usize << factors;
        let mut triples: Vec<DescriptorTriple> = Vec::new();
        for k in 0..n {
            let id = format!("Q{k}");
            let t = if k < factors {
                DescriptorTriple::tensor_slot(&id, k, factors)
            } else {
                let src = triples[rng.random_range(0..k)].clone();
                random_rotation(&mut rng).apply(&src).with_label(&id)
            };
            triples.push(t);
        }
        let ids: Vec<String> = triples.iter().map(|t| t.label().to_string()).collect();
        let set = DescriptorSet::from_triples(dim, triples).unwrap();
        let mut hs = BTreeMap::new();
        for q in &ids {
            if rng.random_bool(0.8) {
                let depth = rng.random_range(0..=2);
                hs.insert(q.clone(), random_expr(&mut rng, &ids, depth));
            }
        }
        let before = descriptor_algebra(set.triples(), EVOLVED_RANK_TOL).unwrap().dimension();
        let Some(ev) = c.attempt(
            "random evolution",
            evolve(&set, &hs, 0.0, 1.0, &EvolveOptions { record: false, ..Default::default() }),
        ) else {
            continue;
        };
        let after = descriptor_algebra(ev.descriptors.triples(), EVOLVED_RANK_TOL).unwrap().dimension();
        worst = worst.max(before.abs_diff(after));
        sizes.push(before);
    }
    c.check(format!("algebra dimension unchanged over {} networks", sizes.len()), worst as f64, 0.0);
    c.flag("25 networks evolved", sizes.len() == 25);
}

fn criterion_9(c: &mut Criterion) {
    let set = DescriptorSet::from_triples(
        4,
        [DescriptorTriple::tensor_slot("A", 0, 2), DescriptorTriple::tensor_slot("B", 1, 2)],
    )
    .unwrap();
    let gate = swap_plus_wire(&set, "A", "B").unwrap();
    let (report, _) = validate_raw_unitary_gate(&set, &gate).unwrap();
    c.flag("rejected", !report.passed);
    c.flag("detected as algebra-reducing", report.algebra_reduced());
    c.flag("dimension 16 -> 4", report.algebra_before == Some(16) && report.algebra_after == Some(4));
}

fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> QNumber {
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let z = if i == j {
                C64::new(rng.random_range(-2.0..2.0), 0.0)
            } else {
                C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
            };
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    QNumber::new(exp_i_hermitian(&h, 1.0)).unwrap()
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn criterion_10(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let (mut conj_ok, mut corrupt_caught) = (0, 0);
    for k in 0..100 {
        let factors = k % 3 + 1;
        let dim = 1usize << factors;
        let base = DescriptorTriple::tensor_slot("q", rng.random_range(0..factors), factors);
        let u = random_unitary(&mut rng, dim);
        let good = base.conjugate_by(&u);
        if validate_pauli_triple(&good, 1e-9).is_ok_and(|r| r.passed) {
            conj_ok += 1;
        }
        let mut comps = good.components().clone();
        match rng.random_range(0..3) {
            0 => {
                let i = rng.random_range(0..3);
                comps[i] = comps[i].scale(-1.0);
            }
            1 => {
                let i = rng.random_range(0..3);
                comps.swap(i, (i + 1) % 3);
            }
            _ => {
                let i = rng.random_range(0..3);
                comps[(i + 1) % 3] = comps[i].clone();
            }
        }
        let bad = triple("q", comps[0].clone(), comps[1].clone(), comps[2].clone());
        if !validate_pauli_triple(&bad, 1e-9).is_ok_and(|r| r.passed) {
            corrupt_caught += 1;
        }
    }
    c.check("random conjugations pass (of 100)", (100 - conj_ok) as f64, 0.0);
    c.check("random corruptions fail (of 100)", (100 - corrupt_caught) as f64, 0.0);

    let reference = pauli("r");
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (theta, phi, psi) = (
            rng.random_range(-PI..PI),
            rng.random_range(-FRAC_PI_2 + 1e-3..FRAC_PI_2 - 1e-3),
            rng.random_range(-PI..PI),
        );
        let t = RotationParameters::from_angles(theta, phi, psi).apply(&reference);
        match rotation_parameters(&t, &reference, 1e-9) {
            Ok(p) => {
                worst = worst.max(angle_gap(p.theta, theta)).max(angle_gap(p.phi, phi)).max(angle_gap(p.psi, psi));
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    c.check("rotation parameters round-trip (100 random)", worst, 1e-9);

    let (e1, _, _) = model_errors(0.1);
    let (e2, _, _) = model_errors(0.05);
    c.check("halving the step cuts the error >= 8x (inverse ratio)", 8.0 * e2 / e1, 1.0);

    let counts = [
        (1, Regime::Orthodox, 3),
        (1, Regime::MaximallyNoncommuting, 3),
        (3, Regime::MaximallyNoncommuting, 9),
        (3, Regime::Orthodox, 63),
    ];
    c.flag(
        "parameter counts (1,3),(1,3),(3,9),(3,63)",
        counts.iter().all(|(n, r, e)| parameter_count(*n, *r).ok() == Some(*e)),
    );
}

fn main() -> ExitCode {
    type Entry = (u8, &'static str, fn(&mut Criterion));
    let criteria: [Entry; 10] = [
        (1, "model theory vs closed form", criterion_1),
        (2, "not gate", criterion_2),
        (3, "P-bar properties", criterion_3),
        (4, "cnot truth table and imprint", criterion_4),
        (5, "ccnot truth table", criterion_5),
        (6, "grandfather paradox", criterion_6),
        (7, "Hilbert-space creation", criterion_7),
        (8, "closure invariance", criterion_8),
        (9, "invalid-gate rejection", criterion_9),
        (10, "property suites", criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (id, title, f) in criteria {
        let mut c = Criterion::default();
        f(&mut c);
        let failed: Vec<&Sub> = c.subs.iter().filter(|s| !s.passed()).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {status} {title} ({}/{} sub-checks)", c.subs.len() - failed.len(), c.subs.len());
        for s in &c.subs {
            let known = KNOWN_RED.contains(&(id, s.name.as_str()));
            if !s.passed() {
                println!(
                    "    FAIL {} value={:.3e} tol={:.0e}{}",
                    s.name,
                    s.value,
                    s.tol,
                    if known { " (known)" } else { "" }
                );
                if !known {
                    unexpected.push(format!("{id}: {} failed", s.name));
                }
            } else if known {
                unexpected.push(format!("{id}: {} passed but is listed as known red", s.name));
            }
        }
        for (k, name) in KNOWN_RED {
            if *k == id && !c.subs.iter().any(|s| s.name == *name) {
                unexpected.push(format!("{id}: known-red check '{name}' was not evaluated"));
            }
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all results as recorded");
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("unexpected: {u}");
        }
        ExitCode::FAILURE
    }
}
