use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{consistency_residual, pair_residual, CtcError, CtcIdentification, ScenarioResult};
use crate::dynamics::Integrator;
use crate::network::{run_schedule, NetworkState, RunOptions};
use crate::qnum::{
    apply_matrix, expectation, induced_coefficients, nearest_rotation, validate_pauli_triple, DescriptorTriple,
    RotationParameters,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Weight of the young output in each update, in (0, 1].
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Angle of the random rotation applied when the update is degenerate or stalls.
    pub kick: f64,
    pub seed: u64,
    /// Restrict iterates to triples whose z-observable is sharp.
    pub sharp_z_only: bool,
    pub run: RunOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            damping: 0.5,
            tol: 1e-6,
            max_iter: 500,
            kick: 0.05,
            seed: 0,
            sharp_z_only: false,
            run: RunOptions::default(),
        }
    }
}

const DEGENERATE: f64 = 1e-3;
const STALL_WINDOW: usize = 20;

fn random_rotation(rng: &mut ChaCha8Rng, angle: f64) -> Matrix3<f64> {
    let axis = loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break v / n;
        }
    };
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(axis), angle).into_inner()
}

/// Replaces the z row by `±b` and re-orthonormalises the other rows.
fn sharpen(r: &Matrix3<f64>, b: &Vector3<f64>) -> Matrix3<f64> {
    let rz = Vector3::new(r[(2, 0)], r[(2, 1)], r[(2, 2)]);
    let z = if rz.dot(b) >= 0.0 { *b } else { -*b };
    let mut x = Vector3::new(r[(0, 0)], r[(0, 1)], r[(0, 2)]);
    x -= z * x.dot(&z);
    if x.norm() < 1e-9 {
        x = z.cross(&Vector3::new(1.0, 0.0, 0.0));
        if x.norm() < 1e-9 {
            x = z.cross(&Vector3::new(0.0, 1.0, 0.0));
        }
    }
    let x = x.normalize();
    let y = z.cross(&x);
    Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()])
}

/// Damped fixed-point iteration from the network's own initial triples.
pub fn fixed_point_solve(
    net: &NetworkState,
    ident: &CtcIdentification,
    t: f64,
    opts: &SolverOptions,
) -> Result<ScenarioResult, CtcError> {
    let start = ident.pairs.iter().map(|p| (p.old.clone(), net.qubits[p.old.as_str()].clone())).collect();
    fixed_point_solve_from(net, ident, t, start, opts)
}

/// Damped fixed-point iteration over the old qubits' initial triples.
///
/// Each iterate is expressed as a coefficient matrix against the network's
/// initial triple of that qubit; the update averages the current and the
/// young output's matrices and projects back to the nearest rotation. When
/// that projection is degenerate, or the residual stops improving, a small
/// seeded random rotation breaks the symmetry.
pub fn fixed_point_solve_from(
    net: &NetworkState,
    ident: &CtcIdentification,
    t: f64,
    start: BTreeMap<String, DescriptorTriple>,
    opts: &SolverOptions,
) -> Result<ScenarioResult, CtcError> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(CtcError::InvalidIdentification(format!("damping must be in (0, 1], got {}", opts.damping)));
    }
    let mut refs = BTreeMap::new();
    let mut bloch = BTreeMap::new();
    for p in &ident.pairs {
        let r = net
            .qubits
            .get(&p.old)
            .ok_or_else(|| CtcError::InvalidIdentification(format!("unknown qubit '{}'", p.old)))?;
        if !net.qubits.contains(&p.young) {
            return Err(CtcError::InvalidIdentification(format!("unknown qubit '{}'", p.young)));
        }
        if opts.sharp_z_only {
            let b = Vector3::new(
                expectation(r.x(), &net.state)?,
                expectation(r.y(), &net.state)?,
                expectation(r.z(), &net.state)?,
            );
            if (b.norm() - 1.0).abs() > 1e-9 {
                return Err(CtcError::NoSharpSubset(p.old.clone()));
            }
            bloch.insert(p.old.clone(), b / b.norm());
        }
        refs.insert(p.old.clone(), r.clone());
    }
    let mut guess = start;
    for p in &ident.pairs {
        if !guess.contains_key(&p.old) {
            guess.insert(p.old.clone(), refs[&p.old].clone());
        }
    }
    if opts.sharp_z_only {
        for (q, g) in guess.iter_mut() {
            let (c, _) = induced_coefficients(g, &refs[q])?;
            *g = apply_matrix(&sharpen(&nearest_rotation(&c).0, &bloch[q]), &refs[q]);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut result = ScenarioResult::new("fixed-point");
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut kicks = 0usize;
    let mut residual = f64::INFINITY;
    let run = RunOptions { t_end: Some(t), sample_dt: None, ..opts.run };
    for it in 1..=opts.max_iter {
        let trial = net.with_initial(guess.values().cloned())?;
        let out = run_schedule(&trial, &run)?;
        residual = pair_residual(&trial, ident, &out.final_descriptors);
        result.iterations = it;
        if residual <= opts.tol {
            result.solved = true;
            result.final_descriptors = out.final_descriptors.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            break;
        }
        if residual < best * (1.0 - 1e-3) {
            best = residual;
            since_best = 0;
        } else {
            since_best += 1;
        }
        let stalled = since_best >= STALL_WINDOW;
        if stalled {
            since_best = 0;
            best = residual;
        }
        for p in &ident.pairs {
            let reference = &refs[&p.old];
            let (cg, _) = induced_coefficients(&guess[&p.old], reference)?;
            let (cy, off) = induced_coefficients(&out.final_descriptors[p.young.as_str()], reference)?;
            if off > 1e-6 {
                return Err(CtcError::NotProjectable { qubit: p.young.clone(), residual: off });
            }
            let m = cg * (1.0 - opts.damping) + cy * opts.damping;
            let (mut r, smin) = nearest_rotation(&m);
            if smin < DEGENERATE || stalled {
                r = random_rotation(&mut rng, opts.kick) * r;
                kicks += 1;
            }
            if opts.sharp_z_only {
                r = sharpen(&r, &bloch[&p.old]);
            }
            guess.insert(p.old.clone(), apply_matrix(&r, reference));
        }
    }
    result.residual = residual;
    result.parameters.insert("damping".into(), opts.damping);
    result.parameters.insert("kicks".into(), kicks as f64);
    result.initial_descriptors = guess.clone();
    result.check("consistency residual", residual, opts.tol);
    if result.solved {
        for (q, g) in &guess {
            let rep = validate_pauli_triple(g, 1e-9)?;
            result.check(format!("{q}(0) satisfies the Pauli relations"), rep.max_residual(), 1e-9);
            if let Ok(p) = RotationParameters::from_matrix(&induced_coefficients(g, &refs[q])?.0, 1e-6) {
                result.parameters.insert(format!("{q}.theta"), p.theta);
                result.parameters.insert(format!("{q}.phi"), p.phi);
                result.parameters.insert(format!("{q}.psi"), p.psi);
            }
        }
        // independent re-simulation with the ODE path
        let trial = net.with_initial(guess.values().cloned())?;
        let mut rk = opts.run;
        rk.evolve.integrator = Integrator::Rk4;
        let again = consistency_residual(&trial, ident, t, &rk)?;
        result.check("residual on RK4 re-simulation", again, opts.tol.max(1e-6));
    }
    Ok(result)
}

#[derive(Clone, Debug, Serialize)]
pub struct MultistartReport {
    pub starts: usize,
    pub solved: usize,
    /// One representative per distinct fixed point.
    pub distinct: Vec<BTreeMap<String, DescriptorTriple>>,
    pub iterations: Vec<usize>,
}

/// Runs the solver from `starts` uniformly random rotations of the initial
/// triples in parallel and groups the fixed points found.
pub fn multistart_solve(
    net: &NetworkState,
    ident: &CtcIdentification,
    t: f64,
    opts: &SolverOptions,
    starts: usize,
) -> Result<MultistartReport, CtcError> {
    let results: Vec<Result<ScenarioResult, CtcError>> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let start = ident
                .pairs
                .iter()
                .map(|p| {
                    let r = RotationParameters::from_angles(
                        rng.random_range(0.0..std::f64::consts::TAU),
                        rng.random_range(0.0..std::f64::consts::TAU),
                        rng.random_range(0.0..std::f64::consts::TAU),
                    );
                    (p.old.clone(), r.apply(&net.qubits[p.old.as_str()]))
                })
                .collect();
            fixed_point_solve_from(
                net,
                ident,
                t,
                start,
                &SolverOptions { seed: opts.seed.wrapping_add(k as u64), ..*opts },
            )
        })
        .collect();
    let mut report = MultistartReport { starts, solved: 0, distinct: Vec::new(), iterations: Vec::new() };
    for r in results {
        let r = r?;
        report.iterations.push(r.iterations);
        if !r.solved {
            continue;
        }
        report.solved += 1;
        let known = report
            .distinct
            .iter()
            .any(|d| d.iter().all(|(q, t)| r.initial_descriptors.get(q).is_some_and(|u| u.max_abs_diff(t) < 1e-4)));
        if !known {
            report.distinct.push(r.initial_descriptors);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarRoot {
    pub root: f64,
    /// `|root − f(root)|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection for `x = f(x)` on `[lo, hi]` (either order).
pub fn scalar_self_consistency(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<ScalarRoot, CtcError> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let g = |x: f64| -> Result<f64, CtcError> {
        let v = x - f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CtcError::NotFinite(x))
        }
    };
    let mut g_lo = g(lo)?;
    let g_hi = g(hi)?;
    for (x, gx) in [(lo, g_lo), (hi, g_hi)] {
        if gx == 0.0 {
            return Ok(ScalarRoot { root: x, residual: 0.0, iterations: 0 });
        }
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(CtcError::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 || (gm.abs() <= tol && hi - lo <= tol) || iterations >= 200 || mid == lo || mid == hi {
            return Ok(ScalarRoot { root: mid, residual: gm.abs(), iterations });
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn scalar_examples() {
        let r = scalar_self_consistency(|p| FRAC_PI_2 * (1.0 + p.cos()), 0.0, PI, 1e-12).unwrap();
        assert!((r.root - FRAC_PI_2).abs() < 1e-9);
        let r = scalar_self_consistency(f64::sin, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.root.abs() < 1e-9);
        let a = scalar_self_consistency(f64::cos, 0.0, 1.0, 1e-12).unwrap();
        let b = scalar_self_consistency(f64::cos, 1.0, 0.0, 1e-12).unwrap();
        assert!((a.root - 0.739085).abs() < 1e-6);
        assert_eq!(a.root, b.root);
        assert!(matches!(scalar_self_consistency(|x| x + 1.0, 0.0, 1.0, 1e-9), Err(CtcError::NoSignChange { .. })));
    }

    #[test]
    fn sharpen_gives_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = random_rotation(&mut rng, 0.7);
        let b = Vector3::new(0.0, 0.6, 0.8);
        let s = sharpen(&r, &b);
        assert!((s.transpose() * s - Matrix3::identity()).amax() < 1e-12);
        assert!((s.determinant() - 1.0).abs() < 1e-12);
        assert!((Vector3::new(s[(2, 0)], s[(2, 1)], s[(2, 2)]).dot(&b).abs() - 1.0).abs() < 1e-12);
    }
}
