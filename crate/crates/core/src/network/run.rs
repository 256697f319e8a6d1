use std::collections::BTreeMap;

use super::{NetworkError, NetworkState};
use crate::dynamics::{evolve, EvolveOptions, HamiltonianExpr, Method};
use crate::gates::check_preconditions;
use crate::qnum::{DescriptorSet, EVOLVED_TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub evolve: EvolveOptions,
    /// Extra snapshots every `sample_dt` (taken at the nearest integrator step).
    pub sample_dt: Option<f64>,
    /// Stop here instead of at the end of the schedule.
    pub t_end: Option<f64>,
    /// Re-check conditional-gate preconditions before every slot.
    pub check_preconditions: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { evolve: EvolveOptions::default(), sample_dt: None, t_end: None, check_preconditions: true }
    }
}

impl RunOptions {
    pub fn with_step(step: f64) -> Self {
        RunOptions { evolve: EvolveOptions::with_step(step), ..Default::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub descriptors: DescriptorSet,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub final_descriptors: DescriptorSet,
    pub end_time: f64,
    /// Sorted by time; always includes every integer time up to `end_time`.
    pub snapshots: Vec<Snapshot>,
    /// Integration method used for each evolved segment, keyed by slot.
    pub methods: Vec<(i64, Method)>,
}

impl RunOutput {
    /// Snapshot at `t` (within 1e-9).
    pub fn at(&self, t: f64) -> Option<&DescriptorSet> {
        self.snapshots.iter().find(|s| (s.time - t).abs() <= 1e-9).map(|s| &s.descriptors)
    }
}

struct Recorder {
    snaps: Vec<Snapshot>,
    sample_dt: Option<f64>,
}

impl Recorder {
    fn push(&mut self, time: f64, descriptors: &DescriptorSet) {
        if let Some(last) = self.snaps.last() {
            if (last.time - time).abs() <= 1e-9 {
                return;
            }
        }
        self.snaps.push(Snapshot { time, descriptors: descriptors.clone() });
    }

    /// Integer times and sample-grid times in `(a, b)`, all with constant descriptors.
    fn idle(&mut self, a: f64, b: f64, descriptors: &DescriptorSet) {
        for t in self.grid(a, b) {
            self.push(t, descriptors);
        }
    }

    fn grid(&self, a: f64, b: f64) -> Vec<f64> {
        let mut ts: Vec<f64> = ((a.floor() as i64)..=(b.ceil() as i64)).map(|k| k as f64).collect();
        if let Some(dt) = self.sample_dt {
            let k0 = (a / dt).floor() as i64;
            let k1 = (b / dt).ceil() as i64;
            ts.extend((k0..=k1).map(|k| k as f64 * dt));
        }
        ts.retain(|t| *t > a + 1e-9 && *t < b - 1e-9);
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|x, y| (*x - *y).abs() <= 1e-9);
        ts
    }
}

/// Runs the schedule from `t = 0`.
///
/// Slot `k` starts at time `k` and lasts `max(1, longest gate)`; a gate
/// shorter than its slot is switched off once its duration has elapsed.
/// Gates in one slot have disjoint participants, so their Hamiltonians are
/// merged into one evolution.
pub fn run_schedule(net: &NetworkState, opts: &RunOptions) -> Result<RunOutput, NetworkError> {
    let end = opts.t_end.unwrap_or_else(|| net.schedule_end().max(net.ctc.as_ref().map_or(0.0, |(_, t)| *t)));
    if end < 0.0 || !end.is_finite() {
        return Err(NetworkError::Schedule { slot: -1, reason: format!("invalid end time {end}") });
    }
    let mut rec = Recorder { snaps: Vec::new(), sample_dt: opts.sample_dt.filter(|dt| *dt > 0.0) };
    let mut cur = net.qubits.clone();
    let mut now = 0.0;
    let mut methods = Vec::new();
    rec.push(0.0, &cur);

    for slot in &net.schedule {
        let start = slot.slot as f64;
        if start >= end {
            break;
        }
        rec.idle(now, start, &cur);
        now = start;
        if opts.check_preconditions {
            for g in &slot.gates {
                check_preconditions(g, &cur, &net.state, EVOLVED_TOL)
                    .map_err(|source| NetworkError::Gate { slot: slot.slot, source })?;
            }
        }
        let mut breaks: Vec<f64> = slot.gates.iter().map(|g| g.duration).collect();
        breaks.push(slot.length());
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut seg_start = 0.0;
        for b in breaks {
            let (t0, t1) = (start + seg_start, (start + b).min(end));
            if t1 <= t0 {
                break;
            }
            let mut hs: BTreeMap<String, HamiltonianExpr> = BTreeMap::new();
            for g in slot.gates.iter().filter(|g| g.duration > seg_start) {
                hs.extend(g.hamiltonians.iter().map(|(k, v)| (k.clone(), v.clone())));
            }
            let grid = rec.grid(t0, t1);
            let ev = evolve(&cur, &hs, t0, t1, &EvolveOptions { record: !grid.is_empty(), ..opts.evolve })
                .map_err(|source| NetworkError::Dynamics { slot: slot.slot, source })?;
            if ev.method != Method::Static {
                methods.push((slot.slot, ev.method));
            }
            if !grid.is_empty() {
                let times = ev.sample_times();
                for t in grid {
                    let k = nearest(&times, t);
                    rec.push(t, &ev.descriptors_at(k));
                }
            }
            cur = ev.descriptors;
            rec.push(t1, &cur);
            now = t1;
            seg_start = b;
        }
    }
    rec.idle(now, end, &cur);
    rec.push(end, &cur);
    Ok(RunOutput { final_descriptors: cur, end_time: end, snapshots: rec.snaps, methods })
}

fn nearest(times: &[f64], t: f64) -> usize {
    let k = times.partition_point(|x| *x < t);
    if k == 0 {
        0
    } else if k == times.len() || (t - times[k - 1]) <= (times[k] - t) {
        k - 1
    } else {
        k
    }
}
