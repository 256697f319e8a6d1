//! `unorthodox` command-line front end: validate, run and inspect network
//! spec files, solve time-loop consistency, and run the built-in scenarios.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use unorthodox::algebra::{classify_pair, descriptor_algebra, hilbert_dimension, RANK_TOL};
use unorthodox::ctc::{
    builtin_spec, fixed_point_solve, multistart_solve, run_classical_grandfather_scenario, run_grandfather_scenario,
    run_hilbert_creation_scenario, run_model_theory_scenario, Direction, ScenarioResult, SolverOptions,
};
use unorthodox::gates::validate_gate;
use unorthodox::network::{report, run_schedule, write_csv, NetworkState, RunOptions};
use unorthodox::qnum::{expectation, EVOLVED_TOL};
use unorthodox::Axis;

#[derive(Parser)]
#[command(name = "unorthodox", version, about = "Heisenberg-picture simulator for networks of unorthodox qubits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a network and validate every gate at its slot.
    Validate { spec: PathBuf },
    /// Run the schedule and print a report at the end time.
    Run {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Drop snapshots before this time from the CSV.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// Stop here instead of at the end of the schedule.
        #[arg(long)]
        t1: Option<f64>,
        /// Write trajectories as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Extra snapshot spacing for the CSV.
        #[arg(long)]
        sample_dt: Option<f64>,
    },
    /// Span dimensions and pair classifications of the initial descriptors.
    Algebra { spec: PathBuf },
    /// Expectation of one descriptor component at time t.
    Expect {
        spec: PathBuf,
        #[arg(long)]
        qubit: String,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Solve the time-loop consistency condition by damped fixed-point iteration.
    CtcSolve {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0.5)]
        damping: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        /// Number of random starts; 0 runs a single solve from the spec's triples.
        #[arg(long, default_value_t = 0)]
        multistart: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sharp_z_only: bool,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Run a built-in scenario and print a pass/fail report.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Print the full result as JSON after the report.
        #[arg(long)]
        json: bool,
    },
    /// Print the spec file of a built-in scenario.
    Spec {
        #[arg(value_enum)]
        name: ScenarioName,
    },
    /// Run several spec files in parallel and print one report per file.
    Batch {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
    Z,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
            AxisArg::Z => Axis::Z,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    Grandfather,
    HilbertCreation,
    HilbertDestruction,
    ModelTheory,
    ClassicalGrandfather,
}

impl ScenarioName {
    fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Grandfather => "grandfather",
            ScenarioName::HilbertCreation => "hilbert-creation",
            ScenarioName::HilbertDestruction => "hilbert-destruction",
            ScenarioName::ModelTheory => "model-theory",
            ScenarioName::ClassicalGrandfather => "classical-grandfather",
        }
    }
}

fn load(path: &Path) -> Result<NetworkState> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    NetworkState::from_json(&text).with_context(|| format!("building {}", path.display()))
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn validate(path: &Path) -> Result<bool> {
    let net = load(path)?;
    let out = run_schedule(&net, &RunOptions::default())?;
    let mut reports = Vec::new();
    for slot in &net.schedule {
        let set = out.at(slot.slot as f64).context("missing slot snapshot")?;
        for g in &slot.gates {
            reports.push(json!({ "slot": slot.slot, "report": validate_gate(set, &net.state, g, &RunOptions::default().evolve)? }));
        }
    }
    let ok = reports.iter().all(|r| r["report"]["passed"] == true);
    print_json(&json!({ "network": net.name, "passed": ok, "gates": reports }))?;
    Ok(ok)
}

fn run_report(path: &Path, opts: &RunOptions) -> Result<serde_json::Value> {
    let net = load(path)?;
    let out = run_schedule(&net, opts)?;
    let rep = report(&out.final_descriptors, &net.state, out.end_time)?;
    Ok(json!({ "network": net.name, "report": rep }))
}

fn print_scenario(r: &ScenarioResult) {
    println!("scenario {}", r.name);
    for c in &r.checks {
        println!("  {} {:<58} value={:.3e} tol={:.0e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.tol);
    }
    for (k, v) in &r.parameters {
        println!("  parameter {k} = {v:.15}");
    }
    println!("  solved={} residual={:.3e} iterations={}", r.solved, r.residual, r.iterations);
    println!("{}", if r.passed() { "PASS" } else { "FAIL" });
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { spec } => validate(&spec),
        Command::Run { spec, step, t0, t1, csv, sample_dt } => {
            let opts = RunOptions { t_end: t1, sample_dt, ..RunOptions::with_step(step) };
            let net = load(&spec)?;
            let out = run_schedule(&net, &opts)?;
            if let Some(path) = csv {
                let snaps: Vec<_> = out.snapshots.iter().filter(|s| s.time >= t0 - 1e-12).cloned().collect();
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_csv(BufWriter::new(file), &snaps, &net.state)?;
            }
            print_json(
                &json!({ "network": net.name, "report": report(&out.final_descriptors, &net.state, out.end_time)? }),
            )?;
            Ok(true)
        }
        Command::Algebra { spec } => {
            let net = load(&spec)?;
            let alg = descriptor_algebra(net.qubits.triples(), RANK_TOL)?;
            let mut pairs = Vec::new();
            let triples: Vec<_> = net.qubits.iter().collect();
            for (i, (a, ta)) in triples.iter().enumerate() {
                for (b, tb) in &triples[i + 1..] {
                    pairs.push(json!({ "a": a, "b": b, "classification": classify_pair(ta, tb, EVOLVED_TOL) }));
                }
            }
            let per_qubit: Vec<_> = net
                .qubits
                .iter()
                .map(|(id, t)| -> Result<_> {
                    let a = descriptor_algebra([t], RANK_TOL)?;
                    Ok(json!({ "qubit": id, "dimension": a.dimension(), "hilbert_dimension": hilbert_dimension(&a)? }))
                })
                .collect::<Result<_>>()?;
            print_json(&json!({
                "network": net.name,
                "carrier_dimension": net.hilbert_dim(),
                "algebra_dimension": alg.dimension(),
                "hermitian_real_dimension": alg.hermitian_real_dimension(RANK_TOL),
                "hilbert_dimension": hilbert_dimension(&alg)?,
                "qubits": per_qubit,
                "pairs": pairs,
            }))?;
            Ok(true)
        }
        Command::Expect { spec, qubit, axis, t, step } => {
            let net = load(&spec)?;
            if !net.qubits.contains(&qubit) {
                bail!("unknown qubit '{qubit}'");
            }
            let opts = RunOptions { t_end: Some(t), ..RunOptions::with_step(step) };
            let out = run_schedule(&net, &opts)?;
            let value = expectation(out.final_descriptors[qubit.as_str()].get(axis.into()), &net.state)?;
            print_json(
                &json!({ "qubit": qubit, "axis": Axis::from(axis).as_str(), "t": out.end_time, "expectation": value }),
            )?;
            Ok(true)
        }
        Command::CtcSolve { spec, tol, damping, max_iter, multistart, seed, sharp_z_only, step } => {
            let net = load(&spec)?;
            let (ident, t) = net.ctc.clone().context("spec has no ctc section")?;
            let opts = SolverOptions {
                damping,
                tol,
                max_iter,
                seed,
                sharp_z_only,
                run: RunOptions::with_step(step),
                ..Default::default()
            };
            if multistart > 0 {
                let rep = multistart_solve(&net, &ident, t, &opts, multistart)?;
                let ok = rep.solved > 0;
                print_json(&rep)?;
                Ok(ok)
            } else {
                let r = fixed_point_solve(&net, &ident, t, &opts)?;
                print_scenario(&r);
                Ok(r.solved && r.passed())
            }
        }
        Command::Scenario { name, step, json } => {
            let r = match name {
                ScenarioName::Grandfather => run_grandfather_scenario(step, 1e-6)?,
                ScenarioName::HilbertCreation => run_hilbert_creation_scenario(Direction::Forward, 1e-9)?,
                ScenarioName::HilbertDestruction => run_hilbert_creation_scenario(Direction::Reverse, 1e-9)?,
                ScenarioName::ModelTheory => run_model_theory_scenario(step, 1e-6)?,
                ScenarioName::ClassicalGrandfather => run_classical_grandfather_scenario()?,
            };
            print_scenario(&r);
            if json {
                print_json(&r)?;
            }
            Ok(r.passed())
        }
        Command::Spec { name } => {
            print!("{}", builtin_spec(name.as_str()).expect("every scenario has a spec"));
            Ok(true)
        }
        Command::Batch { specs, step } => {
            let opts = RunOptions::with_step(step);
            let results: Vec<_> = specs
                .par_iter()
                .map(|p| match run_report(p, &opts) {
                    Ok(v) => (true, v),
                    Err(e) => (false, json!({ "spec": p.display().to_string(), "error": format!("{e:#}") })),
                })
                .collect();
            let ok = results.iter().all(|(ok, _)| *ok);
            print_json(&results.into_iter().map(|(_, v)| v).collect::<Vec<_>>())?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
