//! Time loops over scenarios and their CSV output.

use std::path::Path;

use anyhow::{bail, Result};
use korteweg_core::ek_solver::{self, entropy_cfl_max_dt, original, EntropyCflOptions, SolverConfig, StepReport};
use korteweg_core::hamiltonian::{self, dispersive_shock_metrics, HamiltonianState, HamiltonianStepper, ShockMetrics};
use korteweg_core::newton::NewtonOptions;
use korteweg_core::{ConservedState, Error};

use crate::config::SolverSection;
use crate::csv_out::{columns_to_rows, write_table_file, Cell};
use crate::diagnostics::DiagnosticsSeries;
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formulation {
    Extended,
    /// Centered third-derivative baseline in `(ρ, ρu)`; forward Euler only.
    Original,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepRule {
    /// The scenario's `dt`.
    Fixed,
    /// [`entropy_cfl_max_dt`] recomputed every step, times `factor`.
    EntropyCfl { factor: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub solver: SolverConfig,
    pub formulation: Formulation,
    pub step_rule: StepRule,
    pub diagnostics_every: usize,
}

impl RunOptions {
    pub fn new(solver: SolverConfig) -> Self {
        Self { solver, formulation: Formulation::Extended, step_rule: StepRule::Fixed, diagnostics_every: 1 }
    }

    pub fn from_section(section: &SolverSection, scenario: &Scenario) -> Result<Self> {
        let solver = section.solver_config(scenario.sources)?;
        let formulation = if section.formulation == "original" { Formulation::Original } else { Formulation::Extended };
        let step_rule =
            if section.dt_rule == "entropy_cfl" { StepRule::EntropyCfl { factor: 1.0 } } else { StepRule::Fixed };
        Ok(Self { solver, formulation, step_rule, diagnostics_every: section.diagnostics_every })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// States at the scenario's snapshot times.
    pub snapshots: Vec<ConservedState>,
    pub diagnostics: DiagnosticsSeries,
    pub steps: usize,
    pub final_state: ConservedState,
}

fn original_step(scenario: &Scenario, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<(ConservedState, StepReport)> {
    let before = original::energy(&scenario.model, state)?;
    let next = original::step_fe(&scenario.model, state, config, dt)?;
    let after = original::energy(&scenario.model, &next)?;
    let report = StepReport { dt_used: dt, entropy_before: before, entropy_after: after, newton_iters: 0, max_residual: 0.0 };
    Ok((next, report))
}

/// Integrates `scenario` to its end time, landing exactly on snapshot times.
/// `observer` sees every accepted step.
pub fn run(
    scenario: &Scenario,
    options: &RunOptions,
    mut observer: impl FnMut(&ConservedState, &StepReport),
) -> Result<RunOutput> {
    scenario.validate()?;
    let model = &scenario.model;
    let config = &options.solver;
    if options.formulation == Formulation::Original && config.temporal != ek_solver::Temporal::ForwardEuler {
        bail!("the original formulation is integrated with forward Euler only");
    }
    let entropy = |s: &ConservedState| -> Result<f64> {
        Ok(match options.formulation {
            Formulation::Extended => s.total_entropy(model)?,
            Formulation::Original => original::energy(model, s)?,
        })
    };
    let mut state = scenario.initial.clone();
    if options.formulation == Formulation::Original {
        state.srw.iter_mut().for_each(|x| *x = 0.0);
    }
    let mut diagnostics = DiagnosticsSeries::default();
    diagnostics.record_with_entropy(model, &state, entropy(&state)?)?;
    let mut snapshots = Vec::new();
    let mut targets = scenario.snapshot_times.iter().copied().peekable();
    while targets.peek() == Some(&0.0) {
        snapshots.push(state.clone());
        targets.next();
    }
    let end = scenario.end_time;
    let tiny = 1e-12 * end;
    let mut steps = 0;
    while state.time < end - tiny {
        let mut dt = match options.step_rule {
            StepRule::Fixed => scenario.dt,
            StepRule::EntropyCfl { factor } => {
                let cfl = entropy_cfl_max_dt(model, &state, config, &EntropyCflOptions::default())?;
                if !cfl.feasible {
                    return Err(Error::InvalidConfig("no entropy-stable time step: insufficient viscosity").into());
                }
                factor * cfl.dt.min(end)
            }
        };
        let next_stop = targets.peek().copied().unwrap_or(end).min(end);
        if state.time + dt > next_stop - tiny {
            dt = next_stop - state.time;
        }
        let (mut next, report) = match options.formulation {
            Formulation::Extended => ek_solver::step(model, &state, config, dt)?,
            Formulation::Original => original_step(scenario, &state, config, dt)?,
        };
        if (next.time - next_stop).abs() <= tiny {
            next.time = next_stop;
        }
        steps += 1;
        observer(&next, &report);
        state = next;
        let at_stop = state.time == next_stop;
        if at_stop && targets.peek() == Some(&next_stop) {
            snapshots.push(state.clone());
            targets.next();
        }
        if steps % options.diagnostics_every == 0 || at_stop {
            diagnostics.record_with_entropy(model, &state, report.entropy_after)?;
        }
    }
    Ok(RunOutput { snapshots, diagnostics, steps, final_state: state })
}

pub fn write_snapshot(path: &Path, state: &ConservedState) -> Result<()> {
    let n = state.n_cells();
    let x: Vec<f64> = (0..n).map(|j| state.cell_center(j)).collect();
    let u: Vec<f64> = state.mom.iter().zip(&state.rho).map(|(m, r)| m / r).collect();
    let w: Vec<f64> = state.srw.iter().zip(&state.rho).map(|(m, r)| m / r).collect();
    write_table_file(
        path,
        &["x", "rho", "mom", "srw", "u", "w"],
        &columns_to_rows(&[&x, &state.rho, &state.mom, &state.srw, &u, &w]),
    )
}

pub fn write_diagnostics(path: &Path, d: &DiagnosticsSeries) -> Result<()> {
    write_table_file(
        path,
        &["time", "total_entropy", "relative_entropy", "mass", "momentum", "consistency_error_max"],
        &columns_to_rows(&[&d.times, &d.total_entropy, &d.relative_entropy, &d.mass, &d.momentum, &d.consistency_error_max]),
    )
}

/// `snapshot_NNN.csv`, `snapshots.csv` (index, time, file) and `diagnostics.csv`.
pub fn write_run(out_dir: &Path, output: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let mut index = Vec::new();
    for (k, s) in output.snapshots.iter().enumerate() {
        let name = format!("snapshot_{k:03}.csv");
        write_snapshot(&out_dir.join(&name), s)?;
        index.push(vec![Cell::from(k), Cell::from(s.time), Cell::from(name.as_str())]);
    }
    write_table_file(&out_dir.join("snapshots.csv"), &["index", "time", "file"], &index)?;
    write_diagnostics(&out_dir.join("diagnostics.csv"), &output.diagnostics)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianRun {
    /// Time 0 first, then the snapshot times.
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<HamiltonianState>,
    pub times: Vec<f64>,
    /// Raw sum `H` after each step, starting with the initial value.
    pub h_values: Vec<f64>,
    pub momentum: Vec<f64>,
    pub metrics: Vec<ShockMetrics>,
}

/// Integrates the `(ρ, u)` Hamiltonian system from the scenario's initial height and velocity.
pub fn run_hamiltonian(
    scenario: &Scenario,
    stepper: HamiltonianStepper,
    newton: &NewtonOptions,
) -> Result<HamiltonianRun> {
    scenario.validate()?;
    let init = &scenario.initial;
    if init.boundary != ek_solver::Boundary::Periodic {
        bail!("the Hamiltonian scheme is periodic only");
    }
    let model = &scenario.model;
    let u0: Vec<f64> = init.mom.iter().zip(&init.rho).map(|(m, r)| m / r).collect();
    let mut state = HamiltonianState::new(init.rho.clone(), u0, init.dx())?;
    let h0 = hamiltonian::discrete_hamiltonian(model, &state)?;
    let mut run = HamiltonianRun {
        snapshot_times: vec![0.0],
        snapshots: vec![state.clone()],
        times: vec![0.0],
        h_values: vec![h0],
        momentum: vec![state.momentum()],
        metrics: Vec::new(),
    };
    let end = scenario.end_time;
    let tiny = 1e-12 * end;
    let mut t = 0.0;
    let mut targets = scenario.snapshot_times.iter().copied().filter(|t| *t > 0.0).peekable();
    while t < end - tiny {
        let stop = targets.peek().copied().unwrap_or(end);
        let dt = if t + scenario.dt > stop - tiny { stop - t } else { scenario.dt };
        let (next, report) = hamiltonian::step(model, &state, dt, stepper, newton, h0)?;
        state = next;
        t = if (t + dt - stop).abs() <= tiny { stop } else { t + dt };
        run.times.push(t);
        run.h_values.push(report.h_value);
        run.momentum.push(report.momentum_value);
        if t == stop && targets.peek() == Some(&stop) {
            run.snapshot_times.push(t);
            run.snapshots.push(state.clone());
            targets.next();
        }
    }
    let heights: Vec<Vec<f64>> = run.snapshots.iter().map(|s| s.rho.clone()).collect();
    run.metrics = dispersive_shock_metrics(&heights, state.dx)?;
    Ok(run)
}

/// `hamiltonian.csv` (time, H, δx·H, momentum), `shock_metrics.csv` and one
/// `snapshot_NNN.csv` (x, rho, u) per snapshot.
pub fn write_hamiltonian(out_dir: &Path, run: &HamiltonianRun) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let dx = run.snapshots[0].dx;
    let weighted: Vec<f64> = run.h_values.iter().map(|h| h * dx).collect();
    write_table_file(
        &out_dir.join("hamiltonian.csv"),
        &["time", "h", "h_weighted", "momentum"],
        &columns_to_rows(&[&run.times, &run.h_values, &weighted, &run.momentum]),
    )?;
    let rows: Vec<Vec<Cell>> = run
        .snapshot_times
        .iter()
        .zip(&run.metrics)
        .map(|(t, m)| vec![Cell::from(*t), Cell::from(m.zone_width), Cell::from(m.extrema)])
        .collect();
    write_table_file(&out_dir.join("shock_metrics.csv"), &["time", "zone_width", "extrema"], &rows)?;
    for (k, s) in run.snapshots.iter().enumerate() {
        let x: Vec<f64> = (0..s.len()).map(|j| (j as f64 + 0.5) * s.dx).collect();
        write_table_file(&out_dir.join(format!("snapshot_{k:03}.csv")), &["x", "rho", "u"], &columns_to_rows(&[&x, &s.rho, &s.u]))?;
    }
    Ok(())
}
