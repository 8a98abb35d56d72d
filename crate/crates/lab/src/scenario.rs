//! Initial/boundary data of the two reference experiments.

use anyhow::{ensure, Result};
use korteweg_core::ek_solver::{enforce_w_relation, Boundary, LiuGollubSources, Sources};
use korteweg_core::{ConservedState, FluidModel};

use crate::nondim::NondimensionalSet;

/// Water-glycerol style fluid of the bump test, SI units.
pub mod ktest {
    pub const GRAVITY: f64 = 9.8;
    pub const DENSITY: f64 = 1134.0;
    pub const SURFACE_TENSION: f64 = 0.067;
    pub const LENGTH: f64 = 0.8;
    pub const DEPTH: f64 = 1e-3;
    pub const DEFAULT_DX: f64 = 2.5e-4;
    pub const DT_FACTOR: f64 = 120.0;
    pub const END_TIME: f64 = 1.0;

    /// `κ = σ/ρ`, m³/s².
    pub fn kappa() -> f64 {
        SURFACE_TENSION / DENSITY
    }

    /// `h_N (1 + 0.3 exp(−2000 (x − 0.4)²))`
    pub fn height(x: f64) -> f64 {
        DEPTH * (1.0 + 0.3 * (-2000.0 * (x - 0.4) * (x - 0.4)).exp())
    }
}

/// Time-step rule of a scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtRule {
    Fixed(f64),
    /// `δt = factor · δx²`
    Parabolic(f64),
}

impl DtRule {
    pub fn dt(&self, dx: f64) -> f64 {
        match *self {
            DtRule::Fixed(dt) => dt,
            DtRule::Parabolic(k) => k * dx * dx,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: FluidModel,
    /// Initial state; carries the domain and the boundary condition.
    pub initial: ConservedState,
    pub sources: Sources,
    pub dt: f64,
    pub end_time: f64,
    pub snapshot_times: Vec<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.end_time > 0.0 && self.end_time.is_finite(), "end time must be positive");
        ensure!(self.dt > 0.0 && self.dt.is_finite(), "time step must be positive");
        ensure!(
            self.snapshot_times.iter().all(|t| (0.0..=self.end_time).contains(t)),
            "snapshot times must lie in [0, end_time]"
        );
        ensure!(self.snapshot_times.windows(2).all(|w| w[0] < w[1]), "snapshot times must increase");
        self.initial.check_positive()?;
        Ok(())
    }

    pub fn with_end_time(mut self, end_time: f64, snapshots: usize) -> Self {
        self.end_time = end_time;
        self.snapshot_times = (1..=snapshots).map(|k| end_time * k as f64 / snapshots as f64).collect();
        self
    }
}

fn cells_for(length: f64, dx: f64) -> Result<usize> {
    ensure!(dx > 0.0 && dx.is_finite(), "dx must be positive");
    let n = (length / dx).round();
    ensure!(n >= 3.0, "dx too large for the domain");
    Ok(n as usize)
}

/// Periodic bump on an 80 cm channel, at rest, with `w` consistent with `h`.
pub fn ktest_scenario(dx: f64, rule: DtRule) -> Result<Scenario> {
    let n = cells_for(ktest::LENGTH, dx)?;
    let dx = ktest::LENGTH / n as f64;
    let model = FluidModel::shallow_water(ktest::GRAVITY, ktest::kappa());
    let rho: Vec<f64> = (0..n).map(|j| ktest::height((j as f64 + 0.5) * dx)).collect();
    let state = ConservedState::new(0.0, ktest::LENGTH, rho, vec![0.0; n], vec![0.0; n], Boundary::Periodic)?;
    let initial = enforce_w_relation(&model, &state)?;
    let scenario = Scenario {
        name: "ktest".into(),
        model,
        initial,
        sources: Sources::None,
        dt: rule.dt(dx),
        end_time: ktest::END_TIME,
        snapshot_times: vec![0.25, 0.5, 0.75, 1.0],
    };
    scenario.validate()?;
    Ok(scenario)
}

pub mod liu_gollub {
    pub const INLET_FREQ: f64 = 1.5;
    pub const INLET_AMP: f64 = 0.03;
    /// 2 m at λ = 1 cm.
    pub const LENGTH: f64 = 200.0;
    pub const END_TIME: f64 = 2000.0;
    pub const DEFAULT_DX: f64 = 0.05;
}

/// Uniform film `h = u = 1` with a forced inlet, in units of `λ` and `T_N`.
pub fn liu_gollub_scenario(nondim: &NondimensionalSet, inlet_freq: f64, length: f64, dx: f64) -> Result<Scenario> {
    let n = cells_for(length, dx)?;
    let sources = LiuGollubSources {
        epsilon: nondim.epsilon,
        reynolds: nondim.reynolds,
        weber: nondim.weber,
        froude_sq: nondim.froude_sq,
        inlet_freq,
        inlet_amp: liu_gollub::INLET_AMP,
        time_scale: nondim.t_n,
    };
    sources.validate()?;
    let state = ConservedState::new(
        0.0,
        length,
        vec![1.0; n],
        vec![1.0; n],
        vec![0.0; n],
        Boundary::InletOutlet(sources.forcing()),
    )?;
    let model = sources.model();
    // capillary limit of the explicit schemes, with margin
    let dx = length / n as f64;
    let mu = model.mu(1.2)?;
    let dt = 0.2 * dx * dx / (mu + sources.viscosity());
    let end = liu_gollub::END_TIME;
    let scenario = Scenario {
        name: "liu_gollub".into(),
        model,
        initial: state,
        sources: Sources::LiuGollub(sources),
        dt,
        end_time: end,
        snapshot_times: (1..=10).map(|k| end * k as f64 / 10.0).collect(),
    };
    scenario.validate()?;
    Ok(scenario)
}
