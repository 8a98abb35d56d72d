//! Time integration of the extended system
//!
//! ```text
//! ∂t ρ    + ∂x(ρu)        = 0
//! ∂t(ρu) + ∂x(ρu² + P)   = ∂x(μ ∂x w)
//! ∂t(ρw) + ∂x(ρuw)       = −∂x(μ ∂x u)
//! ```
//!
//! with `μ(ρ) = ρ^{3/2} √κ(ρ)`. The convective part uses a [`FluxSpec`] flux;
//! the capillary part is the skew-symmetric centered operator in `(u, w)`.

mod cfl;
pub mod original;
mod state;

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;

use crate::flux::{flux_value, interface_flux, muscl_reconstruct, FluxSpec, Limiter};
use crate::linalg::{add, scale, Vec3};
use crate::model::{Conserved, FluidModel};
use crate::newton::{self, NewtonOptions};
use crate::{Error, Result};

pub use cfl::{entropy_cfl_max_dt, pair_terms, EntropyCfl, EntropyCflOptions, PairTerms};
pub use state::{apply_boundary, Boundary, ConservedState, InletForcing, GHOSTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Temporal {
    ForwardEuler,
    BackwardEuler,
    /// Heun's method; requires MUSCL reconstruction.
    Rk2,
}

impl Temporal {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fe" => Some(Self::ForwardEuler),
            "be" => Some(Self::BackwardEuler),
            "rk2" => Some(Self::Rk2),
            _ => None,
        }
    }
}

/// Source terms and inlet data of the falling-film model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiuGollubSources {
    pub epsilon: f64,
    pub reynolds: f64,
    pub weber: f64,
    pub froude_sq: f64,
    pub inlet_freq: f64,
    pub inlet_amp: f64,
    /// Reference time used by the inlet forcing.
    pub time_scale: f64,
}

impl LiuGollubSources {
    pub fn validate(&self) -> Result<()> {
        let all = [self.epsilon, self.reynolds, self.weber, self.froude_sq, self.inlet_freq, self.inlet_amp, self.time_scale];
        if all.iter().all(|x| *x > 0.0 && x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidConfig("falling-film parameters must be positive"))
        }
    }

    /// Thin-film pressure law with `κ = ε/We`.
    pub fn model(&self) -> FluidModel {
        FluidModel::liu_gollub(self.froude_sq, self.epsilon / self.weber)
    }

    pub fn forcing(&self) -> InletForcing {
        InletForcing { freq: self.inlet_freq, amp: self.inlet_amp, time_scale: self.time_scale }
    }

    /// `2/(9εRe) · (h − u/h)`.
    pub fn friction(&self, v: &Conserved) -> f64 {
        let (h, u) = (v[0], v[1] / v[0]);
        2.0 / (9.0 * self.epsilon * self.reynolds) * (h - u / h)
    }

    /// Coefficient `6ε/Re` of the heuristic viscous term.
    pub fn viscosity(&self) -> f64 {
        6.0 * self.epsilon / self.reynolds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Sources {
    #[default]
    None,
    LiuGollub(LiuGollubSources),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub flux: FluxSpec,
    pub temporal: Temporal,
    /// MUSCL reconstruction of the convective flux, with its limiter.
    pub muscl: Option<Limiter>,
    pub newton: NewtonOptions,
    /// Rebuild `ρw` from `ρ` after every step.
    pub enforce_w_relation: bool,
    pub sources: Sources,
}

impl SolverConfig {
    pub fn new(flux: FluxSpec, temporal: Temporal) -> Self {
        Self {
            flux,
            temporal,
            muscl: None,
            newton: NewtonOptions { tol: 1e-10, max_iter: 30, fd_step: 1e-7 },
            enforce_w_relation: false,
            sources: Sources::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.flux.validate()?;
        if !(self.newton.tol > 0.0) || self.newton.max_iter == 0 {
            return Err(Error::InvalidConfig("newton tolerance and iteration cap must be positive"));
        }
        if self.temporal == Temporal::Rk2 && self.muscl.is_none() {
            return Err(Error::InvalidConfig("rk2 requires MUSCL reconstruction"));
        }
        if let Sources::LiuGollub(s) = &self.sources {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    pub entropy_before: f64,
    pub entropy_after: f64,
    pub newton_iters: usize,
    /// Final scaled Newton residual (0 for explicit steps).
    pub max_residual: f64,
}

fn check_cells(cells: &[Conserved], offset: usize) -> Result<()> {
    for (j, v) in cells.iter().enumerate() {
        if !(v[0] > 0.0) || !v.iter().all(|x| x.is_finite()) {
            return Err(Error::Positivity { cell: j.saturating_sub(offset), value: v[0] });
        }
    }
    Ok(())
}

/// `μ` at the mean density of two cells.
pub fn interface_mu(model: &FluidModel, a: &Conserved, b: &Conserved) -> Result<f64> {
    model.mu(0.5 * (a[0] + b[0]))
}

/// Capillary interface flux `(0, μ(w_r − w_l), −μ(u_r − u_l))/δx`.
fn capillary_interface(model: &FluidModel, a: &Conserved, b: &Conserved, dx: f64) -> Result<Vec3> {
    let mu = interface_mu(model, a, b)?;
    let (ua, ub) = (a[1] / a[0], b[1] / b[0]);
    let (wa, wb) = (a[2] / a[0], b[2] / b[0]);
    Ok([0.0, mu * (wb - wa) / dx, -mu * (ub - ua) / dx])
}

/// `(K_{j+1/2} − K_{j−1/2})/δx` on the extended array `e` (cell `j` at `j + 2`).
fn capillary_rhs_extended(model: &FluidModel, e: &[Conserved], dx: f64) -> Result<Vec<Vec3>> {
    let n = e.len() - 2 * GHOSTS;
    let mut k = Vec::with_capacity(n + 1);
    for i in 0..=n {
        k.push(capillary_interface(model, &e[i + 1], &e[i + 2], dx)?);
    }
    Ok((0..n).map(|j| scale(1.0 / dx, &crate::linalg::sub(&k[j + 1], &k[j]))).collect())
}

/// Capillary part of the semi-discrete right-hand side.
pub fn capillary_rhs(model: &FluidModel, state: &ConservedState) -> Result<Vec<Vec3>> {
    state.check_positive()?;
    capillary_rhs_extended(model, &state.extended(state.time), state.dx())
}

/// Convective interface fluxes `f_{i−1/2}` for `i = 0..=N`.
fn convective_fluxes(
    model: &FluidModel,
    e: &[Conserved],
    config: &SolverConfig,
    lambda1: f64,
) -> Result<Vec<Vec3>> {
    let n = e.len() - 2 * GHOSTS;
    let mut f = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (l, r) = match config.muscl {
            Some(limiter) => {
                let rec = muscl_reconstruct(&[e[i], e[i + 1], e[i + 2], e[i + 3]], limiter);
                (rec.left, rec.right)
            }
            None => (e[i + 1], e[i + 2]),
        };
        f.push(flux_value(model, &config.flux, &l, &r, lambda1)?);
    }
    Ok(f)
}

/// `−(f_{j+1/2} − f_{j−1/2})/δx + (K_{j+1/2} − K_{j−1/2})/δx + S_j`.
///
/// `dt` enters through the Lax–Friedrichs viscosity only.
pub fn semi_discrete_rhs(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<Vec<Vec3>> {
    let e = state.extended(state.time);
    check_cells(&e, GHOSTS)?;
    rhs_extended(model, &e, state.dx(), config, dt / state.dx())
}

fn rhs_extended(model: &FluidModel, e: &[Conserved], dx: f64, config: &SolverConfig, lambda1: f64) -> Result<Vec<Vec3>> {
    let n = e.len() - 2 * GHOSTS;
    let f = convective_fluxes(model, e, config, lambda1)?;
    let mut rhs = capillary_rhs_extended(model, e, dx)?;
    for j in 0..n {
        for c in 0..3 {
            rhs[j][c] -= (f[j + 1][c] - f[j][c]) / dx;
        }
    }
    if let Sources::LiuGollub(s) = &config.sources {
        let nu = s.viscosity();
        for j in 0..n {
            let (qm, q, qp) = (e[j + 1][1], e[j + 2][1], e[j + 3][1]);
            rhs[j][1] += s.friction(&e[j + 2]) + nu * (qp - 2.0 * q + qm) / (dx * dx);
        }
    }
    Ok(rhs)
}

/// Numerical entropy flux `𝓖₀ − μ(u_j w_{j+1} − u_{j+1} w_j)/δx` at every
/// interface `j − 1/2`, `j = 0..=N`, first-order fluxes only.
pub fn entropy_fluxes(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<Vec<f64>> {
    let e = state.extended(state.time);
    check_cells(&e, GHOSTS)?;
    let (n, dx) = (state.n_cells(), state.dx());
    (0..=n)
        .map(|i| {
            let (a, b) = (&e[i + 1], &e[i + 2]);
            let f = interface_flux(model, &config.flux, a, b, dt / dx, false)?;
            let mu = interface_mu(model, a, b)?;
            let cap = mu * (a[1] / a[0] * b[2] / b[0] - b[1] / b[0] * a[2] / a[0]) / dx;
            Ok(f.entropy_flux - cap)
        })
        .collect()
}

fn finish(
    model: &FluidModel,
    before: &ConservedState,
    cells: &[Conserved],
    config: &SolverConfig,
    dt: f64,
    newton_iters: usize,
    max_residual: f64,
) -> Result<(ConservedState, StepReport)> {
    check_cells(cells, 0)?;
    let mut next = before.with_cells(cells);
    next.time = before.time + dt;
    if config.enforce_w_relation {
        next = enforce_w_relation(model, &next)?;
    }
    let report = StepReport {
        dt_used: dt,
        entropy_before: before.total_entropy(model)?,
        entropy_after: next.total_entropy(model)?,
        newton_iters,
        max_residual,
    };
    Ok((next, report))
}

/// `v^{n+1} = v^n + δt · rhs(v^n)`.
pub fn step_fe(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<(ConservedState, StepReport)> {
    let rhs = semi_discrete_rhs(model, state, config, dt)?;
    let cells: Vec<Conserved> = (0..state.n_cells()).map(|j| add(&state.cell(j), &scale(dt, &rhs[j]))).collect();
    finish(model, state, &cells, config, dt, 0, 0.0)
}

/// Heun's method: `v¹ = v + δt L(v)`, `v^{n+1} = (v + v¹ + δt L(v¹))/2`.
pub fn step_rk2(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<(ConservedState, StepReport)> {
    if config.muscl.is_none() {
        return Err(Error::InvalidConfig("rk2 requires MUSCL reconstruction"));
    }
    let n = state.n_cells();
    let k1 = semi_discrete_rhs(model, state, config, dt)?;
    let mut stage = state.with_cells(&(0..n).map(|j| add(&state.cell(j), &scale(dt, &k1[j]))).collect::<Vec<_>>());
    stage.time = state.time + dt;
    check_cells(&stage.cells(), 0)?;
    let k2 = semi_discrete_rhs(model, &stage, config, dt)?;
    let cells: Vec<Conserved> = (0..n)
        .map(|j| {
            let mut v = [0.0; 3];
            for c in 0..3 {
                v[c] = 0.5 * (state.cell(j)[c] + stage.cell(j)[c] + dt * k2[j][c]);
            }
            v
        })
        .collect();
    finish(model, state, &cells, config, dt, 0, 0.0)
}

/// Classical fourth-order Runge–Kutta step, used as a reference integrator.
pub fn step_rk4(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<(ConservedState, StepReport)> {
    let n = state.n_cells();
    let shifted = |k: &[Vec3], h: f64, t: f64| -> Result<ConservedState> {
        let mut s = state.with_cells(&(0..n).map(|j| add(&state.cell(j), &scale(h, &k[j]))).collect::<Vec<_>>());
        s.time = t;
        check_cells(&s.cells(), 0)?;
        Ok(s)
    };
    let k1 = semi_discrete_rhs(model, state, config, dt)?;
    let k2 = semi_discrete_rhs(model, &shifted(&k1, dt / 2.0, state.time + dt / 2.0)?, config, dt)?;
    let k3 = semi_discrete_rhs(model, &shifted(&k2, dt / 2.0, state.time + dt / 2.0)?, config, dt)?;
    let k4 = semi_discrete_rhs(model, &shifted(&k3, dt, state.time + dt)?, config, dt)?;
    let cells: Vec<Conserved> = (0..n)
        .map(|j| {
            let mut v = state.cell(j);
            for c in 0..3 {
                v[c] += dt / 6.0 * (k1[j][c] + 2.0 * k2[j][c] + 2.0 * k3[j][c] + k4[j][c]);
            }
            v
        })
        .collect();
    finish(model, state, &cells, config, dt, 0, 0.0)
}

/// Solves `v^{n+1} = v^n + δt · rhs(v^{n+1})` by Newton's method. The residual
/// is measured in the max norm relative to `‖v^n‖∞`.
pub fn step_be(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<(ConservedState, StepReport)> {
    let n = state.n_cells();
    let old = state.to_flat();
    let scale_norm = old.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut next_time = state.clone();
    next_time.time = state.time + dt;
    let radius = if config.muscl.is_some() { 2 } else { 1 };
    let stencil = newton::Stencil {
        cells: n,
        vars_per_cell: 3,
        radius,
        periodic: matches!(state.boundary, Boundary::Periodic),
    };
    // Explicit predictor when it keeps the density positive.
    let mut x = match semi_discrete_rhs(model, state, config, dt) {
        Ok(rhs) => {
            let guess: Vec<f64> = (0..n).flat_map(|j| add(&state.cell(j), &scale(dt, &rhs[j]))).collect();
            if (0..n).all(|j| guess[3 * j] > 0.0) {
                guess
            } else {
                old.clone()
            }
        }
        Err(_) => old.clone(),
    };
    let report = newton::solve(&mut x, stencil, scale_norm, &config.newton, |x, out| {
        let trial = next_time.with_flat(x);
        let rhs = semi_discrete_rhs(model, &trial, config, dt)?;
        for j in 0..n {
            for c in 0..3 {
                out[3 * j + c] = x[3 * j + c] - old[3 * j + c] - dt * rhs[j][c];
            }
        }
        Ok(())
    })?;
    let cells: Vec<Conserved> = (0..n).map(|j| [x[3 * j], x[3 * j + 1], x[3 * j + 2]]).collect();
    finish(model, state, &cells, config, dt, report.iterations, report.residual)
}

/// Dispatches on `config.temporal`.
pub fn step(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<(ConservedState, StepReport)> {
    match config.temporal {
        Temporal::ForwardEuler => step_fe(model, state, config, dt),
        Temporal::BackwardEuler => step_be(model, state, config, dt),
        Temporal::Rk2 => step_rk2(model, state, config, dt),
    }
}

/// Forward Euler with `δt` from [`entropy_cfl_max_dt`], halved until the total
/// entropy does not increase (at most `max_halvings` times).
pub fn step_fe_entropy_stable(
    model: &FluidModel,
    state: &ConservedState,
    config: &SolverConfig,
    options: &EntropyCflOptions,
    max_halvings: usize,
) -> Result<(ConservedState, StepReport)> {
    let cfl = entropy_cfl_max_dt(model, state, config, options)?;
    if !cfl.feasible || !(cfl.dt > 0.0) {
        return Err(Error::InvalidConfig("no entropy-stable time step: insufficient viscosity"));
    }
    let mut dt = cfl.dt;
    for _ in 0..=max_halvings {
        let (next, report) = step_fe(model, state, config, dt)?;
        if report.entropy_after <= report.entropy_before * (1.0 + 1e-14) {
            return Ok((next, report));
        }
        dt *= 0.5;
    }
    Err(Error::InvalidConfig("entropy increased after all step halvings"))
}

/// Overwrites `ρw` with `√ρ √κ(ρ) ∂xρ`, centered. For constant `κ` this is
/// `(2/3)√κ (ρ_{j+1}^{3/2} − ρ_{j−1}^{3/2})/(2δx)`.
pub fn enforce_w_relation(model: &FluidModel, state: &ConservedState) -> Result<ConservedState> {
    state.check_positive()?;
    let e = state.extended(state.time);
    let dx = state.dx();
    let mut out = state.clone();
    for j in 0..state.n_cells() {
        let (rm, r, rp) = (e[j + 1][0], e[j + 2][0], e[j + 3][0]);
        out.srw[j] = match model.capillarity {
            crate::model::Capillarity::Constant(k) => {
                (2.0 / 3.0) * k.max(0.0).sqrt() * (rp * rp.sqrt() - rm * rm.sqrt()) / (2.0 * dx)
            }
            _ => r.sqrt() * model.kappa(r).max(0.0).sqrt() * (rp - rm) / (2.0 * dx),
        };
    }
    Ok(out)
}

/// Sum over cells of `⟨z_j, rhs_j⟩ δx`, the semi-discrete entropy production.
pub fn entropy_production(model: &FluidModel, state: &ConservedState, rhs: &[Vec3]) -> Result<f64> {
    let mut sum = 0.0;
    for (j, r) in rhs.iter().enumerate() {
        sum += crate::linalg::dot(&model.entropy_variables(&state.cell(j))?.0, r);
    }
    Ok(sum * state.dx())
}

/// Semi-discrete residual scale `max_j |rhs_j|`, componentwise.
pub fn rhs_magnitude(rhs: &[Vec3]) -> [f64; 3] {
    let mut m = [0.0_f64; 3];
    for r in rhs {
        for c in 0..3 {
            m[c] = m[c].max(r[c].abs());
        }
    }
    m
}
