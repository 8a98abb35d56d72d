//! Hamiltonian semi-discretization in `(ρ, u)` on a periodic grid.
//!
//! ```text
//! H(ρ, u) = Σ_i ρ_i u_i²/2 + F(ρ_i) + κ(ρ_i)/2 ((ρ_{i+1} − ρ_i)/δx)²
//! dρ/dt = −D ∇_u H,   du/dt = −D ∇_ρ H,   (D a)_i = (a_{i+1} − a_{i−1})/(2δx)
//! ```
//!
//! `D` is skew, so `⟨∇H, rhs⟩ = 0` and `H` is a first integral of the
//! semi-discrete system.

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::FluidModel;
use crate::newton::{self, NewtonOptions, Stencil};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianState {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub dx: f64,
}

impl HamiltonianState {
    pub fn new(rho: Vec<f64>, u: Vec<f64>, dx: f64) -> Result<Self> {
        if rho.len() != u.len() || rho.len() < 5 {
            return Err(Error::Domain("state needs at least 5 cells and equal-length fields"));
        }
        if !(dx > 0.0) {
            return Err(Error::Domain("dx must be positive"));
        }
        let s = Self { rho, u, dx };
        s.check_positive()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn check_positive(&self) -> Result<()> {
        for (i, (r, u)) in self.rho.iter().zip(&self.u).enumerate() {
            if !(*r > 0.0) || !r.is_finite() || !u.is_finite() {
                return Err(Error::Positivity { cell: i, value: *r });
            }
        }
        Ok(())
    }

    /// `Σ ρ_i u_i δx`.
    pub fn momentum(&self) -> f64 {
        self.rho.iter().zip(&self.u).map(|(r, u)| r * u).sum::<f64>() * self.dx
    }

    fn to_flat(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.u).flat_map(|(r, u)| [*r, *u]).collect()
    }

    fn from_flat(x: &[f64], dx: f64) -> Self {
        Self { rho: x.iter().step_by(2).copied().collect(), u: x.iter().skip(1).step_by(2).copied().collect(), dx }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianReport {
    /// Raw sum `H`.
    pub h_value: f64,
    /// `δx · H`, the discrete energy.
    pub h_weighted: f64,
    /// `(H − H_ref)/|H_ref|`.
    pub h_drift_relative: f64,
    pub momentum_value: f64,
    pub newton_iters: usize,
}

/// Raw sum `H(ρ, u)`; multiply by `δx` for the energy.
pub fn discrete_hamiltonian(model: &FluidModel, state: &HamiltonianState) -> Result<f64> {
    state.check_positive()?;
    let n = state.len();
    let mut h = 0.0;
    for i in 0..n {
        let (r, u) = (state.rho[i], state.u[i]);
        let g = (state.rho[(i + 1) % n] - r) / state.dx;
        h += 0.5 * r * u * u + model.energy_density(r) + 0.5 * model.kappa(r) * g * g;
    }
    Ok(h)
}

/// `(∇_ρ H, ∇_u H)`.
pub fn grad_hamiltonian(model: &FluidModel, state: &HamiltonianState) -> Result<(Vec<f64>, Vec<f64>)> {
    state.check_positive()?;
    let n = state.len();
    let (rho, u, dx) = (&state.rho, &state.u, state.dx);
    let mut gr = Vec::with_capacity(n);
    for i in 0..n {
        let (rm, r, rp) = (rho[(i + n - 1) % n], rho[i], rho[(i + 1) % n]);
        let g = (rp - r) / dx;
        gr.push(
            0.5 * u[i] * u[i]
                + model.energy_density_prime(r)
                + 0.5 * model.kappa_prime(r) * g * g
                + (model.kappa(rm) * (r - rm) - model.kappa(r) * (rp - r)) / (dx * dx),
        );
    }
    let gu = rho.iter().zip(u).map(|(r, u)| r * u).collect();
    Ok((gr, gu))
}

/// Centered difference `(a_{i+1} − a_{i−1})/(2δx)`, periodic.
pub fn centered_difference(a: &[f64], dx: f64) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|i| (a[(i + 1) % n] - a[(i + n - 1) % n]) / (2.0 * dx)).collect()
}

fn field_from_gradient(g: &(Vec<f64>, Vec<f64>), dx: f64) -> (Vec<f64>, Vec<f64>) {
    let d_rho = centered_difference(&g.1, dx).into_iter().map(|x| -x).collect();
    let d_u = centered_difference(&g.0, dx).into_iter().map(|x| -x).collect();
    (d_rho, d_u)
}

/// `(dρ/dt, du/dt) = (−D ∇_u H, −D ∇_ρ H)`.
pub fn hamiltonian_rhs(model: &FluidModel, state: &HamiltonianState) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(field_from_gradient(&grad_hamiltonian(model, state)?, state.dx))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianStepper {
    BackwardEuler,
    /// Trapezoidal rule.
    CrankNicolson,
    /// Average-vector-field discrete gradient; conserves `H` up to the
    /// Newton tolerance.
    AverageVectorField,
}

fn report(model: &FluidModel, state: &HamiltonianState, h_ref: f64, newton_iters: usize) -> Result<HamiltonianReport> {
    let h = discrete_hamiltonian(model, state)?;
    Ok(HamiltonianReport {
        h_value: h,
        h_weighted: h * state.dx,
        h_drift_relative: (h - h_ref) / h_ref.abs(),
        momentum_value: state.momentum(),
        newton_iters,
    })
}

/// Implicit step; `h_ref` is the Hamiltonian the drift is measured against.
pub fn step(
    model: &FluidModel,
    state: &HamiltonianState,
    dt: f64,
    stepper: HamiltonianStepper,
    opts: &NewtonOptions,
    h_ref: f64,
) -> Result<(HamiltonianState, HamiltonianReport)> {
    state.check_positive()?;
    let n = state.len();
    let dx = state.dx;
    let old = state.to_flat();
    let scale = old.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let old_rhs = match stepper {
        HamiltonianStepper::CrankNicolson => Some(hamiltonian_rhs(model, state)?),
        _ => None,
    };
    let rule = GaussLegendre::new(4);
    let evaluate = |x: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        match stepper {
            HamiltonianStepper::BackwardEuler | HamiltonianStepper::CrankNicolson => {
                hamiltonian_rhs(model, &HamiltonianState::from_flat(x, dx))
            }
            HamiltonianStepper::AverageVectorField => {
                let mut acc = (vec![0.0; n], vec![0.0; n]);
                for (s, w) in rule.on(0.0, 1.0) {
                    let mid: Vec<f64> = old.iter().zip(x).map(|(a, b)| a + s * (b - a)).collect();
                    let g = grad_hamiltonian(model, &HamiltonianState::from_flat(&mid, dx))?;
                    for i in 0..n {
                        acc.0[i] += w * g.0[i];
                        acc.1[i] += w * g.1[i];
                    }
                }
                Ok(field_from_gradient(&acc, dx))
            }
        }
    };
    let mut x = old.clone();
    let stencil = Stencil { cells: n, vars_per_cell: 2, radius: 2, periodic: true };
    let rep = newton::solve(&mut x, stencil, scale, opts, |x, out| {
        let (fr, fu) = evaluate(x)?;
        for i in 0..n {
            let (mut rr, mut ru) = (fr[i], fu[i]);
            if let Some((or, ou)) = &old_rhs {
                rr = 0.5 * (rr + or[i]);
                ru = 0.5 * (ru + ou[i]);
            }
            out[2 * i] = x[2 * i] - old[2 * i] - dt * rr;
            out[2 * i + 1] = x[2 * i + 1] - old[2 * i + 1] - dt * ru;
        }
        Ok(())
    })?;
    let next = HamiltonianState::from_flat(&x, dx);
    next.check_positive()?;
    let r = report(model, &next, h_ref, rep.iterations)?;
    Ok((next, r))
}

pub fn step_be_ham(
    model: &FluidModel,
    state: &HamiltonianState,
    dt: f64,
    opts: &NewtonOptions,
    h_ref: f64,
) -> Result<(HamiltonianState, HamiltonianReport)> {
    step(model, state, dt, HamiltonianStepper::BackwardEuler, opts, h_ref)
}

pub fn step_cn_ham(
    model: &FluidModel,
    state: &HamiltonianState,
    dt: f64,
    opts: &NewtonOptions,
    h_ref: f64,
) -> Result<(HamiltonianState, HamiltonianReport)> {
    step(model, state, dt, HamiltonianStepper::CrankNicolson, opts, h_ref)
}

/// Oscillation diagnostics of one snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShockMetrics {
    /// Distance between the outermost cells whose deviation from the smoothed
    /// profile exceeds the threshold (0 when none does).
    pub zone_width: f64,
    /// Strict local extrema of the profile.
    pub extrema: usize,
}

/// Periodic moving average over an odd window of `window` cells.
pub fn moving_average(h: &[f64], window: usize) -> Vec<f64> {
    let n = h.len();
    let half = (window.max(1) / 2).min(n.saturating_sub(1) / 2);
    let w = (2 * half + 1) as f64;
    (0..n)
        .map(|i| (0..=2 * half).map(|k| h[(i + n + k - half) % n]).sum::<f64>() / w)
        .collect()
}

/// Strict local extrema on a periodic profile, ignoring steps below `tol`.
pub fn count_extrema(h: &[f64], tol: f64) -> usize {
    let n = h.len();
    let slopes: Vec<i8> = (0..n)
        .map(|i| {
            let d = h[(i + 1) % n] - h[i];
            if d > tol {
                1
            } else if d < -tol {
                -1
            } else {
                0
            }
        })
        .filter(|s| *s != 0)
        .collect();
    let m = slopes.len();
    (0..m).filter(|&k| slopes[k] != slopes[(k + 1) % m]).count()
}

/// Zone width and extremum count for each snapshot of `h`.
///
/// Deviations are taken from a moving average over 2% of the domain; the
/// threshold is three times the RMS deviation of the first snapshot. A
/// snapshot with no more extrema than the first one has no oscillatory zone.
pub fn dispersive_shock_metrics(snapshots: &[Vec<f64>], dx: f64) -> Result<Vec<ShockMetrics>> {
    if snapshots.len() < 2 {
        return Err(Error::Domain("at least two snapshots are needed"));
    }
    let n = snapshots[0].len();
    let window = ((0.02 * n as f64).round() as usize) | 1;
    let residual = |h: &[f64]| -> Vec<f64> {
        let s = moving_average(h, window);
        h.iter().zip(&s).map(|(a, b)| a - b).collect()
    };
    let r0 = residual(&snapshots[0]);
    let rms = (r0.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    let scale = snapshots[0].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let threshold = (3.0 * rms).max(1e-12 * scale);
    let base_extrema = count_extrema(&snapshots[0], 1e-12 * scale);
    Ok(snapshots
        .iter()
        .map(|h| {
            let extrema = count_extrema(h, 1e-12 * scale);
            let r = residual(h);
            let hits: Vec<usize> = (0..n).filter(|&i| r[i].abs() > threshold).collect();
            let zone_width = match (hits.first(), hits.last()) {
                (Some(a), Some(b)) if extrema > base_extrema => (b - a + 1) as f64 * dx,
                _ => 0.0,
            };
            ShockMetrics { zone_width, extrema }
        })
        .collect())
}
