//! Baseline scheme on the original `(ρ, ρu)` unknowns, kept for comparison.
//!
//! The capillary stress `ρκρ_xx + (ρκ' − κ)ρ_x²/2` is evaluated with centered
//! differences at cell centers and differenced once more, so the momentum
//! equation carries a five-point third-derivative stencil. `ρw` is ignored
//! (and kept at zero) by the convective flux.

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;

use super::{check_cells, ConservedState, SolverConfig, GHOSTS};
use crate::flux::flux_value;
use crate::model::{Conserved, FluidModel};
use crate::Result;

fn stress(model: &FluidModel, rm: f64, r: f64, rp: f64, dx: f64) -> f64 {
    let rx = (rp - rm) / (2.0 * dx);
    let rxx = (rp - 2.0 * r + rm) / (dx * dx);
    let k = model.kappa(r);
    r * k * rxx + 0.5 * (r * model.kappa_prime(r) - k) * rx * rx
}

/// Right-hand side of the original formulation; the third component is zero.
pub fn rhs(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<Vec<[f64; 3]>> {
    let mut e = state.extended(state.time);
    for v in e.iter_mut() {
        v[2] = 0.0;
    }
    check_cells(&e, GHOSTS)?;
    let (n, dx) = (state.n_cells(), state.dx());
    let lambda1 = dt / dx;
    let mut f = Vec::with_capacity(n + 1);
    for i in 0..=n {
        f.push(flux_value(model, &config.flux, &e[i + 1], &e[i + 2], lambda1)?);
    }
    // stresses at cells −1..=N
    let s: Vec<f64> = (1..n + 3).map(|k| stress(model, e[k - 1][0], e[k][0], e[k + 1][0], dx)).collect();
    Ok((0..n)
        .map(|j| {
            let mut r = [0.0; 3];
            for c in 0..2 {
                r[c] = -(f[j + 1][c] - f[j][c]) / dx;
            }
            r[1] += (s[j + 2] - s[j]) / (2.0 * dx);
            r
        })
        .collect())
}

/// Forward Euler step of the original formulation.
pub fn step_fe(model: &FluidModel, state: &ConservedState, config: &SolverConfig, dt: f64) -> Result<ConservedState> {
    let r = rhs(model, state, config, dt)?;
    let cells: Vec<Conserved> = (0..state.n_cells())
        .map(|j| {
            let v = state.cell(j);
            [v[0] + dt * r[j][0], v[1] + dt * r[j][1], 0.0]
        })
        .collect();
    check_cells(&cells, 0)?;
    let mut next = state.with_cells(&cells);
    next.time = state.time + dt;
    Ok(next)
}

/// `Σ (ρu²/2 + F(ρ) + κ(ρ)/2 ((ρ_{j+1} − ρ_j)/δx)²) δx`.
pub fn energy(model: &FluidModel, state: &ConservedState) -> Result<f64> {
    let e = state.extended(state.time);
    let dx = state.dx();
    let mut sum = 0.0;
    for j in 0..state.n_cells() {
        let v = e[j + 2];
        let grad = (e[j + 3][0] - v[0]) / dx;
        sum += model.entropy(&[v[0], v[1], 0.0])? + 0.5 * model.kappa(v[0]) * grad * grad;
    }
    Ok(sum * dx)
}
