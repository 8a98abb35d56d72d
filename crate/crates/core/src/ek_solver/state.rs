#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::model::{Conserved, FluidModel};
use crate::{Error, Result};

/// Ghost cells on each side of the grid.
pub const GHOSTS: usize = 2;

/// Inlet height `1 + amp · sin(2π · freq · time_scale · t)`; the inlet discharge is 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InletForcing {
    pub freq: f64,
    pub amp: f64,
    /// Converts nondimensional time to the unit of `1/freq`.
    pub time_scale: f64,
}

impl InletForcing {
    pub fn height(&self, t: f64) -> f64 {
        1.0 + self.amp * (2.0 * PI * self.freq * self.time_scale * t).sin()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Forced inlet on the left, zero-gradient outlet on the right.
    InletOutlet(InletForcing),
}

/// Cell averages of `(ρ, ρu, ρw)` on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedState {
    pub x0: f64,
    pub length: f64,
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
    pub srw: Vec<f64>,
    pub boundary: Boundary,
    pub time: f64,
}

impl ConservedState {
    pub fn new(x0: f64, length: f64, rho: Vec<f64>, mom: Vec<f64>, srw: Vec<f64>, boundary: Boundary) -> Result<Self> {
        let n = rho.len();
        if n < 3 || mom.len() != n || srw.len() != n {
            return Err(Error::Domain("state needs at least 3 cells and equal-length fields"));
        }
        if !(length > 0.0) {
            return Err(Error::Domain("domain length must be positive"));
        }
        let state = Self { x0, length, rho, mom, srw, boundary, time: 0.0 };
        state.check_positive()?;
        Ok(state)
    }

    pub fn n_cells(&self) -> usize {
        self.rho.len()
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n_cells() as f64
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        self.x0 + (j as f64 + 0.5) * self.dx()
    }

    pub fn cell(&self, j: usize) -> Conserved {
        [self.rho[j], self.mom[j], self.srw[j]]
    }

    pub fn set_cell(&mut self, j: usize, v: Conserved) {
        self.rho[j] = v[0];
        self.mom[j] = v[1];
        self.srw[j] = v[2];
    }

    pub fn cells(&self) -> Vec<Conserved> {
        (0..self.n_cells()).map(|j| self.cell(j)).collect()
    }

    /// Same grid and boundary, new cell values.
    pub fn with_cells(&self, cells: &[Conserved]) -> Self {
        let mut out = self.clone();
        for (j, v) in cells.iter().enumerate() {
            out.set_cell(j, *v);
        }
        out
    }

    /// Cell-major flat vector `[ρ₀, m₀, s₀, ρ₁, …]`.
    pub fn to_flat(&self) -> Vec<f64> {
        (0..self.n_cells()).flat_map(|j| self.cell(j)).collect()
    }

    pub fn with_flat(&self, x: &[f64]) -> Self {
        let mut out = self.clone();
        for j in 0..self.n_cells() {
            out.set_cell(j, [x[3 * j], x[3 * j + 1], x[3 * j + 2]]);
        }
        out
    }

    /// Fails on the first cell with `ρ ≤ 0` or a non-finite value.
    pub fn check_positive(&self) -> Result<()> {
        for j in 0..self.n_cells() {
            let v = self.cell(j);
            if !(v[0] > 0.0) || !v.iter().all(|x| x.is_finite()) {
                return Err(Error::Positivity { cell: j, value: v[0] });
            }
        }
        Ok(())
    }

    /// `Σ_j U(v_j) δx`.
    pub fn total_entropy(&self, model: &FluidModel) -> Result<f64> {
        let mut sum = 0.0;
        for j in 0..self.n_cells() {
            sum += model.entropy(&self.cell(j))?;
        }
        Ok(sum * self.dx())
    }

    pub fn mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.dx()
    }

    pub fn momentum(&self) -> f64 {
        self.mom.iter().sum::<f64>() * self.dx()
    }

    /// Cells extended by [`GHOSTS`] ghost cells per side; cell `j` sits at index `j + 2`.
    pub fn extended(&self, t: f64) -> Vec<Conserved> {
        apply_boundary(self, t)
    }
}

/// Fills the ghost cells for `state.boundary` at time `t`.
///
/// Inlet: both ghosts carry discharge 1; the first ghost has the forced height,
/// the second repeats the first interior height so the centered height
/// difference at the first ghost vanishes, and `ρw` is mirrored.
/// Outlet: both ghosts copy the last interior cell.
pub fn apply_boundary(state: &ConservedState, t: f64) -> Vec<Conserved> {
    let n = state.n_cells();
    let mut e = Vec::with_capacity(n + 2 * GHOSTS);
    match state.boundary {
        Boundary::Periodic => {
            e.push(state.cell(n - 2));
            e.push(state.cell(n - 1));
            e.extend((0..n).map(|j| state.cell(j)));
            e.push(state.cell(0));
            e.push(state.cell(1));
        }
        Boundary::InletOutlet(forcing) => {
            let h0 = state.rho[0];
            e.push([h0, 1.0, -state.srw[1]]);
            e.push([forcing.height(t), 1.0, -state.srw[0]]);
            e.extend((0..n).map(|j| state.cell(j)));
            e.push(state.cell(n - 1));
            e.push(state.cell(n - 1));
        }
    }
    e
}
