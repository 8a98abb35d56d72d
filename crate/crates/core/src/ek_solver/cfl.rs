//! Time-step bound for entropy-stable forward Euler steps.
//!
//! For every cell `j` and each of its interfaces the step must satisfy
//! `M (λ₁ N + λ₂ ‖B‖)² ≤ λ₁ Γ` where `Γ` is the smallest eigenvalue of the
//! dissipation matrix `D = Q − Q*`, `N` bounds the flux variation and `M` the
//! entropy Hessian along the step. All matrix norms are taken in the
//! coordinates where the entropy Hessian of cell `j` is the identity,
//! `Ã = H_j^{1/2} A H_j^{1/2}`: in plain spectral norms the bound is never
//! satisfiable for Lax–Friedrichs because `∇_z v` is badly conditioned.
//!
//! `M` involves the unknown new state. It is estimated from a forward Euler
//! predictor and the estimate is iterated.

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_cells, interface_mu, semi_discrete_rhs, ConservedState, SolverConfig, GHOSTS};
use crate::flux::{entropy_conservative_matrix, mean_conserved_jacobian, FluxKind};
use crate::linalg::{congruence, mat_axpy, spectral_norm, sub, sym_eigenvalues, sym_function, sym_spectral_norm, symmetrize, Mat3};
use crate::model::{Conserved, FluidModel};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyCflOptions {
    /// Factor applied to the final bound.
    pub safety: f64,
    pub predictor_iterations: usize,
    /// Samples of the Hessian along each predicted segment.
    pub segment_samples: usize,
    pub quadrature_order: usize,
}

impl Default for EntropyCflOptions {
    fn default() -> Self {
        Self { safety: 0.9, predictor_iterations: 3, segment_samples: 8, quadrature_order: 8 }
    }
}

/// Weighted quantities of one (cell, interface) pair at a given viscosity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTerms {
    pub m: f64,
    /// `∫ ‖∇_z g‖ + ‖Q‖`
    pub n: f64,
    /// `‖B‖`, `B Δz` being `δx` times the capillary interface flux.
    pub b: f64,
    /// `min Sp(D)`
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyCfl {
    /// Bound after the safety factor; 0 when infeasible, `+∞` for a uniform state.
    pub dt: f64,
    /// False when `Γ ≤ 0` at some interface with a non-zero jump.
    pub feasible: bool,
    pub limiting_cell: usize,
    /// Largest Hessian ratio `M` of the final estimate.
    pub m_max: f64,
}

/// Viscosity `p = a δx/δt + c` of the scalar-viscosity fluxes.
#[derive(Clone, Copy, Debug)]
struct ViscosityLaw {
    a: f64,
    c: f64,
}

impl ViscosityLaw {
    fn p(&self, dt: f64, dx: f64) -> f64 {
        if self.a == 0.0 {
            self.c
        } else {
            self.a * dx / dt + self.c
        }
    }
}

/// Weighted, viscosity-independent data of one pair.
#[derive(Clone, Copy, Debug)]
struct PairData {
    cell: usize,
    /// `∫ ‖S ∇_z g S‖`
    g_norm: f64,
    /// `S (∫ ∇_z v) S`
    j: Mat3,
    /// `S Q* S`
    q_star: Mat3,
    b: f64,
    law: ViscosityLaw,
}

impl PairData {
    fn terms(&self, m: f64, p: f64) -> PairTerms {
        let q = crate::linalg::mat_scale(p, &self.j);
        let d = symmetrize(&sub3(&q, &self.q_star));
        PairTerms { m, n: self.g_norm + sym_spectral_norm(&q), b: self.b, gamma: sym_eigenvalues(&d)[0] }
    }

    /// `M(λ₁N + λ₂B)² − λ₁Γ`.
    fn defect(&self, m: f64, dt: f64, dx: f64) -> f64 {
        let t = self.terms(m, self.law.p(dt, dx));
        let (l1, l2) = (dt / dx, dt / (dx * dx));
        m * (l1 * t.n + l2 * t.b).powi(2) - l1 * t.gamma
    }

    /// Largest admissible `δt`, 0 if none.
    fn max_dt(&self, m: f64, dx: f64) -> f64 {
        if self.law.a == 0.0 {
            let t = self.terms(m, self.law.c);
            if !(t.gamma > 0.0) {
                return 0.0;
            }
            let k = t.n / dx + t.b / (dx * dx);
            return t.gamma / (dx * m * k * k);
        }
        let mut lo = 1e-14 * dx * dx;
        if self.defect(m, lo, dx) > 0.0 {
            return 0.0;
        }
        let mut hi = dx;
        let mut grow = 0;
        while self.defect(m, hi, dx) <= 0.0 {
            lo = hi;
            hi *= 2.0;
            grow += 1;
            if grow > 200 {
                return hi;
            }
        }
        while hi - lo > 1e-10 * lo {
            let mid = (lo * hi).sqrt();
            if self.defect(m, mid, dx) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

fn sub3(a: &Mat3, b: &Mat3) -> Mat3 {
    mat_axpy(a, -1.0, b)
}

fn viscosity_law(model: &FluidModel, config: &SolverConfig, l: &Conserved, r: &Conserved) -> Result<ViscosityLaw> {
    let c = model.spectral_radius(l)?.max(model.spectral_radius(r)?) + config.flux.extra_viscosity;
    match config.flux.kind {
        FluxKind::LaxFriedrichs => Ok(ViscosityLaw { a: 0.5, c }),
        FluxKind::ModifiedLf => Ok(ViscosityLaw { a: 0.25, c }),
        FluxKind::Rusanov => Ok(ViscosityLaw { a: 0.0, c }),
        FluxKind::EntropyConservative => Ok(ViscosityLaw { a: 0.0, c: 0.0 }),
        FluxKind::Hll => Err(Error::InvalidConfig("the entropy time-step bound needs a viscosity-form flux")),
    }
}

fn pair_data(
    model: &FluidModel,
    config: &SolverConfig,
    cell: usize,
    v: &Conserved,
    l: &Conserved,
    r: &Conserved,
    order: usize,
) -> Result<PairData> {
    let s = sym_function(&model.entropy_hessian(v)?, f64::sqrt);
    let (zl, zr) = (model.entropy_variables(l)?, model.entropy_variables(r)?);
    let dz = sub(&zr.0, &zl.0);
    let mut g_norm = 0.0;
    for (t, w) in GaussLegendre::new(order).on(0.0, 1.0) {
        let z = crate::model::EntropyVariables([zl.0[0] + t * dz[0], zl.0[1] + t * dz[1], zl.0[2] + t * dz[2]]);
        g_norm += w * sym_spectral_norm(&symmetrize(&congruence(&s, &model.flux_jacobian_z(&z)?)));
    }
    let j = symmetrize(&congruence(&s, &mean_conserved_jacobian(model, &zl, &zr, order)?));
    let q_star = symmetrize(&congruence(&s, &entropy_conservative_matrix(model, &zl, &zr, order)?));
    let mu = interface_mu(model, l, r)?;
    let b_mat: Mat3 = [[0.0, 0.0, 0.0], [0.0, 0.0, mu], [0.0, -mu, 0.0]];
    let b = spectral_norm(&congruence(&s, &b_mat));
    Ok(PairData { cell, g_norm, j, q_star, b, law: viscosity_law(model, config, l, r)? })
}

/// Terms of the pair (cell `v`, interface `(l, r)`) for viscosity `p` and Hessian ratio `m`.
pub fn pair_terms(
    model: &FluidModel,
    config: &SolverConfig,
    v: &Conserved,
    l: &Conserved,
    r: &Conserved,
    p: f64,
    m: f64,
) -> Result<PairTerms> {
    let data = pair_data(model, config, 0, v, l, r, config.flux.quadrature_order)?;
    Ok(data.terms(m, p))
}

/// `max_s λmax(S⁻¹ H(v + s(v* − v)) S⁻¹)` over sampled `s ∈ [0, 1]`.
fn hessian_ratio(model: &FluidModel, v: &Conserved, target: &Conserved, samples: usize) -> Result<f64> {
    let s_inv = sym_function(&model.entropy_hessian(v)?, |x| 1.0 / x.sqrt());
    let mut m = 1.0_f64;
    for k in 1..=samples {
        let t = k as f64 / samples as f64;
        let p = [v[0] + t * (target[0] - v[0]), v[1] + t * (target[1] - v[1]), v[2] + t * (target[2] - v[2])];
        let h = symmetrize(&congruence(&s_inv, &model.entropy_hessian(&p)?));
        m = m.max(sym_eigenvalues(&h)[2]);
    }
    Ok(m)
}

/// Largest forward Euler step keeping the total entropy non-increasing.
pub fn entropy_cfl_max_dt(
    model: &FluidModel,
    state: &ConservedState,
    config: &SolverConfig,
    options: &EntropyCflOptions,
) -> Result<EntropyCfl> {
    let e = state.extended(state.time);
    check_cells(&e, GHOSTS)?;
    let (n, dx) = (state.n_cells(), state.dx());
    let mut pairs = Vec::with_capacity(2 * n);
    for j in 0..n {
        let v = e[j + 2];
        for (l, r) in [(e[j + 1], e[j + 2]), (e[j + 2], e[j + 3])] {
            if l == r {
                continue;
            }
            pairs.push(pair_data(model, config, j, &v, &l, &r, options.quadrature_order)?);
        }
    }
    if pairs.is_empty() {
        return Ok(EntropyCfl { dt: f64::INFINITY, feasible: true, limiting_cell: 0, m_max: 1.0 });
    }
    let mut m = vec![1.0_f64; n];
    let bound = |m: &[f64]| {
        let mut best = (f64::INFINITY, 0usize);
        for p in &pairs {
            let dt = p.max_dt(m[p.cell], dx);
            if dt < best.0 {
                best = (dt, p.cell);
            }
        }
        best
    };
    let (mut dt, mut cell) = bound(&m);
    if !(dt > 0.0) {
        return Ok(EntropyCfl { dt: 0.0, feasible: false, limiting_cell: cell, m_max: 1.0 });
    }
    for _ in 0..options.predictor_iterations {
        let mut trial = dt;
        let predicted = loop {
            let rhs = semi_discrete_rhs(model, state, config, trial)?;
            let next: Vec<Conserved> = (0..n)
                .map(|j| {
                    let v = state.cell(j);
                    [v[0] + trial * rhs[j][0], v[1] + trial * rhs[j][1], v[2] + trial * rhs[j][2]]
                })
                .collect();
            if next.iter().all(|v| v[0] > 0.0) {
                break next;
            }
            trial *= 0.5;
            if trial < 1e-300 {
                return Err(Error::Positivity { cell: 0, value: 0.0 });
            }
        };
        for j in 0..n {
            m[j] = hessian_ratio(model, &state.cell(j), &predicted[j], options.segment_samples)?;
        }
        (dt, cell) = bound(&m);
        if !(dt > 0.0) {
            break;
        }
    }
    let m_max = m.iter().fold(1.0_f64, |a, b| a.max(*b));
    Ok(EntropyCfl { dt: options.safety * dt, feasible: dt > 0.0, limiting_cell: cell, m_max })
}
