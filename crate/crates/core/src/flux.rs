//! Numerical fluxes for the convective part of the extended system.
//!
//! The viscosity-form fluxes are `f = (f(v_l) + f(v_r))/2 − (p/2)(v_r − v_l)`.
//! Written in entropy variables that is `f = (g_l + g_r)/2 − Q Δz / 2` with
//! `Q = p ∫₀¹ ∇_z v(z_l + s Δz) ds`, symmetric. The entropy-conservative flux
//! replaces `Q` by `Q* = ∫_{−1/2}^{1/2} 2s ∇_z g(z̄ + s Δz) ds`.

#[allow(unused_imports)]
use crate::prelude::*;
use crate::linalg::{add, dot, mat_axpy, mat_vec, scale, sub, Mat3, Vec3, ZERO3};
use crate::model::{Conserved, EntropyVariables, FluidModel};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Default Gauss–Legendre order for `Q` and `Q*`.
pub const DEFAULT_QUADRATURE_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxKind {
    /// `p = 1/(2λ₁) + max ρ(∇f) + p̃`.
    LaxFriedrichs,
    /// `p = 1/(4λ₁) + max ρ(∇f) + p̃`.
    ModifiedLf,
    /// `p = max ρ(∇f) + p̃`.
    Rusanov,
    /// Two-wave solver with Davis speed bounds.
    Hll,
    EntropyConservative,
}

impl FluxKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "lf" | "lax_friedrichs" => Some(Self::LaxFriedrichs),
            "mlf" | "modified_lf" => Some(Self::ModifiedLf),
            "rusanov" => Some(Self::Rusanov),
            "hll" => Some(Self::Hll),
            "econs" | "entropy_conservative" => Some(Self::EntropyConservative),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LaxFriedrichs => "lf",
            Self::ModifiedLf => "mlf",
            Self::Rusanov => "rusanov",
            Self::Hll => "hll",
            Self::EntropyConservative => "econs",
        }
    }

    /// Fluxes whose dissipation is a scalar multiple of `v_r − v_l`.
    pub fn has_scalar_viscosity(&self) -> bool {
        matches!(self, Self::LaxFriedrichs | Self::ModifiedLf | Self::Rusanov)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxSpec {
    pub kind: FluxKind,
    /// Extra viscosity `p̃ ≥ 0`.
    pub extra_viscosity: f64,
    pub quadrature_order: usize,
}

impl FluxSpec {
    pub fn new(kind: FluxKind) -> Self {
        Self { kind, extra_viscosity: 0.0, quadrature_order: DEFAULT_QUADRATURE_ORDER }
    }

    pub fn with_extra_viscosity(mut self, p: f64) -> Self {
        self.extra_viscosity = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.extra_viscosity >= 0.0) {
            return Err(Error::InvalidConfig("extra viscosity must be non-negative"));
        }
        if self.quadrature_order < 2 {
            return Err(Error::InvalidConfig("quadrature order must be at least 2"));
        }
        Ok(())
    }

    /// Scalar viscosity `p` at an interface; `None` for HLL and the
    /// entropy-conservative flux.
    pub fn viscosity(&self, model: &FluidModel, vl: &Conserved, vr: &Conserved, lambda1: f64) -> Result<Option<f64>> {
        let base = match self.kind {
            FluxKind::LaxFriedrichs => 0.5 / lambda1,
            FluxKind::ModifiedLf => 0.25 / lambda1,
            FluxKind::Rusanov => 0.0,
            FluxKind::Hll | FluxKind::EntropyConservative => return Ok(None),
        };
        Ok(Some(rusanov_p(model, vl, vr, base + self.extra_viscosity)?))
    }
}

/// Flux at one interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceFlux {
    pub value: Vec3,
    /// Symmetric viscosity matrix on entropy variables, when requested and defined.
    pub viscosity_matrix: Option<Mat3>,
    /// Numerical entropy flux `𝓖₀`.
    pub entropy_flux: f64,
}

/// `p̃ + max(|u| + c)` over both states.
pub fn rusanov_p(model: &FluidModel, vl: &Conserved, vr: &Conserved, extra: f64) -> Result<f64> {
    Ok(extra + model.spectral_radius(vl)?.max(model.spectral_radius(vr)?))
}

fn lerp(zl: &EntropyVariables, dz: &Vec3, s: f64) -> EntropyVariables {
    EntropyVariables([zl.0[0] + s * dz[0], zl.0[1] + s * dz[1], zl.0[2] + s * dz[2]])
}

/// `∫₀¹ ∇_z v(z_l + s Δz) ds` by Gauss–Legendre quadrature.
pub fn mean_conserved_jacobian(
    model: &FluidModel,
    zl: &EntropyVariables,
    zr: &EntropyVariables,
    order: usize,
) -> Result<Mat3> {
    let dz = sub(&zr.0, &zl.0);
    let mut acc = ZERO3;
    for (s, w) in GaussLegendre::new(order).on(0.0, 1.0) {
        acc = mat_axpy(&acc, w, &model.conserved_jacobian_z(&lerp(zl, &dz, s))?);
    }
    Ok(acc)
}

/// `Q* = ∫_{−1/2}^{1/2} 2s ∇_z g(z̄ + s Δz) ds`.
pub fn entropy_conservative_matrix(
    model: &FluidModel,
    zl: &EntropyVariables,
    zr: &EntropyVariables,
    order: usize,
) -> Result<Mat3> {
    let dz = sub(&zr.0, &zl.0);
    let mut acc = ZERO3;
    for (s, w) in GaussLegendre::new(order).on(-0.5, 0.5) {
        let jac = model.flux_jacobian_z(&lerp(zl, &dz, s + 0.5))?;
        acc = mat_axpy(&acc, 2.0 * s * w, &jac);
    }
    Ok(acc)
}

/// `𝓖₀ = ⟨(z_l + z_r)/2, f⟩ − (ψ(z_l) + ψ(z_r))/2`.
pub fn numerical_entropy_flux(
    model: &FluidModel,
    zl: &EntropyVariables,
    zr: &EntropyVariables,
    flux: &Vec3,
) -> Result<f64> {
    let zbar = scale(0.5, &add(&zl.0, &zr.0));
    let psi = 0.5 * (model.entropy_potential(zl)? + model.entropy_potential(zr)?);
    Ok(dot(&zbar, flux) - psi)
}

/// `(f(v_l) + f(v_r))/2 − (p/2)(v_r − v_l)`, with `Q = p ∫₀¹ ∇_z v` when `with_q`.
pub fn scalar_viscosity_flux(
    model: &FluidModel,
    vl: &Conserved,
    vr: &Conserved,
    p: f64,
    with_q: bool,
) -> Result<InterfaceFlux> {
    if !(p >= 0.0) {
        return Err(Error::Domain("viscosity must be non-negative"));
    }
    let (fl, fr) = (model.convective_flux(vl)?, model.convective_flux(vr)?);
    let value = sub(&scale(0.5, &add(&fl, &fr)), &scale(0.5 * p, &sub(vr, vl)));
    let (zl, zr) = (model.entropy_variables(vl)?, model.entropy_variables(vr)?);
    let viscosity_matrix = if with_q {
        let m = mean_conserved_jacobian(model, &zl, &zr, DEFAULT_QUADRATURE_ORDER)?;
        Some(crate::linalg::mat_scale(p, &m))
    } else {
        None
    };
    Ok(InterfaceFlux { value, viscosity_matrix, entropy_flux: numerical_entropy_flux(model, &zl, &zr, &value)? })
}

/// `f* = (g(z_l) + g(z_r))/2 − Q* Δz / 2`; `viscosity_matrix` holds `Q*`.
pub fn entropy_conservative_flux(
    model: &FluidModel,
    zl: &EntropyVariables,
    zr: &EntropyVariables,
    order: usize,
) -> Result<InterfaceFlux> {
    if order < 2 {
        return Err(Error::InvalidConfig("quadrature order must be at least 2"));
    }
    let gl = model.flux_of_entropy_variables(zl)?;
    let gr = model.flux_of_entropy_variables(zr)?;
    let q_star = entropy_conservative_matrix(model, zl, zr, order)?;
    let dz = sub(&zr.0, &zl.0);
    let value = sub(&scale(0.5, &add(&gl, &gr)), &scale(0.5, &mat_vec(&q_star, &dz)));
    Ok(InterfaceFlux {
        value,
        viscosity_matrix: Some(q_star),
        entropy_flux: numerical_entropy_flux(model, zl, zr, &value)?,
    })
}

/// HLL flux with `S_l = min(u − c)`, `S_r = max(u + c)` over both states.
pub fn hll_flux(model: &FluidModel, vl: &Conserved, vr: &Conserved) -> Result<InterfaceFlux> {
    let (fl, fr) = (model.convective_flux(vl)?, model.convective_flux(vr)?);
    let speeds = |v: &Conserved| {
        let u = v[1] / v[0];
        let c = model.sound_speed(v[0]);
        (u - c, u + c)
    };
    let ((l1, r1), (l2, r2)) = (speeds(vl), speeds(vr));
    let (sl, sr) = (l1.min(l2), r1.max(r2));
    let value = if sl >= 0.0 {
        fl
    } else if sr <= 0.0 {
        fr
    } else {
        let mut f = [0.0; 3];
        for k in 0..3 {
            f[k] = (sr * fl[k] - sl * fr[k] + sl * sr * (vr[k] - vl[k])) / (sr - sl);
        }
        f
    };
    let (zl, zr) = (model.entropy_variables(vl)?, model.entropy_variables(vr)?);
    Ok(InterfaceFlux { value, viscosity_matrix: None, entropy_flux: numerical_entropy_flux(model, &zl, &zr, &value)? })
}

/// Dispatches on `spec.kind`. `lambda1 = δt/δx` is needed by the LF family only.
pub fn interface_flux(
    model: &FluidModel,
    spec: &FluxSpec,
    vl: &Conserved,
    vr: &Conserved,
    lambda1: f64,
    with_q: bool,
) -> Result<InterfaceFlux> {
    match spec.kind {
        FluxKind::Hll => hll_flux(model, vl, vr),
        FluxKind::EntropyConservative => {
            let (zl, zr) = (model.entropy_variables(vl)?, model.entropy_variables(vr)?);
            entropy_conservative_flux(model, &zl, &zr, spec.quadrature_order)
        }
        _ => {
            let p = spec.viscosity(model, vl, vr, lambda1)?.unwrap_or(0.0);
            scalar_viscosity_flux(model, vl, vr, p, with_q)
        }
    }
}

/// Convective flux value only, skipping entropy bookkeeping.
pub fn flux_value(model: &FluidModel, spec: &FluxSpec, vl: &Conserved, vr: &Conserved, lambda1: f64) -> Result<Vec3> {
    match spec.kind {
        FluxKind::Hll | FluxKind::EntropyConservative => Ok(interface_flux(model, spec, vl, vr, lambda1, false)?.value),
        _ => {
            let p = spec.viscosity(model, vl, vr, lambda1)?.unwrap_or(0.0);
            let (fl, fr) = (model.convective_flux(vl)?, model.convective_flux(vr)?);
            Ok(sub(&scale(0.5, &add(&fl, &fr)), &scale(0.5 * p, &sub(vr, vl))))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Limiter {
    /// Centered slope `(v_{j+1} − v_{j−1})/2`.
    #[default]
    None,
    Minmod,
}

impl Limiter {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "none" => Some(Self::None),
            "minmod" => Some(Self::Minmod),
            _ => None,
        }
    }
}

/// Reconstructed states on both sides of one interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reconstruction {
    pub left: Conserved,
    pub right: Conserved,
    /// The linear reconstruction produced a non-positive density and the
    /// cell averages were used instead.
    pub fell_back: bool,
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

fn slope(limiter: Limiter, vm: &Conserved, v: &Conserved, vp: &Conserved) -> Vec3 {
    let mut s = [0.0; 3];
    for k in 0..3 {
        s[k] = match limiter {
            Limiter::None => 0.5 * (vp[k] - vm[k]),
            Limiter::Minmod => minmod(vp[k] - v[k], v[k] - vm[k]),
        };
    }
    s
}

/// Interface `j + 1/2` from the window `[v_{j−1}, v_j, v_{j+1}, v_{j+2}]`.
pub fn muscl_reconstruct(window: &[Conserved; 4], limiter: Limiter) -> Reconstruction {
    let [a, b, c, d] = window;
    let left = add(b, &scale(0.5, &slope(limiter, a, b, c)));
    let right = sub(c, &scale(0.5, &slope(limiter, b, c, d)));
    if left[0] > 0.0 && right[0] > 0.0 {
        Reconstruction { left, right, fell_back: false }
    } else {
        Reconstruction { left: *b, right: *c, fell_back: true }
    }
}
