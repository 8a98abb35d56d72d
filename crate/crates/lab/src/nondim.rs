//! Falling-film scales for the Liu–Gollub experiment.
//!
//! `h_N = (2Re ν²/(g sin θ))^{1/3}`, `F² = (2/9) Re tan θ`, `We = ρλu_N²/σ`,
//! `T_N = λ/u_N`, `ε = h_N/λ`.
//!
//! The velocity scale is ambiguous. `u_N = νRe/h_N` gives about 0.142 m/s at the
//! reference inputs, while the commonly quoted `u_N ≈ 9.49e-2` (and the quoted
//! `We`, `T_N`) match the Nusselt mean velocity `g sin θ h_N²/(3ν) = 2νRe/(3h_N)`.
//! Both are computed; [`NondimReport::velocity_gap`] measures the disagreement.

use anyhow::{ensure, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityScale {
    /// `u_N = νRe/h_N`
    Formula,
    /// `u_N = g sin θ h_N²/(3ν)`
    Nusselt,
}

impl VelocityScale {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "formula" => Some(Self::Formula),
            "nusselt" => Some(Self::Nusselt),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NondimInputs {
    pub reynolds: f64,
    /// Kinematic viscosity, m²/s.
    pub nu: f64,
    pub g: f64,
    /// Inclination in radians.
    pub theta: f64,
    /// Fluid density, kg/m³.
    pub rho: f64,
    /// Surface tension, N/m.
    pub sigma: f64,
    /// Length scale λ, m.
    pub lambda: f64,
}

impl NondimInputs {
    /// Re = 29, ν = 6.28e-6, θ = 6.4°, ρ = 1134, σ = 0.067, λ = 0.01.
    pub fn reference() -> Self {
        Self {
            reynolds: 29.0,
            nu: 6.28e-6,
            g: 9.8,
            theta: 6.4_f64.to_radians(),
            rho: 1134.0,
            sigma: 0.067,
            lambda: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NondimensionalSet {
    pub h_n: f64,
    pub u_n: f64,
    pub t_n: f64,
    pub froude_sq: f64,
    pub weber: f64,
    pub epsilon: f64,
    pub reynolds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NondimReport {
    /// With `u_N = νRe/h_N`.
    pub formula: NondimensionalSet,
    /// With the Nusselt mean velocity.
    pub nusselt: NondimensionalSet,
    /// `|u_formula − u_nusselt| / u_nusselt`; always 1/2 since the two differ by 3/2.
    pub velocity_gap: f64,
}

impl NondimReport {
    pub fn set(&self, scale: VelocityScale) -> &NondimensionalSet {
        match scale {
            VelocityScale::Formula => &self.formula,
            VelocityScale::Nusselt => &self.nusselt,
        }
    }
}

/// Commonly quoted values for the reference inputs.
pub mod quoted {
    pub const H_N: f64 = 1.28e-3;
    pub const U_N: f64 = 9.49e-2;
    pub const FROUDE_SQ: f64 = 0.723;
    pub const T_N: f64 = 0.105;
    pub const WEBER: f64 = 1.52;
}

fn with_velocity(inputs: &NondimInputs, h_n: f64, froude_sq: f64, u_n: f64) -> NondimensionalSet {
    NondimensionalSet {
        h_n,
        u_n,
        t_n: inputs.lambda / u_n,
        froude_sq,
        weber: inputs.rho * inputs.lambda * u_n * u_n / inputs.sigma,
        epsilon: h_n / inputs.lambda,
        reynolds: inputs.reynolds,
    }
}

pub fn liu_gollub_nondimensionalize(inputs: &NondimInputs) -> Result<NondimReport> {
    let i = inputs;
    let all = [i.reynolds, i.nu, i.g, i.rho, i.sigma, i.lambda];
    ensure!(all.iter().all(|x| *x > 0.0 && x.is_finite()), "all inputs must be positive and finite");
    ensure!(i.theta > 0.0 && i.theta < std::f64::consts::FRAC_PI_2, "inclination must lie in (0, 90) degrees");
    let gs = i.g * i.theta.sin();
    let h_n = (2.0 * i.reynolds * i.nu * i.nu / gs).cbrt();
    let froude_sq = 2.0 / 9.0 * i.reynolds * i.theta.tan();
    let u_formula = i.nu * i.reynolds / h_n;
    let u_nusselt = gs * h_n * h_n / (3.0 * i.nu);
    Ok(NondimReport {
        formula: with_velocity(i, h_n, froude_sq, u_formula),
        nusselt: with_velocity(i, h_n, froude_sq, u_nusselt),
        velocity_gap: (u_formula - u_nusselt).abs() / u_nusselt,
    })
}

/// `(name, computed, quoted, relative error)` rows against [`quoted`].
pub fn compare_with_quoted(set: &NondimensionalSet) -> Vec<(&'static str, f64, f64, f64)> {
    [
        ("h_N", set.h_n, quoted::H_N),
        ("u_N", set.u_n, quoted::U_N),
        ("F^2", set.froude_sq, quoted::FROUDE_SQ),
        ("T_N", set.t_n, quoted::T_N),
        ("We", set.weber, quoted::WEBER),
    ]
    .into_iter()
    .map(|(name, c, q)| (name, c, q, (c - q).abs() / q))
    .collect()
}
