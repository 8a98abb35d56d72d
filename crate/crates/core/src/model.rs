//! Continuous model: equations of state, capillarity, the entropy pair and
//! the change of variables to the extended formulation.
//!
//! Conserved variables of the extended system are `v = (ρ, ρu, ρw)` where
//! `w = √κ(ρ) ∂xρ / √ρ`. The entropy is `U(v) = ρ(u² + w²)/2 + F(ρ)` with
//! `ρF'(ρ) − F(ρ) = P(ρ)`, and `z = ∇_v U = (F'(ρ) − (u²+w²)/2, u, w)` are the
//! entropy variables.

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;

use crate::linalg::{Mat3, Vec3};
use crate::{Error, Result};

/// Conserved variables `(ρ, ρu, ρw)` of one cell.
pub type Conserved = [f64; 3];

/// Pressure law `P(ρ)` together with its energy density `F(ρ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PressureLaw {
    /// `P = g h²/2`, `F = g h²/2`.
    ShallowWater { g: f64 },
    /// Thin-film law `P = h²/(2F²) + 2h⁵/25`, `F = h²/(2F²) + h⁵/50`.
    LiuGollub { froude_sq: f64 },
    /// `P = k ρ^γ`, `F = k ρ^γ/(γ − 1)`, `γ > 1`.
    Polytropic { k: f64, gamma: f64 },
}

/// Capillary coefficient `κ(ρ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Capillarity {
    /// `κ(ρ) = κ₀`.
    Constant(f64),
    /// Quantum hydrodynamics, `ρ κ(ρ) = c`.
    Quantum(f64),
}

/// The equation set: pressure law and capillarity. Immutable and `Copy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidModel {
    pub pressure_law: PressureLaw,
    pub capillarity: Capillarity,
}

/// Entropy variables `z = ∇_v U(v)` of one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyVariables(pub [f64; 3]);

impl EntropyVariables {
    pub fn u(&self) -> f64 {
        self.0[1]
    }

    pub fn w(&self) -> f64 {
        self.0[2]
    }

    /// `z₁ + (z₂² + z₃²)/2`, which equals `F'(ρ)`.
    pub fn energy_slope(&self) -> f64 {
        let [z1, z2, z3] = self.0;
        z1 + 0.5 * (z2 * z2 + z3 * z3)
    }
}

#[inline]
fn check_density(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity { value: rho })
    }
}

impl FluidModel {
    pub fn new(pressure_law: PressureLaw, capillarity: Capillarity) -> Self {
        Self { pressure_law, capillarity }
    }

    pub fn kappa(&self, rho: f64) -> f64 {
        match self.capillarity {
            Capillarity::Constant(k) => k,
            Capillarity::Quantum(c) => c / rho,
        }
    }

    pub fn kappa_prime(&self, rho: f64) -> f64 {
        match self.capillarity {
            Capillarity::Constant(_) => 0.0,
            Capillarity::Quantum(c) => -c / (rho * rho),
        }
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        match self.pressure_law {
            PressureLaw::ShallowWater { g } => 0.5 * g * rho * rho,
            PressureLaw::LiuGollub { froude_sq } => {
                rho * rho / (2.0 * froude_sq) + 2.0 * rho.powi(5) / 25.0
            }
            PressureLaw::Polytropic { k, gamma } => k * rho.powf(gamma),
        }
    }

    pub fn pressure_prime(&self, rho: f64) -> f64 {
        match self.pressure_law {
            PressureLaw::ShallowWater { g } => g * rho,
            PressureLaw::LiuGollub { froude_sq } => rho / froude_sq + 0.4 * rho.powi(4),
            PressureLaw::Polytropic { k, gamma } => k * gamma * rho.powf(gamma - 1.0),
        }
    }

    pub fn energy_density(&self, rho: f64) -> f64 {
        match self.pressure_law {
            PressureLaw::ShallowWater { g } => 0.5 * g * rho * rho,
            PressureLaw::LiuGollub { froude_sq } => {
                rho * rho / (2.0 * froude_sq) + rho.powi(5) / 50.0
            }
            PressureLaw::Polytropic { k, gamma } => k * rho.powf(gamma) / (gamma - 1.0),
        }
    }

    pub fn energy_density_prime(&self, rho: f64) -> f64 {
        match self.pressure_law {
            PressureLaw::ShallowWater { g } => g * rho,
            PressureLaw::LiuGollub { froude_sq } => rho / froude_sq + 0.1 * rho.powi(4),
            PressureLaw::Polytropic { k, gamma } => k * gamma * rho.powf(gamma - 1.0) / (gamma - 1.0),
        }
    }

    /// `F''(ρ) = P'(ρ)/ρ`.
    pub fn energy_density_second(&self, rho: f64) -> f64 {
        self.pressure_prime(rho) / rho
    }

    pub fn sound_speed(&self, rho: f64) -> f64 {
        self.pressure_prime(rho).max(0.0).sqrt()
    }

    /// `μ(ρ) = ρ^{3/2} √κ(ρ)`.
    pub fn mu(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(rho * rho.sqrt() * self.kappa(rho).max(0.0).sqrt())
    }

    /// Inverse of `F'`: the density with `F'(ρ) = slope`.
    pub fn density_from_energy_slope(&self, slope: f64) -> Result<f64> {
        let rho = match self.pressure_law {
            PressureLaw::ShallowWater { g } => slope / g,
            PressureLaw::Polytropic { k, gamma } => {
                if slope <= 0.0 || k <= 0.0 {
                    return Err(Error::SegmentVacuum);
                }
                (slope * (gamma - 1.0) / (k * gamma)).powf(1.0 / (gamma - 1.0))
            }
            PressureLaw::LiuGollub { froude_sq } => {
                if slope <= 0.0 {
                    return Err(Error::SegmentVacuum);
                }
                // F' is increasing and convex on ρ > 0; Newton from above converges monotonically.
                let mut rho = (slope * froude_sq).max((10.0 * slope).powf(0.25));
                for _ in 0..100 {
                    let f = rho / froude_sq + 0.1 * rho.powi(4) - slope;
                    let df = 1.0 / froude_sq + 0.4 * rho.powi(3);
                    let step = f / df;
                    rho -= step;
                    if step.abs() <= 1e-15 * rho {
                        break;
                    }
                }
                rho
            }
        };
        if rho > 0.0 && rho.is_finite() {
            Ok(rho)
        } else {
            Err(Error::SegmentVacuum)
        }
    }

    /// Largest violation of `ρF'(ρ) − F(ρ) = P(ρ)`, relative to `max(|P|, tiny)`,
    /// over `n` samples in `(0, rho_max]`.
    pub fn closure_defect(&self, rho_max: f64, n: usize) -> f64 {
        (1..=n)
            .map(|i| {
                let rho = rho_max * i as f64 / n as f64;
                let p = self.pressure(rho);
                let lhs = rho * self.energy_density_prime(rho) - self.energy_density(rho);
                (lhs - p).abs() / p.abs().max(1e-300)
            })
            .fold(0.0, f64::max)
    }

    /// `U(v) = ρ(u² + w²)/2 + F(ρ)`.
    pub fn entropy(&self, v: &Conserved) -> Result<f64> {
        let [rho, m, s] = *v;
        check_density(rho)?;
        Ok(0.5 * (m * m + s * s) / rho + self.energy_density(rho))
    }

    /// `z = (F'(ρ) − (u² + w²)/2, u, w)`.
    pub fn entropy_variables(&self, v: &Conserved) -> Result<EntropyVariables> {
        let [rho, m, s] = *v;
        check_density(rho)?;
        let (u, w) = (m / rho, s / rho);
        Ok(EntropyVariables([self.energy_density_prime(rho) - 0.5 * (u * u + w * w), u, w]))
    }

    /// Inverse map `v(z)`.
    pub fn conserved_from_entropy_variables(&self, z: &EntropyVariables) -> Result<Conserved> {
        let rho = self.density_from_energy_slope(z.energy_slope())?;
        Ok([rho, rho * z.u(), rho * z.w()])
    }

    /// `f(v) = (ρu, ρu² + P(ρ), ρuw)`.
    pub fn convective_flux(&self, v: &Conserved) -> Result<Vec3> {
        let [rho, m, s] = *v;
        check_density(rho)?;
        let u = m / rho;
        Ok([m, m * u + self.pressure(rho), s * u])
    }

    /// `∇_v f(v)`; its eigenvalues are `u, u ± c`.
    pub fn flux_jacobian(&self, v: &Conserved) -> Result<Mat3> {
        let [rho, m, s] = *v;
        check_density(rho)?;
        let (u, w) = (m / rho, s / rho);
        Ok([
            [0.0, 1.0, 0.0],
            [self.pressure_prime(rho) - u * u, 2.0 * u, 0.0],
            [-u * w, w, u],
        ])
    }

    /// Spectral radius of `∇_v f(v)`, `|u| + c`.
    pub fn spectral_radius(&self, v: &Conserved) -> Result<f64> {
        let [rho, m, _] = *v;
        check_density(rho)?;
        Ok((m / rho).abs() + self.sound_speed(rho))
    }

    /// `∇²_v U(v)`.
    pub fn entropy_hessian(&self, v: &Conserved) -> Result<Mat3> {
        let [rho, m, s] = *v;
        check_density(rho)?;
        let (u, w) = (m / rho, s / rho);
        let inv = 1.0 / rho;
        Ok([
            [(u * u + w * w) * inv + self.energy_density_second(rho), -u * inv, -w * inv],
            [-u * inv, inv, 0.0],
            [-w * inv, 0.0, inv],
        ])
    }

    /// `∇_z v(z)`, the inverse of the entropy Hessian.
    pub fn conserved_jacobian_z(&self, z: &EntropyVariables) -> Result<Mat3> {
        let rho = self.density_from_energy_slope(z.energy_slope())?;
        let (u, w) = (z.u(), z.w());
        let a = rho / self.pressure_prime(rho);
        Ok([
            [a, a * u, a * w],
            [a * u, a * u * u + rho, a * u * w],
            [a * w, a * u * w, a * w * w + rho],
        ])
    }

    /// `g(z) = f(v(z))`.
    pub fn flux_of_entropy_variables(&self, z: &EntropyVariables) -> Result<Vec3> {
        self.convective_flux(&self.conserved_from_entropy_variables(z)?)
    }

    /// `∇_z g(z) = ∇_v f · ∇_z v`, symmetric.
    pub fn flux_jacobian_z(&self, z: &EntropyVariables) -> Result<Mat3> {
        let rho = self.density_from_energy_slope(z.energy_slope())?;
        let (u, w) = (z.u(), z.w());
        let c2 = self.pressure_prime(rho);
        let a = rho / c2;
        let b = a * (u * u + c2);
        Ok([
            [a * u, a * u * u + rho, a * u * w],
            [b, b * u + 2.0 * rho * u, b * w],
            [a * u * w, a * u * u * w + rho * w, a * u * w * w + rho * u],
        ])
    }

    /// Entropy flux of the convective part, `G₀(v) = u (U(v) + P(ρ))`.
    pub fn entropy_flux(&self, v: &Conserved) -> Result<f64> {
        let u = v[1] / v[0];
        Ok(u * (self.entropy(v)? + self.pressure(v[0])))
    }

    /// Entropy potential `ψ(z) = ⟨z, g(z)⟩ − G₀(v(z))`.
    pub fn entropy_potential(&self, z: &EntropyVariables) -> Result<f64> {
        let v = self.conserved_from_entropy_variables(z)?;
        let g = self.convective_flux(&v)?;
        Ok(crate::linalg::dot(&z.0, &g) - self.entropy_flux(&v)?)
    }

    /// Shallow water with surface tension: `P = F = g h²/2`, constant `κ`.
    pub fn shallow_water(g: f64, kappa: f64) -> Self {
        Self::new(PressureLaw::ShallowWater { g }, Capillarity::Constant(kappa))
    }

    /// Thin-film law of the falling-film model with capillarity `κ = ε/We`.
    pub fn liu_gollub(froude_sq: f64, kappa: f64) -> Self {
        Self::new(PressureLaw::LiuGollub { froude_sq }, Capillarity::Constant(kappa))
    }
}

/// Builds `w` from a density profile with centered differences:
/// `w_j = √κ(ρ_j)/√ρ_j · (ρ_{j+1} − ρ_{j−1})/(2δx)`.
///
/// With `periodic = false` the end cells use one-sided differences.
pub fn w_from_density(model: &FluidModel, rho: &[f64], dx: f64, periodic: bool) -> Result<Vec<f64>> {
    let n = rho.len();
    if let Some(&bad) = rho.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::NonPositiveDensity { value: bad });
    }
    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        let grad = if n < 2 {
            0.0
        } else if periodic {
            (rho[(j + 1) % n] - rho[(j + n - 1) % n]) / (2.0 * dx)
        } else if j == 0 {
            (rho[1] - rho[0]) / dx
        } else if j == n - 1 {
            (rho[n - 1] - rho[n - 2]) / dx
        } else {
            (rho[j + 1] - rho[j - 1]) / (2.0 * dx)
        };
        w.push(model.kappa(rho[j]).max(0.0).sqrt() / rho[j].sqrt() * grad);
    }
    Ok(w)
}
