//! Von Neumann analysis of the linearized Euler–Korteweg schemes.
//!
//! Linearizing about `(ρ̄, ρ̄ū)` gives `∂t v + A ∂x v = B ∂xxx v` with
//! `A = [[0, 1], [c̄² − ū², 2ū]]` and `B = [[0, 0], [σ̄, 0]]`. A semi-discrete
//! scheme acts on a Fourier mode as `dv̂/dt = iξ M(ξ, δx) v̂` with
//! `ξ = 2 sin(θ/2)/δx ∈ [−2/δx, 2/δx]`; a time integrator then turns each
//! eigenvalue `Λ` of `M` into a scalar amplification factor.

#[allow(unused_imports)]
use crate::prelude::*;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::linalg::{complex_eigenvalues2, eigenvalues2, CMat2, Mat2};
use crate::model::FluidModel;
use crate::{Error, Result};

/// One-step growth allowed before a scan is declared unstable.
pub const GROWTH_TOLERANCE: f64 = 1e-10;

/// Default number of wavenumbers in a scan, endpoints `±2/δx` included.
pub const DEFAULT_SCAN_POINTS: usize = 2049;

/// Constant state of the linearization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearizedSetup {
    pub rho_bar: f64,
    pub u_bar: f64,
    /// `c̄ = √P'(ρ̄)`
    pub c_bar: f64,
    /// `σ̄ = ρ̄ κ(ρ̄)`
    pub sigma_bar: f64,
}

impl LinearizedSetup {
    /// Setup given directly by its wave parameters; `ρ̄` is left at 1.
    pub fn from_parameters(c_bar: f64, u_bar: f64, sigma_bar: f64) -> Result<Self> {
        if !(c_bar > 0.0) {
            return Err(Error::DegenerateState);
        }
        if !(sigma_bar >= 0.0) {
            return Err(Error::Domain("sigma_bar must be non-negative"));
        }
        Ok(Self { rho_bar: 1.0, u_bar, c_bar, sigma_bar })
    }

    pub fn from_model(model: &FluidModel, rho_bar: f64, u_bar: f64) -> Result<Self> {
        if !(rho_bar > 0.0) {
            return Err(Error::NonPositiveDensity { value: rho_bar });
        }
        let c_bar = model.sound_speed(rho_bar);
        if !(c_bar > 0.0) {
            return Err(Error::DegenerateState);
        }
        Ok(Self { rho_bar, u_bar, c_bar, sigma_bar: rho_bar * model.kappa(rho_bar) })
    }

    pub fn matrix_a(&self) -> Mat2 {
        let (u, c) = (self.u_bar, self.c_bar);
        [[0.0, 1.0], [c * c - u * u, 2.0 * u]]
    }

    pub fn matrix_b(&self) -> Mat2 {
        [[0.0, 0.0], [self.sigma_bar, 0.0]]
    }

    /// `ρ(A) = |ū| + c̄`.
    pub fn spectral_radius(&self) -> f64 {
        self.u_bar.abs() + self.c_bar
    }

    /// `|A| = R |Λ| R⁻¹`, written out entrywise.
    pub fn godunov_abs_a(&self) -> Result<Mat2> {
        let (u, c) = (self.u_bar, self.c_bar);
        if c == 0.0 {
            return Err(Error::DegenerateState);
        }
        let (ap, am) = ((u + c).abs(), (u - c).abs());
        let k = 1.0 / (2.0 * c);
        Ok([
            [k * (am * (u + c) - ap * (u - c)), k * (ap - am)],
            [k * (c * c - u * u) * (ap - am), k * (ap * (u + c) - am * (u - c))],
        ])
    }
}

/// Viscosity part `Q` of a first-order or MUSCL linear scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Viscosity {
    /// `Q = Id`, i.e. `q = 1/λ₁`.
    LaxFriedrichs,
    /// `Q = Id/2`.
    ModifiedLaxFriedrichs,
    /// `Q = λ₁ ρ(A) Id`.
    Rusanov,
    /// `Q = λ₁ |A|`.
    GodunovRoe,
    /// `Q = 0`.
    None,
    /// `Q = λ₁ q Id` for a user-given `q ≥ 0`.
    Scalar(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    /// Three-point flux differences with the five-point capillary stencil.
    FirstOrder,
    /// Unlimited MUSCL reconstruction of the first-order part.
    Muscl,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialScheme {
    pub viscosity: Viscosity,
    pub stencil: Stencil,
}

impl SpatialScheme {
    pub const LAX_FRIEDRICHS: Self = Self::first_order(Viscosity::LaxFriedrichs);
    pub const MODIFIED_LF: Self = Self::first_order(Viscosity::ModifiedLaxFriedrichs);
    pub const RUSANOV: Self = Self::first_order(Viscosity::Rusanov);
    pub const GODUNOV_ROE: Self = Self::first_order(Viscosity::GodunovRoe);
    pub const CENTERED: Self = Self::first_order(Viscosity::None);
    pub const MUSCL_LF: Self = Self::muscl(Viscosity::LaxFriedrichs);
    pub const MUSCL_RUSANOV: Self = Self::muscl(Viscosity::Rusanov);
    pub const MUSCL_CENTERED: Self = Self::muscl(Viscosity::None);

    pub const fn first_order(viscosity: Viscosity) -> Self {
        Self { viscosity, stencil: Stencil::FirstOrder }
    }

    pub const fn muscl(viscosity: Viscosity) -> Self {
        Self { viscosity, stencil: Stencil::Muscl }
    }

    /// Parses the short names used on the command line
    /// (`lf`, `mlf`, `rusanov`, `godunov`, `centered`, with an optional `muscl-` prefix).
    pub fn parse(name: &str) -> Option<Self> {
        let (stencil, rest) = match name.strip_prefix("muscl-") {
            Some(rest) => (Stencil::Muscl, rest),
            None => (Stencil::FirstOrder, name),
        };
        let viscosity = match rest {
            "lf" | "lax_friedrichs" => Viscosity::LaxFriedrichs,
            "mlf" | "modified_lf" => Viscosity::ModifiedLaxFriedrichs,
            "rusanov" => Viscosity::Rusanov,
            "godunov" | "godunov_roe" | "roe" => Viscosity::GodunovRoe,
            "centered" => Viscosity::None,
            _ => return None,
        };
        Some(Self { viscosity, stencil })
    }

    /// Scalar `q` with `Q = λ₁ q Id`, or `None` for the Godunov matrix viscosity.
    pub fn scalar_q(&self, setup: &LinearizedSetup, lambda1: f64) -> Option<f64> {
        match self.viscosity {
            Viscosity::LaxFriedrichs => Some(1.0 / lambda1),
            Viscosity::ModifiedLaxFriedrichs => Some(0.5 / lambda1),
            Viscosity::Rusanov => Some(setup.spectral_radius()),
            Viscosity::GodunovRoe => None,
            Viscosity::None => Some(0.0),
            Viscosity::Scalar(q) => Some(q),
        }
    }

    pub fn viscosity_matrix(&self, setup: &LinearizedSetup, dx: f64, dt: f64) -> Result<Mat2> {
        let lambda1 = dt / dx;
        match self.scalar_q(setup, lambda1) {
            Some(q) => {
                let d = lambda1 * q;
                Ok([[d, 0.0], [0.0, d]])
            }
            None => {
                let a = setup.godunov_abs_a()?;
                Ok([[lambda1 * a[0][0], lambda1 * a[0][1]], [lambda1 * a[1][0], lambda1 * a[1][1]]])
            }
        }
    }
}

/// Time integrator of the semi-discrete Fourier system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TemporalScheme {
    ForwardEuler,
    BackwardEuler,
    Theta(f64),
    RungeKutta2,
    CrankNicolson,
}

impl TemporalScheme {
    /// `Θ` of the equivalent Θ-scheme, `None` for Runge–Kutta.
    pub fn theta(&self) -> Option<f64> {
        match *self {
            TemporalScheme::ForwardEuler => Some(0.0),
            TemporalScheme::BackwardEuler => Some(1.0),
            TemporalScheme::Theta(t) => Some(t),
            TemporalScheme::CrankNicolson => Some(0.5),
            TemporalScheme::RungeKutta2 => None,
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fe" => Some(Self::ForwardEuler),
            "be" => Some(Self::BackwardEuler),
            "rk2" => Some(Self::RungeKutta2),
            "cn" => Some(Self::CrankNicolson),
            other => other
                .strip_prefix("theta=")
                .or_else(|| other.strip_prefix("theta:"))
                .and_then(|t| t.parse().ok())
                .filter(|t: &f64| (0.0..=1.0).contains(t))
                .map(Self::Theta),
        }
    }
}

fn zeta(xi: f64, dx: f64) -> Result<f64> {
    let s = xi * dx / 2.0;
    if s.abs() > 1.0 + 1e-12 {
        return Err(Error::Domain("|xi| > 2/dx"));
    }
    Ok((1.0 - s * s).max(0.0).sqrt())
}

fn to_complex(re: &Mat2, im: &Mat2) -> CMat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = Complex64::new(re[i][j], im[i][j]);
        }
    }
    out
}

/// `M = ζ(A + ξ²B) + iξ (δx²/(2δt)) Q`; the update symbol is `iξM`.
pub fn first_order_symbol(
    setup: &LinearizedSetup,
    scheme: &SpatialScheme,
    xi: f64,
    dx: f64,
    dt: f64,
) -> Result<CMat2> {
    let z = zeta(xi, dx)?;
    let (a, b) = (setup.matrix_a(), setup.matrix_b());
    let q = scheme.viscosity_matrix(setup, dx, dt)?;
    let mut re = [[0.0; 2]; 2];
    let mut im = [[0.0; 2]; 2];
    let visc = xi * dx * dx / (2.0 * dt);
    for i in 0..2 {
        for j in 0..2 {
            re[i][j] = z * (a[i][j] + xi * xi * b[i][j]);
            im[i][j] = visc * q[i][j];
        }
    }
    Ok(to_complex(&re, &im))
}

/// `𝓜 = ζ((1 + ξ²δx²/4)A + ξ²B) + iξ (ξ²δx⁴/(16δt)) Q` for the unlimited MUSCL stencil.
pub fn muscl_symbol(
    setup: &LinearizedSetup,
    scheme: &SpatialScheme,
    xi: f64,
    dx: f64,
    dt: f64,
) -> Result<CMat2> {
    let z = zeta(xi, dx)?;
    let (a, b) = (setup.matrix_a(), setup.matrix_b());
    let q = scheme.viscosity_matrix(setup, dx, dt)?;
    let stretch = 1.0 + xi * xi * dx * dx / 4.0;
    let visc = xi * xi * xi * dx.powi(4) / (16.0 * dt);
    let mut re = [[0.0; 2]; 2];
    let mut im = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            re[i][j] = z * (stretch * a[i][j] + xi * xi * b[i][j]);
            im[i][j] = visc * q[i][j];
        }
    }
    Ok(to_complex(&re, &im))
}

/// Symbol of `scheme`, dispatching on its stencil.
pub fn symbol(setup: &LinearizedSetup, scheme: &SpatialScheme, xi: f64, dx: f64, dt: f64) -> Result<CMat2> {
    match scheme.stencil {
        Stencil::FirstOrder => first_order_symbol(setup, scheme, xi, dx, dt),
        Stencil::Muscl => muscl_symbol(setup, scheme, xi, dx, dt),
    }
}

/// Eigenvalues of `symbol` computed from the assembled matrix.
pub fn symbol_eigenvalues(
    setup: &LinearizedSetup,
    scheme: &SpatialScheme,
    xi: f64,
    dx: f64,
    dt: f64,
) -> Result<[Complex64; 2]> {
    Ok(complex_eigenvalues2(&symbol(setup, scheme, xi, dx, dt)?))
}

/// Closed form `Λ± = ζ(ū ± √(c̄² + σ̄ξ²)) + i(ξδx/2) q` for `Q = λ₁ q Id`.
pub fn lf_family_eigenvalues(setup: &LinearizedSetup, q: f64, xi: f64, dx: f64) -> Result<[Complex64; 2]> {
    let z = zeta(xi, dx)?;
    let root = (setup.c_bar * setup.c_bar + setup.sigma_bar * xi * xi).sqrt();
    let im = xi * dx / 2.0 * q;
    Ok([
        Complex64::new(z * (setup.u_bar - root), im),
        Complex64::new(z * (setup.u_bar + root), im),
    ])
}

/// Closed form of the MUSCL eigenvalues for `Q = λ₁ q Id`:
/// `Λ± = ζ(2 − ζ²)(ū ± √(c̄² + σ̄ξ²/(2 − ζ²))) + i q (ξδx/4)(1 − ζ²)`.
pub fn muscl_lf_family_eigenvalues(setup: &LinearizedSetup, q: f64, xi: f64, dx: f64) -> Result<[Complex64; 2]> {
    let z = zeta(xi, dx)?;
    let s = 2.0 - z * z;
    let root = (setup.c_bar * setup.c_bar + setup.sigma_bar * xi * xi / s).sqrt();
    let im = q * xi * dx / 4.0 * (1.0 - z * z);
    Ok([
        Complex64::new(z * s * (setup.u_bar - root), im),
        Complex64::new(z * s * (setup.u_bar + root), im),
    ])
}

/// Leading-order large-|ξ| behaviour of `ξ I±` for the Godunov/Roe viscosity:
/// `±ξ|ξ|(√(σ̄²ζ⁴ + 2σ̄ζ√(1 − ζ²)|A|₁₂) − σ̄ζ²)`. Diagnostic only.
pub fn godunov_asymptotic_xi_imag(setup: &LinearizedSetup, xi: f64, dx: f64) -> Result<[f64; 2]> {
    let z = zeta(xi, dx)?;
    let a12 = setup.godunov_abs_a()?[0][1];
    let s = setup.sigma_bar;
    let mag = xi * xi.abs() * ((s * s * z.powi(4) + 2.0 * s * z * (1.0 - z * z).sqrt() * a12).sqrt() - s * z * z);
    Ok([-mag, mag])
}

/// Modulus of the scalar update factor for an eigenvalue `Λ` of the symbol.
pub fn amplification(temporal: &TemporalScheme, lambda: Complex64, xi: f64, dt: f64) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let x = Complex64::new(0.0, xi * dt) * lambda;
    match *temporal {
        TemporalScheme::RungeKutta2 => Ok((one + x + x * x * 0.5).norm()),
        other => {
            let theta = other.theta().unwrap_or(0.0);
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::Domain("theta must lie in [0, 1]"));
            }
            let den = (one - x * theta).norm();
            if den == 0.0 {
                return Err(Error::SingularResolvent);
            }
            Ok((one + x * (1.0 - theta)).norm() / den)
        }
    }
}

/// One wavenumber of a stability scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub xi: f64,
    /// Eigenvalues ordered by real part: `[Λ−, Λ+]`.
    pub eigenvalues: [Complex64; 2],
    pub amplification: [f64; 2],
}

impl ScanRow {
    /// `ξ I±`, which must be non-negative for stability.
    pub fn xi_imag(&self) -> [f64; 2] {
        [self.xi * self.eigenvalues[0].im, self.xi * self.eigenvalues[1].im]
    }

    fn necessary_condition_holds(&self) -> bool {
        self.eigenvalues.iter().all(|l| {
            let tol = 1e-12 * (self.xi.abs() * l.norm()).max(f64::MIN_POSITIVE);
            self.xi * l.im >= -tol
        })
    }
}

/// Outcome of a scan over `ξ ∈ [−2/δx, 2/δx]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub max_amplification: f64,
    pub worst_xi: f64,
    pub scanned_points: usize,
    /// `ξ I±(ξ) ≥ 0` at every scanned wavenumber.
    pub necessary_condition: bool,
    /// Most negative `ξ I±` seen (0 when the condition holds everywhere).
    pub min_xi_imag: f64,
}

/// Evaluates both eigenvalue branches on `n_xi` uniform wavenumbers, endpoints included.
pub fn scan(
    setup: &LinearizedSetup,
    spatial: &SpatialScheme,
    temporal: &TemporalScheme,
    dx: f64,
    dt: f64,
    n_xi: usize,
) -> Result<Vec<ScanRow>> {
    if n_xi < 64 {
        return Err(Error::Domain("a scan needs at least 64 wavenumbers"));
    }
    if !(dx > 0.0 && dt > 0.0) {
        return Err(Error::Domain("dx and dt must be positive"));
    }
    let xi_max = 2.0 / dx;
    (0..n_xi)
        .map(|k| {
            let xi = if k == n_xi - 1 { xi_max } else { -xi_max + 2.0 * xi_max * k as f64 / (n_xi - 1) as f64 };
            let eigenvalues = symbol_eigenvalues(setup, spatial, xi, dx, dt)?;
            let amplification = [
                amplification(temporal, eigenvalues[0], xi, dt)?,
                amplification(temporal, eigenvalues[1], xi, dt)?,
            ];
            Ok(ScanRow { xi, eigenvalues, amplification })
        })
        .collect()
}

/// Reduces scan rows to a verdict.
pub fn verdict(rows: &[ScanRow]) -> StabilityVerdict {
    let mut v = StabilityVerdict {
        stable: true,
        max_amplification: 0.0,
        worst_xi: 0.0,
        scanned_points: rows.len(),
        necessary_condition: true,
        min_xi_imag: 0.0,
    };
    for row in rows {
        for (g, xi_i) in row.amplification.iter().zip(row.xi_imag()) {
            if *g > v.max_amplification || g.is_nan() {
                v.max_amplification = *g;
                v.worst_xi = row.xi;
            }
            v.min_xi_imag = v.min_xi_imag.min(xi_i);
        }
        v.necessary_condition &= row.necessary_condition_holds();
    }
    v.stable = v.max_amplification <= 1.0 + GROWTH_TOLERANCE;
    v
}

pub fn stability_scan(
    setup: &LinearizedSetup,
    spatial: &SpatialScheme,
    temporal: &TemporalScheme,
    dx: f64,
    dt: f64,
    n_xi: usize,
) -> Result<StabilityVerdict> {
    Ok(verdict(&scan(setup, spatial, temporal, dx, dt, n_xi)?))
}

/// Both branches of the first-order Rusanov Θ-scheme bound:
/// `(|ū|δx + √(c̄²δx² + 4σ̄))² λ₃ ≤ 2ρ(A)/(1 − 2Θ)` and `ρ(A)² λ₁ ≤ 2ρ(A)/(1 − 2Θ)`,
/// each solved for δt.
pub fn rusanov_bound_branches(setup: &LinearizedSetup, theta: f64, dx: f64) -> (f64, f64) {
    if theta >= 0.5 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let rho_a = setup.spectral_radius();
    let rhs = 2.0 * rho_a / (1.0 - 2.0 * theta);
    let x = setup.u_bar.abs() * dx + (setup.c_bar * setup.c_bar * dx * dx + 4.0 * setup.sigma_bar).sqrt();
    (rhs * dx.powi(3) / (x * x), rhs * dx / (rho_a * rho_a))
}

/// Largest δt allowed by the closed-form sufficient CFL conditions, `+∞` when
/// the combination is unconditionally stable and `0` when it is never stable.
pub fn cfl_bound_closed_form(
    setup: &LinearizedSetup,
    spatial: &SpatialScheme,
    temporal: &TemporalScheme,
    dx: f64,
) -> Result<f64> {
    let (u, c, s) = (setup.u_bar.abs(), setup.c_bar, setup.sigma_bar);
    match (spatial.stencil, temporal.theta()) {
        (_, _) if spatial.viscosity == Viscosity::GodunovRoe => Ok(0.0),
        (Stencil::FirstOrder, Some(theta)) => {
            if theta >= 0.5 {
                return Ok(f64::INFINITY);
            }
            let k = 1.0 - 2.0 * theta;
            match spatial.viscosity {
                Viscosity::LaxFriedrichs => Ok((2.0 / k).sqrt() / ((u + c) / dx + 2.0 * s.sqrt() / (dx * dx))),
                Viscosity::ModifiedLaxFriedrichs => {
                    Ok((1.0 / k).sqrt() / ((u + c) / dx + 2.0 * s.sqrt() / (dx * dx)))
                }
                Viscosity::Rusanov => {
                    let (dispersive, hyperbolic) = rusanov_bound_branches(setup, theta, dx);
                    Ok(dispersive.min(hyperbolic))
                }
                Viscosity::Scalar(q) if q > 0.0 => {
                    let x = u + (c * c + 4.0 * s / (dx * dx)).sqrt();
                    Ok(2.0 * q * dx / (k * (x * x).max(q * q)))
                }
                Viscosity::Scalar(_) | Viscosity::None => Ok(0.0),
                Viscosity::GodunovRoe => unreachable!(),
            }
        }
        (Stencil::Muscl, Some(theta)) if theta >= 0.5 => Ok(f64::INFINITY),
        (Stencil::Muscl, None) => match spatial.viscosity {
            Viscosity::LaxFriedrichs => Ok(dx / (u + (c * c + 2.0 * s / (dx * dx)).sqrt())),
            Viscosity::Rusanov => {
                if s <= 0.0 {
                    return Err(Error::Domain("the MUSCL-Rusanov asymptotic bound needs sigma_bar > 0"));
                }
                let coef = ((u + c).sqrt() / s).powf(2.0 / 3.0) * 7.0_f64.powf(7.0 / 6.0) * 3.0_f64.sqrt() / 24.0;
                Ok(coef * dx.powf(7.0 / 3.0))
            }
            Viscosity::None => Ok(0.0),
            _ => Err(Error::InvalidConfig("no closed-form bound for this MUSCL viscosity")),
        },
        _ => Err(Error::InvalidConfig("no closed-form bound for this scheme combination")),
    }
}

/// How a critical-δt search ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalStatus {
    /// The verdict flips inside the bracket.
    Bracketed,
    /// Unstable already at the bottom of the bracket.
    NeverStable,
    /// Stable at the top of the bracket.
    StableThroughout,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalDt {
    /// Largest δt found stable (0 for [`CriticalStatus::NeverStable`]).
    pub dt: f64,
    pub status: CriticalStatus,
    /// All sampled δt below `dt` were stable.
    pub monotone: bool,
}

/// Bracket `[1e-12 δx², 10 δx]` of the critical-δt search.
pub fn bisection_bracket(dx: f64) -> (f64, f64) {
    (1e-12 * dx * dx, 10.0 * dx)
}

/// Bisects (geometrically) on δt until the scan verdict flips; the final
/// bracket satisfies `hi − lo ≤ rel_tol · lo`.
///
/// A δt counts as stable when the amplification stays within
/// [`GROWTH_TOLERANCE`] and the necessary condition `ξ I± ≥ 0` holds. The
/// second test matters at tiny δt, where a growth rate of order `δt/δx` per
/// step hides below the tolerance.
pub fn critical_dt_bisection(
    setup: &LinearizedSetup,
    spatial: &SpatialScheme,
    temporal: &TemporalScheme,
    dx: f64,
    rel_tol: f64,
    n_xi: usize,
) -> Result<CriticalDt> {
    let stable = |dt: f64| stability_scan(setup, spatial, temporal, dx, dt, n_xi).map(|v| v.stable && v.necessary_condition);
    let (bottom, top) = bisection_bracket(dx);
    if !stable(bottom)? {
        return Ok(CriticalDt { dt: 0.0, status: CriticalStatus::NeverStable, monotone: true });
    }
    if stable(top)? {
        return Ok(CriticalDt { dt: top, status: CriticalStatus::StableThroughout, monotone: true });
    }
    let (mut lo, mut hi) = (bottom, top);
    while hi - lo > rel_tol * lo {
        let mid = (lo * hi).sqrt();
        if stable(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut monotone = true;
    let samples = 16;
    for k in 0..samples {
        let t = bottom * (lo / bottom).powf(k as f64 / samples as f64);
        if !stable(t)? {
            monotone = false;
            break;
        }
    }
    Ok(CriticalDt { dt: lo, status: CriticalStatus::Bracketed, monotone })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fitted_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Eigenvalues of `A`, `ū ± c̄`.
pub fn wave_speeds(setup: &LinearizedSetup) -> [Complex64; 2] {
    eigenvalues2(&setup.matrix_a())
}
