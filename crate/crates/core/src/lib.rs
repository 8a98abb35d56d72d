//! Numerics for the one-dimensional Euler–Korteweg system
//!
//! ```text
//! ∂t ρ + ∂x(ρu) = 0
//! ∂t(ρu) + ∂x(ρu² + P(ρ)) = ∂x(ρκ(ρ)∂xxρ + (ρκ'(ρ) − κ(ρ))(∂xρ)²/2)
//! ```
//!
//! and its capillary shallow-water specialization. The crate is `no_std`
//! (it needs `alloc`) and contains only pure computation:
//!
//! * [`model`]: equations of state, entropy pair, entropy variables and the
//!   extended unknown `w = √κ(ρ) ∂xρ / √ρ`.
//! * [`vn_stability`]: Fourier symbols of the linearized schemes,
//!   amplification factors, stability scans and CFL bounds.
//! * [`flux`]: numerical fluxes in viscosity form, the entropy-conservative
//!   flux, numerical entropy fluxes and MUSCL reconstruction.
//! * [`ek_solver`]: time integration of the extended system.
//! * [`hamiltonian`]: the structure-preserving semi-discretization in `(ρ, u)`.
//!
//! IO, configuration and the command line live in the companion `korteweg-lab`
//! crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ek_solver;
mod error;
pub mod flux;
pub mod hamiltonian;
pub mod linalg;
pub mod model;
pub mod newton;
pub mod quadrature;
pub mod vn_stability;

pub use error::{Error, Result};

/// Float methods resolve to std when it is linked and to libm otherwise.
mod prelude {
    #[allow(unused_imports)]
    pub(crate) use num_traits::Float;
}
pub use ek_solver::ConservedState;
pub use model::{Capillarity, Conserved, EntropyVariables, FluidModel, PressureLaw};
