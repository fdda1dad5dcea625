//! Numerical lab for the fractional KP-I equation
//!
//! ```text
//! ∂ₜu − D_x^α ∂ₓu − ∂ₓ⁻¹∂ᵧ²u = u ∂ₓu,   2 ≤ α < 4
//! ```
//!
//! Fields live on a periodic box and are stored as Fourier coefficients
//! ([`spectral`]). Symbols of the linear flow and the three-wave resonance
//! function are in [`symbols`]; time stepping, Picard iterates and the
//! continuum second-iterate quadrature in [`evolution`]; conserved
//! quantities and norms in [`norms`]; estimate probes in [`probes`]; and the
//! batch runner behind the `fkpi-lab` binary in [`runner`].

pub mod error;
pub mod evolution;
pub mod norms;
pub mod probes;
pub mod quadrature;
pub mod runner;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};
