//! Pseudospectral toolkit for highly oscillatory symmetric hyperbolic systems.
//!
//! The crate provides the building blocks used by the `semiwave` command line
//! tool to study the non-relativistic (Klein-Gordon to Schrödinger) limit at
//! desk scale:
//!
//! * [`fourier`] — periodic grids, FFT-backed fields, classical and
//!   semiclassical Fourier multipliers, discrete Sobolev norms and
//!   commutators.
//! * [`model`] — the abstract symmetric hyperbolic system
//!   `∂_t U + A(∂_x)U/ε + A₀U/ε² = B(U,U)`, its smooth spectral
//!   decomposition, harmonic projectors and structural condition checkers,
//!   plus the Klein-Gordon instantiation with closed-form eigendata.
//! * [`wkb`] — the Schrödinger envelope, the two-scale approximate solution
//!   it drives, and residual measurements.
//! * [`resonance`] — resonance sets, transparency exponents, singular
//!   localization of the leading coupling operator and the normal-form
//!   operators with their defect measurements.
//! * [`solver`] — Strang/Lie splitting time integration with the stiff
//!   linear part advanced exactly in Fourier space.
//! * [`experiments`] — configuration, report writers and the five
//!   experiment drivers behind the CLI subcommands.

pub mod error;
pub mod experiments;
pub mod fit;
pub mod fourier;
pub mod model;
pub mod resonance;
pub mod solver;
pub mod wkb;

pub use error::{Error, Result};
