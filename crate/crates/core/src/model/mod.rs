//! The symmetric hyperbolic system `∂_t U + A(∂_x)U/ε + A₀U/ε² = B(U,U)`,
//! its smooth spectral decomposition and the structural condition checkers,
//! with the Klein-Gordon instantiation in closed form.

mod conditions;
mod decomposition;
mod harmonics;
mod system;

pub use conditions::{check_conditions, ConditionReport, ConditionResult};
pub use decomposition::{
    kg_spectral_decomposition, numerical_decomposition, SpectralDecomposition,
};
pub use harmonics::{harmonic_projector, kg_cascade_generator, HarmonicProjector};
pub use system::{kg_system, BilinearForm, HyperbolicSystem};
