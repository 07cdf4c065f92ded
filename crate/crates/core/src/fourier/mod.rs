//! Periodic grids, spectral fields and Fourier multiplier calculus.

mod fft;
mod field;
mod grid;
pub mod io;
mod ops;
mod symbol;

pub use field::{Field, SpectralField};
pub use grid::Grid;
pub use ops::{
    apply_multiplier, commutator_apply, dealias_two_thirds, operator_norm_probe,
    random_band_limited, sobolev_norm,
};
pub use symbol::{MatrixSymbol, SymbolTable};
