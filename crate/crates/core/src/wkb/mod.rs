//! Two-scale approximate solutions for the Klein-Gordon system.
//!
//! The leading amplitude is a free Schrödinger envelope `g₀` with
//! `2i ∂_t g₀ + Δg₀ = 0`; everything else in the approximate solution
//!
//! `U_a(t) = Σ_{n=0}^{3} εⁿ Σ_p e^{−ipt/ε²} U_{n,p}(t)`
//!
//! is determined by `g₀` in closed form. The module constructs the
//! amplitudes, evaluates `U_a` and its exact time derivative, and measures
//! the residual of `U_a` in the full system two independent ways.

mod envelope;
mod solution;

pub use envelope::Envelope;
pub use solution::{
    boundary_mass_fraction, kg_initial_state, ResidualReport, WkbSolution,
};

use crate::fourier::{Field, SpectralField};
use num_complex::Complex64;

/// Spectral gradient: `∂_{x_a} g` for a scalar field, one field per axis.
pub(crate) fn grad_spectral(sf: &SpectralField) -> Vec<SpectralField> {
    let grid = sf.grid().clone();
    let n = grid.point_count();
    let mut xi = vec![0.0; grid.dim()];
    (0..grid.dim())
        .map(|axis| {
            let mut out = SpectralField::zeros(grid.clone(), 1);
            for mode in 0..n {
                if grid.mode_has_nyquist(mode) {
                    continue;
                }
                grid.frequency_vector(mode, &mut xi);
                out.coeffs_mut()[mode] =
                    sf.coeffs()[mode] * Complex64::new(0.0, xi[axis]);
            }
            out
        })
        .collect()
}

/// Spectral Laplacian of a scalar field.
pub(crate) fn laplacian_spectral(sf: &SpectralField) -> SpectralField {
    let grid = sf.grid().clone();
    let n = grid.point_count();
    let mut xi = vec![0.0; grid.dim()];
    let mut out = SpectralField::zeros(grid.clone(), 1);
    for mode in 0..n {
        if grid.mode_has_nyquist(mode) {
            continue;
        }
        grid.frequency_vector(mode, &mut xi);
        let k2: f64 = xi.iter().map(|x| x * x).sum();
        out.coeffs_mut()[mode] = sf.coeffs()[mode] * Complex64::new(-k2, 0.0);
    }
    out
}

/// Scalar spectral gradient in physical space.
pub(crate) fn grad_fields(f: &Field) -> Vec<Field> {
    grad_spectral(&f.forward()).iter().map(|s| s.inverse()).collect()
}
