use num_complex::Complex64;

use super::laplacian_spectral;
use crate::error::{Error, Result};
use crate::fourier::{Field, SpectralField};

/// Free Schrödinger envelope: the solution of `2i ∂_t g + Δg = 0` from
/// given initial data, advanced exactly in Fourier space by
/// `ĝ(t,ξ) = e^{−i|ξ|²t/2} ĝ(0,ξ)` — no time-stepping error at any `t`.
#[derive(Debug, Clone)]
pub struct Envelope {
    ghat0: SpectralField,
}

impl Envelope {
    /// From a complex scalar initial envelope.
    pub fn new(g0: &Field) -> Result<Self> {
        if g0.components() != 1 {
            return Err(Error::ComponentMismatch {
                expected: 1,
                found: g0.components(),
            });
        }
        Ok(Self { ghat0: g0.forward() })
    }

    /// From the real Klein-Gordon data pair: `g₀(0) = (φ₀ + iψ₀)/2`.
    pub fn from_real_data(phi0: &Field, psi0: &Field) -> Result<Self> {
        phi0.grid().ensure_same(psi0.grid())?;
        let g0 = phi0
            .scale(Complex64::new(0.5, 0.0))
            .add(&psi0.scale(Complex64::new(0.0, 0.5)))?;
        Self::new(&g0)
    }

    pub fn grid(&self) -> &crate::fourier::Grid {
        self.ghat0.grid()
    }

    /// `ĝ(t)`.
    pub fn spectral_at(&self, t: f64) -> SpectralField {
        let grid = self.ghat0.grid().clone();
        let n = grid.point_count();
        let mut xi = vec![0.0; grid.dim()];
        let mut out = SpectralField::zeros(grid.clone(), 1);
        for mode in 0..n {
            grid.frequency_vector(mode, &mut xi);
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            let phase = Complex64::new(0.0, -k2 * t / 2.0).exp();
            out.coeffs_mut()[mode] = self.ghat0.coeffs()[mode] * phase;
        }
        out
    }

    /// `g₀(t)` in physical space.
    pub fn at(&self, t: f64) -> Field {
        self.spectral_at(t).inverse()
    }

    /// `∂_t g₀(t) = (i/2) Δ g₀(t)`, realized spectrally.
    pub fn dt_at(&self, t: f64) -> Field {
        let lap = laplacian_spectral(&self.spectral_at(t));
        lap.inverse().scale(Complex64::new(0.0, 0.5))
    }

    /// `L²` mass, conserved exactly by the flow.
    pub fn mass(&self, t: f64) -> f64 {
        self.at(t).l2_norm()
    }
}
