use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::field::{Field, SpectralField};
use super::grid::Grid;
use crate::error::{Error, Result};

type EvalFn = dyn Fn(&[f64]) -> DMatrix<Complex64> + Send + Sync;

/// A matrix-valued symbol `ξ ↦ σ(ξ)` with a declared symbol-class order.
///
/// Evaluation is a pure function, so the same `ξ` always yields the same
/// matrix; a [`SymbolTable`] freezes the per-mode values of a grid once and
/// is read-only afterwards.
#[derive(Clone)]
pub struct MatrixSymbol {
    name: String,
    rows: usize,
    cols: usize,
    order: i32,
    hermitian: bool,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for MatrixSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixSymbol")
            .field("name", &self.name)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("order", &self.order)
            .field("hermitian", &self.hermitian)
            .finish()
    }
}

impl MatrixSymbol {
    pub fn new(
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        order: i32,
        eval: impl Fn(&[f64]) -> DMatrix<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            rows,
            cols,
            order,
            hermitian: false,
            eval: Arc::new(eval),
        }
    }

    /// Declare the symbol Hermitian; table construction verifies it at every
    /// grid mode.
    pub fn hermitian(mut self) -> Self {
        self.hermitian = true;
        self
    }

    /// Scalar symbol, stored as a 1x1 matrix.
    pub fn scalar(
        name: impl Into<String>,
        order: i32,
        eval: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, 1, 1, order, move |xi| {
            DMatrix::from_element(1, 1, eval(xi))
        })
    }

    /// Scalar real symbol `ξ ↦ f(ξ)`.
    pub fn scalar_real(
        name: impl Into<String>,
        order: i32,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::scalar(name, order, move |xi| Complex64::new(eval(xi), 0.0)).hermitian_scalar()
    }

    fn hermitian_scalar(mut self) -> Self {
        self.hermitian = true;
        self
    }

    /// Constant matrix symbol.
    pub fn constant(name: impl Into<String>, m: DMatrix<Complex64>) -> Self {
        let (rows, cols) = m.shape();
        Self::new(name, rows, cols, 0, move |_| m.clone())
    }

    /// The identity symbol of size `n`.
    pub fn identity(n: usize) -> Self {
        Self::constant("identity", DMatrix::identity(n, n)).hermitian_scalar()
    }

    /// Japanese bracket `⟨ξ⟩ = (1+|ξ|²)^{1/2}` (order 1).
    pub fn bracket() -> Self {
        Self::scalar_real("bracket", 1, |xi| {
            (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).sqrt()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn is_hermitian_flagged(&self) -> bool {
        self.hermitian
    }

    pub fn eval(&self, xi: &[f64]) -> DMatrix<Complex64> {
        let m = (self.eval)(xi);
        debug_assert_eq!(m.shape(), (self.rows, self.cols));
        m
    }

    /// Pointwise product symbol `σ₁σ₂` (matrix product at every `ξ`).
    pub fn compose(&self, rhs: &MatrixSymbol) -> MatrixSymbol {
        assert_eq!(self.cols, rhs.rows);
        let a = self.clone();
        let b = rhs.clone();
        MatrixSymbol::new(
            format!("{}*{}", self.name, rhs.name),
            self.rows,
            rhs.cols,
            self.order + rhs.order,
            move |xi| a.eval(xi) * b.eval(xi),
        )
    }

    /// Freeze the symbol on a grid as a dense per-mode table.
    ///
    /// `semiclassical = true` evaluates at `εξ`, otherwise at `ξ`. The
    /// unmatched Nyquist modes are zeroed so that real fields stay real
    /// under real symbols.
    pub fn table(&self, grid: &Grid, semiclassical: bool) -> Result<SymbolTable> {
        let n_modes = grid.point_count();
        let nm = self.rows * self.cols;
        let mut values = vec![Complex64::default(); n_modes * nm];
        let mut xi = vec![0.0; grid.dim()];
        let eps = grid.epsilon();
        for mode in 0..n_modes {
            if grid.mode_has_nyquist(mode) {
                continue; // stays zero
            }
            grid.frequency_vector(mode, &mut xi);
            if semiclassical {
                for x in xi.iter_mut() {
                    *x *= eps;
                }
            }
            let m = self.eval(&xi);
            for v in m.iter() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    let mut idx = vec![0usize; grid.dim()];
                    grid.mode_indices(mode, &mut idx);
                    return Err(Error::NonFiniteSymbol {
                        mode: idx.iter().map(|&r| grid.signed_wavenumber(r)).collect(),
                    });
                }
            }
            if self.hermitian && self.rows == self.cols {
                let h_err = (&m - m.adjoint()).norm();
                if h_err > 1e-12 * (1.0 + m.norm()) {
                    return Err(Error::InvalidSystem(format!(
                        "symbol '{}' flagged hermitian but deviates by {h_err:.3e} at xi={xi:?}",
                        self.name
                    )));
                }
            }
            // column-major within each mode block, matching nalgebra
            let block = &mut values[mode * nm..(mode + 1) * nm];
            for (dst, src) in block.iter_mut().zip(m.iter()) {
                *dst = *src;
            }
        }
        Ok(SymbolTable {
            grid: grid.clone(),
            rows: self.rows,
            cols: self.cols,
            values,
        })
    }
}

/// Per-mode frozen values of a symbol on a grid. Write-once, then read-only.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    grid: Grid,
    rows: usize,
    cols: usize,
    /// `rows*cols` column-major entries per mode, Nyquist modes zeroed.
    values: Vec<Complex64>,
}

impl SymbolTable {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Frozen matrix value at a flat mode index (column-major slice).
    pub fn mode_value(&self, mode: usize) -> &[Complex64] {
        let nm = self.rows * self.cols;
        &self.values[mode * nm..(mode + 1) * nm]
    }

    /// Largest spectral (2-)norm over the grid modes.
    pub fn sup_norm(&self) -> f64 {
        let nm = self.rows * self.cols;
        let mut sup: f64 = 0.0;
        for mode in 0..self.grid.point_count() {
            let m = DMatrix::from_column_slice(
                self.rows,
                self.cols,
                &self.values[mode * nm..(mode + 1) * nm],
            );
            // spectral norm via largest singular value
            let s = m.singular_values();
            sup = sup.max(s.iter().fold(0.0f64, |a, &b| a.max(b)));
        }
        sup
    }

    /// Multiply coefficients mode by mode: `out_k = σ_k · in_k`.
    pub fn apply_spectral(&self, sf: &SpectralField) -> Result<SpectralField> {
        self.grid.ensure_same(sf.grid())?;
        if sf.components() != self.cols {
            return Err(Error::ComponentMismatch {
                expected: self.cols,
                found: sf.components(),
            });
        }
        let n = self.grid.point_count();
        let nm = self.rows * self.cols;
        let mut out = SpectralField::zeros(self.grid.clone(), self.rows);
        for mode in 0..n {
            let block = &self.values[mode * nm..(mode + 1) * nm];
            for r in 0..self.rows {
                let mut acc = Complex64::default();
                for c in 0..self.cols {
                    // column-major: entry (r,c) at c*rows + r
                    acc += block[c * self.rows + r] * sf.coeffs()[c * n + mode];
                }
                out.coeffs_mut()[r * n + mode] = acc;
            }
        }
        Ok(out)
    }

    /// `𝔉⁻¹[σ((ε)ξ) 𝔉 u]`.
    pub fn apply(&self, field: &Field) -> Result<Field> {
        Ok(self.apply_spectral(&field.forward())?.inverse())
    }
}
