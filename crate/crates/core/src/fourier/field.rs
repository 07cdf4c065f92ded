use num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Complex vector-valued state sampled on a [`Grid`].
///
/// Storage is component-major: component `c` occupies the contiguous plane
/// `data[c·M^d .. (c+1)·M^d]`, row-major over the axes (axis 0 slowest).
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    components: usize,
    data: Vec<Complex64>,
}

/// DFT coefficients of a [`Field`], unitary normalization, raw FFT mode
/// ordering (`k = 0,…,M/2−1,−M/2,…,−1` per axis).
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        let n = grid.point_count() * components;
        Self {
            grid,
            components,
            data: vec![Complex64::default(); n],
        }
    }

    /// Wrap existing samples; length must equal `C · M^d`.
    pub fn from_data(grid: Grid, components: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.point_count() * components {
            return Err(Error::DimensionMismatch(format!(
                "data length {} != {} components x {} points",
                data.len(),
                components,
                grid.point_count()
            )));
        }
        Ok(Self {
            grid,
            components,
            data,
        })
    }

    /// Build a scalar (1-component) field from a function of the physical
    /// coordinates.
    pub fn from_fn_scalar(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let n = grid.point_count();
        let mut data = Vec::with_capacity(n);
        let mut x = vec![0.0; grid.dim()];
        for p in 0..n {
            grid.point(p, &mut x);
            data.push(f(&x));
        }
        Self {
            grid,
            components: 1,
            data,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Contiguous plane of one component.
    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.point_count();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.point_count();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Sample value of component `c` at flat point index `p`.
    pub fn at(&self, c: usize, p: usize) -> Complex64 {
        self.data[c * self.grid.point_count() + p]
    }

    /// Unitary forward DFT of every component.
    pub fn forward(&self) -> SpectralField {
        let n = self.grid.point_count();
        let mut coeffs = self.data.clone();
        for c in 0..self.components {
            fft::transform(
                &mut coeffs[c * n..(c + 1) * n],
                self.grid.dim(),
                self.grid.points_per_axis(),
                true,
            );
        }
        SpectralField {
            grid: self.grid.clone(),
            components: self.components,
            coeffs,
        }
    }

    /// Largest imaginary part relative to the sup norm; 0 for the zero field.
    pub fn max_imag_ratio(&self) -> f64 {
        let sup = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if sup == 0.0 {
            return 0.0;
        }
        let max_im = self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        max_im / sup
    }

    /// Drop imaginary parts in place (used after verifying they are noise).
    pub fn project_real(&mut self) {
        for z in self.data.iter_mut() {
            *z = Complex64::new(z.re, 0.0);
        }
    }

    pub fn conj(&self) -> Self {
        let data = self.data.iter().map(|z| z.conj()).collect();
        Self {
            grid: self.grid.clone(),
            components: self.components,
            data,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let data = self.data.iter().map(|z| z * s).collect();
        Self {
            grid: self.grid.clone(),
            components: self.components,
            data,
        }
    }

    pub fn add(&self, rhs: &Field) -> Result<Field> {
        self.grid.ensure_same(&rhs.grid)?;
        if self.components != rhs.components {
            return Err(Error::ComponentMismatch {
                expected: self.components,
                found: rhs.components,
            });
        }
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Field {
            grid: self.grid.clone(),
            components: self.components,
            data,
        })
    }

    pub fn sub(&self, rhs: &Field) -> Result<Field> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `self += s · rhs`
    pub fn axpy(&mut self, s: Complex64, rhs: &Field) -> Result<()> {
        self.grid.ensure_same(&rhs.grid)?;
        if self.components != rhs.components {
            return Err(Error::ComponentMismatch {
                expected: self.components,
                found: rhs.components,
            });
        }
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += s * b;
        }
        Ok(())
    }

    /// Pointwise multiplication of every component by a scalar field.
    pub fn mul_scalar_field(&self, g: &Field) -> Result<Field> {
        self.grid.ensure_same(&g.grid)?;
        if g.components != 1 {
            return Err(Error::ComponentMismatch {
                expected: 1,
                found: g.components,
            });
        }
        let mut out = self.clone();
        for c in 0..self.components {
            let plane = out.component_mut(c);
            for (v, s) in plane.iter_mut().zip(g.data.iter()) {
                *v *= s;
            }
        }
        Ok(out)
    }

    /// Stack fields on the same grid into one multi-component field.
    pub fn stack(parts: &[&Field]) -> Result<Field> {
        let first = parts.first().expect("stack of no fields");
        let mut components = 0;
        for p in parts {
            first.grid.ensure_same(&p.grid)?;
            components += p.components;
        }
        let mut data = Vec::with_capacity(first.grid.point_count() * components);
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        Ok(Field {
            grid: first.grid.clone(),
            components,
            data,
        })
    }

    /// Split into consecutive chunks of `chunk` components each.
    pub fn unstack(&self, chunk: usize) -> Vec<Field> {
        assert_eq!(self.components % chunk, 0);
        let n = self.grid.point_count();
        (0..self.components / chunk)
            .map(|i| Field {
                grid: self.grid.clone(),
                components: chunk,
                data: self.data[i * chunk * n..(i + 1) * chunk * n].to_vec(),
            })
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Discrete `L²([0,L)^d)` norm (volume-weighted).
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.cell_volume();
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * w).sqrt()
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        let n = grid.point_count() * components;
        Self {
            grid,
            components,
            coeffs: vec![Complex64::default(); n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.point_count();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.point_count();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    /// Unitary inverse DFT back to samples.
    pub fn inverse(&self) -> Field {
        let n = self.grid.point_count();
        let mut data = self.coeffs.clone();
        for c in 0..self.components {
            fft::transform(
                &mut data[c * n..(c + 1) * n],
                self.grid.dim(),
                self.grid.points_per_axis(),
                false,
            );
        }
        Field {
            grid: self.grid.clone(),
            components: self.components,
            data,
        }
    }
}
