use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic spatial lattice `[0,L)^d` with `M` points per axis and its dual
/// frequency lattice, together with the semiclassical parameter `ε`.
///
/// Dual frequencies per axis are `ξ_k = 2πk/L` for `k ∈ {−M/2, …, M/2−1}`;
/// the set is closed under negation except for the unmatched Nyquist mode
/// `k = −M/2`, which every multiplier application zeroes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    length: f64,
    epsilon: f64,
}

impl Grid {
    /// `M` must be even, `L > 0`, `0 < ε ≤ 1` (`ε = 1` recovers classical
    /// multipliers).
    pub fn new(dim: usize, points_per_axis: usize, length: f64, epsilon: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be >= 1".into()));
        }
        if points_per_axis == 0 || points_per_axis % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be positive and even, got {points_per_axis}"
            )));
        }
        if !(length > 0.0) {
            return Err(Error::InvalidGrid(format!("period must be > 0, got {length}")));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "epsilon must lie in (0,1], got {epsilon}"
            )));
        }
        Ok(Self {
            dim,
            points_per_axis,
            length,
            epsilon,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Same lattice, different semiclassical parameter.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.dim, self.points_per_axis, self.length, epsilon)
    }

    /// Grid spacing `L/M`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points_per_axis as f64
    }

    /// Total number of lattice points `M^d`.
    pub fn point_count(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Cell volume `(L/M)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Signed wavenumber for a raw FFT index on one axis:
    /// `0,1,…,M/2−1,−M/2,…,−1`.
    pub fn signed_wavenumber(&self, raw: usize) -> i64 {
        let m = self.points_per_axis as i64;
        let raw = raw as i64;
        if raw < m / 2 {
            raw
        } else {
            raw - m
        }
    }

    /// `true` when the raw index is the unmatched Nyquist mode `k = −M/2`.
    pub fn is_nyquist(&self, raw: usize) -> bool {
        raw == self.points_per_axis / 2
    }

    /// Dual frequency `ξ = 2πk/L` of a raw FFT index on one axis.
    pub fn frequency(&self, raw: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.signed_wavenumber(raw) as f64 / self.length
    }

    /// Decompose a flat mode index into per-axis raw indices (axis 0 slowest).
    pub fn mode_indices(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.dim);
        for axis in (0..self.dim).rev() {
            out[axis] = flat % self.points_per_axis;
            flat /= self.points_per_axis;
        }
    }

    /// Dual frequency vector of a flat mode index.
    pub fn frequency_vector(&self, flat: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = self.frequency(rem % self.points_per_axis);
            rem /= self.points_per_axis;
        }
    }

    /// `true` when any axis of the flat mode index sits on the Nyquist mode.
    pub fn mode_has_nyquist(&self, flat: usize) -> bool {
        let mut rem = flat;
        for _ in 0..self.dim {
            if self.is_nyquist(rem % self.points_per_axis) {
                return true;
            }
            rem /= self.points_per_axis;
        }
        false
    }

    /// Physical coordinates of a flat point index (row-major, axis 0 slowest).
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let h = self.spacing();
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = (rem % self.points_per_axis) as f64 * h;
            rem /= self.points_per_axis;
        }
    }

    /// Largest `|ξ|` on one axis (Nyquist excluded).
    pub fn max_frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI * (self.points_per_axis as f64 / 2.0 - 1.0) / self.length
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self, other
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_lattice_matches_convention() {
        let g = Grid::new(1, 8, 2.0 * std::f64::consts::PI, 0.5).unwrap();
        let ks: Vec<i64> = (0..8).map(|r| g.signed_wavenumber(r)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!((g.frequency(1) - 1.0).abs() < 1e-15);
        assert!(g.is_nyquist(4));
        // closed under negation except Nyquist
        for r in 0..8usize {
            let k = g.signed_wavenumber(r);
            if k != -4 {
                assert!(ks.contains(&-k));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(0, 8, 1.0, 0.5).is_err());
        assert!(Grid::new(1, 7, 1.0, 0.5).is_err());
        assert!(Grid::new(1, 8, -1.0, 0.5).is_err());
        assert!(Grid::new(1, 8, 1.0, 0.0).is_err());
        assert!(Grid::new(1, 8, 1.0, 1.5).is_err());
    }

    #[test]
    fn flat_index_round_trips() {
        let g = Grid::new(2, 4, 1.0, 0.5).unwrap();
        let mut idx = [0usize; 2];
        g.mode_indices(7, &mut idx);
        assert_eq!(idx, [1, 3]);
        let mut xi = [0.0; 2];
        g.frequency_vector(7, &mut xi);
        assert!((xi[0] - g.frequency(1)).abs() < 1e-15);
        assert!((xi[1] - g.frequency(3)).abs() < 1e-15);
    }
}
