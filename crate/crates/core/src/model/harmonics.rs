use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::system::HyperbolicSystem;

/// Orthogonal projector `π_p` onto `ker(−ipω + A₀)` together with the
/// partial inverse `L_p⁻¹` of `L_p = −ipω + A₀` on the complement, so that
/// `π_p L_p⁻¹ = L_p⁻¹ π_p = 0` and `L_p L_p⁻¹ = Id − π_p`.
#[derive(Debug, Clone)]
pub struct HarmonicProjector {
    p: i64,
    pi: DMatrix<Complex64>,
    lp_inv: DMatrix<Complex64>,
    kernel_dim: usize,
    unit_generator: Option<DVector<Complex64>>,
}

impl HarmonicProjector {
    pub fn harmonic(&self) -> i64 {
        self.p
    }

    pub fn pi(&self) -> &DMatrix<Complex64> {
        &self.pi
    }

    pub fn lp_inv(&self) -> &DMatrix<Complex64> {
        &self.lp_inv
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    /// Norm-one kernel generator when the kernel is one-dimensional; the
    /// phase is fixed by rotating the last largest-magnitude entry to the
    /// positive real axis.
    pub fn unit_generator(&self) -> Option<&DVector<Complex64>> {
        self.unit_generator.as_ref()
    }

    pub fn is_trivial(&self) -> bool {
        self.kernel_dim == 0
    }
}

/// Build `π_p` and `L_p⁻¹` from the Hermitian eigendecomposition of
/// `H = A₀/i` (whose `pω`-eigenspace is exactly `ker L_p`).
pub fn harmonic_projector(sys: &HyperbolicSystem, p: i64) -> HarmonicProjector {
    let n = sys.state_dim();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = Complex64::new(0.0, -sys.a0()[(i, j)]);
        }
    }
    let target = p as f64 * sys.omega();
    let eig = nalgebra::SymmetricEigen::new(h);
    let tol = 1e-10 * (1.0 + eig.eigenvalues.amax());

    let mut pi = DMatrix::<Complex64>::zeros(n, n);
    let mut lp_inv = DMatrix::<Complex64>::zeros(n, n);
    let mut kernel_cols: Vec<usize> = Vec::new();
    for k in 0..n {
        let mu = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        if (mu - target).abs() <= tol {
            pi += v * v.adjoint();
            kernel_cols.push(k);
        } else {
            // L_p restricted to the μ eigenspace is i(μ − pω)
            let inv = Complex64::new(0.0, mu - target).inv();
            lp_inv += v * v.adjoint() * inv;
        }
    }

    let unit_generator = if kernel_cols.len() == 1 {
        let mut v: DVector<Complex64> = eig.eigenvectors.column(kernel_cols[0]).into_owned();
        v /= Complex64::from(v.norm());
        let max_mag = v.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let anchor = (0..n)
            .rev()
            .find(|&i| v[i].norm() >= max_mag * (1.0 - 1e-12))
            .unwrap();
        let phase = v[anchor] / Complex64::from(v[anchor].norm());
        v /= phase;
        Some(v)
    } else {
        None
    };

    HarmonicProjector {
        p,
        pi,
        lp_inv,
        kernel_dim: kernel_cols.len(),
        unit_generator,
    }
}

/// The unnormalized polarization vector `e_p` of the Klein-Gordon cascade,
/// `e₁ = (0_d, −i, 1)ᵀ` and `e₋₁ = conj(e₁)`.
///
/// This is `√2` times the norm-one kernel generator returned by
/// [`harmonic_projector`]; the leading amplitude is written `g₀·e₁` with
/// this unnormalized vector, so all interaction coefficients built from it
/// carry the same convention.
pub fn kg_cascade_generator(d: usize, p: i64) -> DVector<Complex64> {
    assert!(p == 1 || p == -1, "cascade generator exists for p = ±1");
    let n = d + 2;
    let mut e = DVector::<Complex64>::zeros(n);
    e[d] = Complex64::new(0.0, -(p as f64));
    e[d + 1] = Complex64::new(1.0, 0.0);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{kg_system, BilinearForm};

    fn check_invariants(sys: &HyperbolicSystem, hp: &HarmonicProjector) {
        let n = sys.state_dim();
        let pi = hp.pi();
        let li = hp.lp_inv();
        assert!((pi * pi - pi).norm() < 1e-13, "pi not idempotent");
        assert!((pi - pi.adjoint()).norm() < 1e-13, "pi not hermitian");
        assert!((pi * li).norm() < 1e-12);
        assert!((li * pi).norm() < 1e-12);
        let mut lp = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                lp[(i, j)] = Complex64::new(sys.a0()[(i, j)], 0.0);
            }
            lp[(i, i)] -= Complex64::new(0.0, hp.harmonic() as f64 * sys.omega());
        }
        let id = DMatrix::<Complex64>::identity(n, n);
        assert!((lp * li - (&id - pi)).norm() < 1e-12);
    }

    #[test]
    fn kg_first_harmonic_is_rank_one_polarization() {
        let sys = kg_system(1, 1.0).unwrap();
        let hp = harmonic_projector(&sys, 1);
        assert_eq!(hp.kernel_dim(), 1);
        check_invariants(&sys, &hp);

        let e1 = DVector::from_vec(vec![
            Complex64::default(),
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 0.0),
        ]) / Complex64::from(2.0f64.sqrt());
        let expect = &e1 * e1.adjoint();
        assert!((hp.pi() - expect).norm() < 1e-13);
        let gen = hp.unit_generator().unwrap();
        assert!((gen - e1).norm() < 1e-12);
        // cascade generator is √2 times the unit one
        let cascade = kg_cascade_generator(1, 1);
        assert!((&cascade - gen * Complex64::from(2.0f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn kg_second_harmonic_is_trivial_with_full_inverse() {
        let sys = kg_system(1, 1.0).unwrap();
        let hp = harmonic_projector(&sys, 2);
        assert!(hp.is_trivial());
        assert!(hp.pi().norm() < 1e-14);
        check_invariants(&sys, &hp);
        // L₂⁻¹ must be the genuine inverse of (−2i + A₀)
        let n = 3;
        let mut lp = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                lp[(i, j)] = Complex64::new(sys.a0()[(i, j)], 0.0);
            }
            lp[(i, i)] -= Complex64::new(0.0, 2.0);
        }
        let direct = lp.try_inverse().unwrap();
        assert!((hp.lp_inv() - direct).norm() < 1e-12);
    }

    #[test]
    fn zero_a0_gives_identity_projector_at_p0() {
        let a1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let sys = HyperbolicSystem::new(
            1,
            vec![a1],
            DMatrix::zeros(2, 2),
            BilinearForm::zero(2),
            0.0,
        )
        .unwrap();
        let hp = harmonic_projector(&sys, 0);
        assert_eq!(hp.kernel_dim(), 2);
        assert!((hp.pi() - DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-14);
        assert!(hp.lp_inv().norm() < 1e-14);
    }
}
