use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::system::HyperbolicSystem;
use crate::error::{Error, Result};
use crate::fourier::MatrixSymbol;

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Smooth spectral decomposition `A(ξ) + A₀/i = Σ_j λ_j(ξ) Π_j(ξ)` with
/// eigenvalue symbols in `S¹` and Hermitian projector symbols in `S⁰`.
#[derive(Clone)]
pub struct SpectralDecomposition {
    branch_count: usize,
    lambdas: Vec<Arc<ScalarFn>>,
    projectors: Vec<MatrixSymbol>,
    /// `Some(c)` for branches with identically constant eigenvalue.
    constant_value: Vec<Option<f64>>,
}

impl SpectralDecomposition {
    pub fn new(
        lambdas: Vec<Arc<ScalarFn>>,
        projectors: Vec<MatrixSymbol>,
        constant_value: Vec<Option<f64>>,
    ) -> Self {
        assert_eq!(lambdas.len(), projectors.len());
        assert_eq!(lambdas.len(), constant_value.len());
        Self {
            branch_count: lambdas.len(),
            lambdas,
            projectors,
            constant_value,
        }
    }

    /// Number of branches `J`.
    pub fn branch_count(&self) -> usize {
        self.branch_count
    }

    /// Eigenvalue of branch `j` (1-based) at `ξ`.
    pub fn lambda(&self, j: usize, xi: &[f64]) -> f64 {
        (self.lambdas[j - 1])(xi)
    }

    /// Eigenvalue of branch `j` as a scalar multiplier symbol.
    pub fn lambda_symbol(&self, j: usize) -> MatrixSymbol {
        let f = self.lambdas[j - 1].clone();
        MatrixSymbol::scalar_real(format!("lambda_{j}"), 1, move |xi| f(xi))
    }

    /// Projector of branch `j` (1-based).
    pub fn projector(&self, j: usize) -> &MatrixSymbol {
        &self.projectors[j - 1]
    }

    pub fn projector_at(&self, j: usize, xi: &[f64]) -> DMatrix<Complex64> {
        self.projectors[j - 1].eval(xi)
    }

    /// `Some(c)` when branch `j` has identically constant eigenvalue.
    pub fn constant_branch(&self, j: usize) -> Option<f64> {
        self.constant_value[j - 1]
    }

    /// Worst residual of the three decomposition identities at one `ξ`:
    /// completeness, orthogonality, and reconstruction of `𝒜(ξ)`.
    pub fn residual_at(&self, sys: &HyperbolicSystem, xi: &[f64]) -> f64 {
        let n = sys.state_dim();
        let projs: Vec<DMatrix<Complex64>> =
            (1..=self.branch_count).map(|j| self.projector_at(j, xi)).collect();
        let mut sum = DMatrix::<Complex64>::zeros(n, n);
        let mut recon = DMatrix::<Complex64>::zeros(n, n);
        for (j, p) in projs.iter().enumerate() {
            sum += p;
            recon += p * Complex64::from(self.lambda(j + 1, xi));
        }
        let mut worst = (&sum - DMatrix::<Complex64>::identity(n, n)).norm();
        worst = worst.max((&recon - sys.script_a(xi)).norm());
        for (a, pa) in projs.iter().enumerate() {
            for (b, pb) in projs.iter().enumerate() {
                let prod = pa * pb;
                let expect = if a == b { pa.clone() } else { DMatrix::zeros(n, n) };
                worst = worst.max((prod - expect).norm());
            }
        }
        worst
    }
}

impl std::fmt::Debug for SpectralDecomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralDecomposition")
            .field("branch_count", &self.branch_count)
            .field("constant_value", &self.constant_value)
            .finish()
    }
}

fn bracket(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// Closed-form decomposition of the Klein-Gordon symbol: `λ₁ = ⟨ξ⟩`,
/// `λ₂ = −⟨ξ⟩`, `λ₃ ≡ 0`, with rank-one wave projectors and the rank-`d`
/// kernel projector. No numerical eigensolver is involved.
pub fn kg_spectral_decomposition(d: usize) -> Result<SpectralDecomposition> {
    if d < 1 {
        return Err(Error::InvalidSystem("need d >= 1".into()));
    }
    let n = d + 2;

    let wave_projector = move |sign: f64| {
        move |xi: &[f64]| -> DMatrix<Complex64> {
            let lam = sign * bracket(xi);
            // normalized eigenvector (−ξ/λ, 1, i/λ)/√2 of A(ξ) + A₀/i
            let mut psi = DVector::<Complex64>::zeros(n);
            for (k, &x) in xi.iter().enumerate() {
                psi[k] = Complex64::new(-x / lam, 0.0);
            }
            psi[d] = Complex64::new(1.0, 0.0);
            psi[d + 1] = Complex64::new(0.0, 1.0 / lam);
            let psi = psi / Complex64::from(2.0f64.sqrt());
            &psi * psi.adjoint()
        }
    };

    let kernel_projector = move |xi: &[f64]| -> DMatrix<Complex64> {
        // orthogonal projector onto {(w, 0, i ξᵀw)}: block form
        // [[Id − ξξᵀ/⟨ξ⟩², 0, −iξ/⟨ξ⟩²], [0,0,0], [iξᵀ/⟨ξ⟩², 0, |ξ|²/⟨ξ⟩²]]
        let b2 = 1.0 + xi.iter().map(|x| x * x).sum::<f64>();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                let kron = if i == j { 1.0 } else { 0.0 };
                m[(i, j)] = Complex64::new(kron - xi[i] * xi[j] / b2, 0.0);
            }
            m[(i, d + 1)] = Complex64::new(0.0, -xi[i] / b2);
            m[(d + 1, i)] = Complex64::new(0.0, xi[i] / b2);
        }
        m[(d + 1, d + 1)] = Complex64::new((b2 - 1.0) / b2, 0.0);
        m
    };

    let projectors = vec![
        MatrixSymbol::new("kg_pi_1", n, n, 0, wave_projector(1.0)).hermitian(),
        MatrixSymbol::new("kg_pi_2", n, n, 0, wave_projector(-1.0)).hermitian(),
        MatrixSymbol::new("kg_pi_3", n, n, 0, kernel_projector).hermitian(),
    ];
    let lambdas: Vec<Arc<ScalarFn>> = vec![
        Arc::new(|xi: &[f64]| bracket(xi)),
        Arc::new(|xi: &[f64]| -bracket(xi)),
        Arc::new(|_: &[f64]| 0.0),
    ];
    Ok(SpectralDecomposition::new(
        lambdas,
        projectors,
        vec![None, None, Some(0.0)],
    ))
}

/// Hermitian eigensolver fallback for systems without closed forms:
/// eigenvalues of `𝒜(ξ)` in ascending order, grouped into clusters whose
/// internal gaps are below `cluster_tol`, each cluster contributing one
/// eigenvalue (mean) and one projector.
///
/// Grouping refuses to guess: if some gap lies in `(tol, 10·tol]` while
/// another lies in `[tol/10, tol]`, the clustering is reported as ambiguous.
pub fn numerical_decomposition(
    sys: &HyperbolicSystem,
    xi: &[f64],
    cluster_tol: f64,
) -> Result<(Vec<f64>, Vec<DMatrix<Complex64>>)> {
    let a = sys.script_a(xi);
    let herm_defect = (&a - a.adjoint()).norm();
    if herm_defect > 1e-12 * (1.0 + a.norm()) {
        return Err(Error::InvalidSystem(format!(
            "symbol not Hermitian at xi={xi:?} (defect {herm_defect:.3e})"
        )));
    }
    let n = sys.state_dim();
    let eig = nalgebra::SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let gaps: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    let near_above = gaps.iter().any(|&g| g > cluster_tol && g <= 10.0 * cluster_tol);
    let near_below = gaps.iter().any(|&g| g <= cluster_tol && g >= cluster_tol / 10.0);
    if near_above && near_below {
        return Err(Error::ClusterAmbiguity {
            xi: xi.to_vec(),
            gaps,
            tol: cluster_tol,
        });
    }

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end] - vals[end - 1] <= cluster_tol {
            end += 1;
        }
        let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mut proj = DMatrix::<Complex64>::zeros(n, n);
        for &k in &order[start..end] {
            let v = eig.eigenvectors.column(k);
            proj += v * v.adjoint();
        }
        eigenvalues.push(mean);
        projectors.push(proj);
        start = end;
    }
    Ok((eigenvalues, projectors))
}
