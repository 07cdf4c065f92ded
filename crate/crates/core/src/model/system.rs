use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Symmetric bilinear map `B: C^N × C^N → C^N`, stored as the real tensor
/// `b[k][i][j]` with `B(x,y)_k = Σ_{ij} b[k][i][j] x_i y_j` and
/// `b[k][i][j] = b[k][j][i]`.
#[derive(Debug, Clone)]
pub struct BilinearForm {
    n: usize,
    tensor: Vec<f64>,
}

impl BilinearForm {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            tensor: vec![0.0; n * n * n],
        }
    }

    pub fn from_tensor(n: usize, tensor: Vec<f64>) -> Result<Self> {
        if tensor.len() != n * n * n {
            return Err(Error::InvalidSystem(format!(
                "bilinear tensor must have {}^3 entries, got {}",
                n,
                tensor.len()
            )));
        }
        let b = Self { n, tensor };
        for k in 0..n {
            for i in 0..n {
                for j in 0..i {
                    if (b.entry(k, i, j) - b.entry(k, j, i)).abs() > 0.0 {
                        return Err(Error::InvalidSystem(format!(
                            "bilinear tensor not symmetric at ({k},{i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, k: usize, i: usize, j: usize) -> f64 {
        self.tensor[(k * self.n + i) * self.n + j]
    }

    pub fn set_entry(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.tensor[(k * self.n + i) * self.n + j] = v;
        self.tensor[(k * self.n + j) * self.n + i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.iter().all(|&v| v == 0.0)
    }

    pub fn apply(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        let mut out = vec![Complex64::default(); self.n];
        for k in 0..self.n {
            let mut acc = Complex64::default();
            for i in 0..self.n {
                if x[i] == Complex64::default() {
                    continue;
                }
                for j in 0..self.n {
                    let t = self.entry(k, i, j);
                    if t != 0.0 {
                        acc += t * x[i] * y[j];
                    }
                }
            }
            out[k] = acc;
        }
        out
    }

    /// Matrix of the linear map `V ↦ B(e, V)`.
    pub fn matrix_of(&self, e: &DVector<Complex64>) -> DMatrix<Complex64> {
        debug_assert_eq!(e.len(), self.n);
        let mut m = DMatrix::<Complex64>::zeros(self.n, self.n);
        for k in 0..self.n {
            for j in 0..self.n {
                let mut acc = Complex64::default();
                for i in 0..self.n {
                    let t = self.entry(k, i, j);
                    if t != 0.0 {
                        acc += t * e[i];
                    }
                }
                m[(k, j)] = acc;
            }
        }
        m
    }

    /// Indices written by `B` (rows `k` with a nonzero slice).
    pub fn written_slots(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&k| (0..self.n).any(|i| (0..self.n).any(|j| self.entry(k, i, j) != 0.0)))
            .collect()
    }

    /// Indices read by `B` (columns `i` or `j` with a nonzero slice).
    pub fn read_slots(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| {
                (0..self.n).any(|k| (0..self.n).any(|j| self.entry(k, i, j) != 0.0))
            })
            .collect()
    }
}

/// The abstract system `∂_t U + A(∂_x)U/ε + A₀U/ε² = B(U,U)` with
/// `A(∂_x) = Σ_j A_j ∂_{x_j}`, all `A_j` real symmetric, `A₀` real
/// skew-symmetric, and temporal wave number `ω` on the dispersion relation
/// `det(−iω + A₀) = 0`.
#[derive(Debug, Clone)]
pub struct HyperbolicSystem {
    n: usize,
    d: usize,
    a_mats: Vec<DMatrix<f64>>,
    a0: DMatrix<f64>,
    bilinear: BilinearForm,
    omega: f64,
}

impl HyperbolicSystem {
    pub fn new(
        d: usize,
        a_mats: Vec<DMatrix<f64>>,
        a0: DMatrix<f64>,
        bilinear: BilinearForm,
        omega: f64,
    ) -> Result<Self> {
        if d == 0 || a_mats.len() != d {
            return Err(Error::InvalidSystem(format!(
                "need d >= 1 matrices A_j, got {} for d={d}",
                a_mats.len()
            )));
        }
        let n = a0.nrows();
        if a0.ncols() != n || bilinear.n() != n {
            return Err(Error::InvalidSystem("inconsistent state dimension".into()));
        }
        for (j, a) in a_mats.iter().enumerate() {
            if a.shape() != (n, n) {
                return Err(Error::InvalidSystem(format!("A_{j} is not {n}x{n}")));
            }
            if (a - a.transpose()).norm() != 0.0 {
                return Err(Error::InvalidSystem(format!("A_{j} is not symmetric")));
            }
        }
        if (&a0 + a0.transpose()).norm() != 0.0 {
            return Err(Error::InvalidSystem("A0 is not skew-symmetric".into()));
        }
        let sys = Self {
            n,
            d,
            a_mats,
            a0,
            bilinear,
            omega,
        };
        let disp = sys.dispersion_residual();
        if disp > 1e-12 {
            return Err(Error::InvalidSystem(format!(
                "omega={omega} violates the dispersion relation, |det(-i omega + A0)| = {disp:.3e}"
            )));
        }
        Ok(sys)
    }

    /// `|det(−iω + A₀)|`.
    pub fn dispersion_residual(&self) -> f64 {
        let n = self.n;
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex64::new(self.a0[(i, j)], 0.0);
            }
            m[(i, i)] -= Complex64::new(0.0, self.omega);
        }
        m.determinant().norm()
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn space_dim(&self) -> usize {
        self.d
    }

    pub fn a_mat(&self, j: usize) -> &DMatrix<f64> {
        &self.a_mats[j]
    }

    pub fn a0(&self) -> &DMatrix<f64> {
        &self.a0
    }

    pub fn bilinear(&self) -> &BilinearForm {
        &self.bilinear
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `A(ξ) = Σ_j ξ_j A_j` (real symmetric).
    pub fn a_of(&self, xi: &[f64]) -> DMatrix<f64> {
        debug_assert_eq!(xi.len(), self.d);
        let mut m = DMatrix::<f64>::zeros(self.n, self.n);
        for (x, a) in xi.iter().zip(self.a_mats.iter()) {
            if *x != 0.0 {
                m += a * *x;
            }
        }
        m
    }

    /// The Hermitian symbol `𝒜(ξ) = A(ξ) + A₀/i`.
    pub fn script_a(&self, xi: &[f64]) -> DMatrix<Complex64> {
        let a = self.a_of(xi);
        let mut m = DMatrix::<Complex64>::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = Complex64::new(a[(i, j)], -self.a0[(i, j)]);
            }
        }
        m
    }

    /// Load from the documented structured text description (see the
    /// `system.toml` schema in the README).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawSystem = toml::from_str(text).map_err(|e| Error::TomlParse(e.to_string()))?;
        raw.build()
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Deserialize)]
struct RawSystem {
    dim: usize,
    states: usize,
    omega: f64,
    a0: Vec<Vec<f64>>,
    a: Vec<Vec<Vec<f64>>>,
    /// Either the full `N×N×N` tensor...
    b: Option<Vec<Vec<Vec<f64>>>>,
    /// ...or the Klein-Gordon-style shorthand `b_entries = [[k,i,j,value]]`.
    b_entries: Option<Vec<(usize, usize, usize, f64)>>,
}

impl RawSystem {
    fn build(self) -> Result<HyperbolicSystem> {
        let n = self.states;
        let to_mat = |rows: &Vec<Vec<f64>>, what: &str| -> Result<DMatrix<f64>> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidSystem(format!("{what} is not {n}x{n}")));
            }
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        };
        let a0 = to_mat(&self.a0, "a0")?;
        let mut a_mats = Vec::with_capacity(self.dim);
        for (j, rows) in self.a.iter().enumerate() {
            a_mats.push(to_mat(rows, &format!("a[{j}]"))?);
        }
        let bilinear = match (self.b, self.b_entries) {
            (Some(full), None) => {
                let mut tensor = vec![0.0; n * n * n];
                if full.len() != n {
                    return Err(Error::InvalidSystem("b must have N slices".into()));
                }
                for (k, slice) in full.iter().enumerate() {
                    if slice.len() != n || slice.iter().any(|r| r.len() != n) {
                        return Err(Error::InvalidSystem(format!("b[{k}] is not {n}x{n}")));
                    }
                    for i in 0..n {
                        for j in 0..n {
                            tensor[(k * n + i) * n + j] = slice[i][j];
                        }
                    }
                }
                BilinearForm::from_tensor(n, tensor)?
            }
            (None, Some(entries)) => {
                let mut b = BilinearForm::zero(n);
                for (k, i, j, v) in entries {
                    if k >= n || i >= n || j >= n {
                        return Err(Error::InvalidSystem(format!(
                            "b_entries index ({k},{i},{j}) out of range"
                        )));
                    }
                    b.set_entry(k, i, j, v);
                }
                b
            }
            (None, None) => BilinearForm::zero(n),
            (Some(_), Some(_)) => {
                return Err(Error::InvalidSystem(
                    "give either b or b_entries, not both".into(),
                ))
            }
        };
        HyperbolicSystem::new(self.dim, a_mats, a0, bilinear, self.omega)
    }
}

/// The Klein-Gordon system in first-order form: state `U = (w, v, u)` with
/// `w = ε∇u`, `v = ε²∂_t u`, so `N = d + 2`; quadratic coupling
/// `B(U₁,U₂) = −λ_c (0, u₁u₂, 0)ᵀ` and `ω = 1`.
pub fn kg_system(d: usize, lambda_c: f64) -> Result<HyperbolicSystem> {
    if d < 1 {
        return Err(Error::InvalidSystem("kg_system needs d >= 1".into()));
    }
    let n = d + 2;
    let v = d; // index of the v slot
    let u = d + 1; // index of the u slot
    let mut a_mats = Vec::with_capacity(d);
    for j in 0..d {
        let mut a = DMatrix::<f64>::zeros(n, n);
        a[(j, v)] = -1.0;
        a[(v, j)] = -1.0;
        a_mats.push(a);
    }
    let mut a0 = DMatrix::<f64>::zeros(n, n);
    a0[(v, u)] = 1.0;
    a0[(u, v)] = -1.0;
    let mut b = BilinearForm::zero(n);
    b.set_entry(v, u, u, -lambda_c);
    HyperbolicSystem::new(d, a_mats, a0, b, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn kg_matrices_match_closed_form_d1() {
        let sys = kg_system(1, 2.0).unwrap();
        assert_eq!(sys.state_dim(), 3);
        let a0 = DMatrix::from_row_slice(3, 3, &[0., 0., 0., 0., 0., 1., 0., -1., 0.]);
        let a1 = -DMatrix::from_row_slice(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., 0.]);
        assert_eq!(sys.a0(), &a0);
        assert_eq!(sys.a_mat(0), &a1);
    }

    #[test]
    fn kg_bilinear_sign_convention() {
        let sys = kg_system(1, 2.0).unwrap();
        let e = [
            Complex64::default(),
            Complex64::default(),
            Complex64::new(1.0, 0.0),
        ];
        let out = sys.bilinear().apply(&e, &e);
        assert_eq!(out[0], Complex64::default());
        assert_eq!(out[1], Complex64::new(-2.0, 0.0));
        assert_eq!(out[2], Complex64::default());
    }

    #[test]
    fn bilinear_symmetry_on_random_probes() {
        let sys = kg_system(2, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut draw = || {
            (0..4)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect::<Vec<_>>()
        };
        for _ in 0..16 {
            let x = draw();
            let y = draw();
            let bxy = sys.bilinear().apply(&x, &y);
            let byx = sys.bilinear().apply(&y, &x);
            for (a, b) in bxy.iter().zip(byx.iter()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn script_a_is_hermitian() {
        let sys = kg_system(2, 1.0).unwrap();
        let m = sys.script_a(&[0.3, -1.2]);
        assert!((&m - m.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn constructor_rejects_broken_structure() {
        // symmetric A0 must be rejected
        let mut a0 = DMatrix::<f64>::zeros(3, 3);
        a0[(1, 2)] = 1.0;
        a0[(2, 1)] = 1.0;
        let a1 = DMatrix::<f64>::zeros(3, 3);
        let err = HyperbolicSystem::new(1, vec![a1], a0, BilinearForm::zero(3), 1.0);
        assert!(err.is_err());

        // omega off the dispersion relation must be rejected
        let kg = kg_system(1, 1.0).unwrap();
        let err = HyperbolicSystem::new(
            1,
            kg.a_mats.clone(),
            kg.a0.clone(),
            BilinearForm::zero(3),
            0.5,
        );
        assert!(err.is_err());
    }

    #[test]
    fn toml_round_trip_matches_kg() {
        let text = r#"
dim = 1
states = 3
omega = 1.0
a0 = [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]]
a = [[[0.0, -1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]]
b_entries = [[1, 2, 2, -2.0]]
"#;
        let sys = HyperbolicSystem::from_toml_str(text).unwrap();
        let kg = kg_system(1, 2.0).unwrap();
        assert_eq!(sys.a0(), kg.a0());
        assert_eq!(sys.a_mat(0), kg.a_mat(0));
        assert_eq!(sys.bilinear().entry(1, 2, 2), -2.0);
    }
}
