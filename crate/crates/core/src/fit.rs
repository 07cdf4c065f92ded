//! Ordinary least-squares slope fitting for convergence and scaling studies.

/// Result of a straight-line fit `y ≈ a + b·x`.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence band on the slope (two-sided,
    /// normal approximation; conservative t-multipliers for tiny samples).
    pub slope_ci95: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
    pub n: usize,
}

/// OLS fit of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> SlopeFit {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    assert!(n >= 2, "need at least two points to fit a slope");
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let rms_residual = (ss_res / nf).sqrt();
    let slope_ci95 = if n > 2 {
        // two-sided 97.5% t quantiles for small dof, flattening to 1.96
        let t = match n - 2 {
            1 => 12.71,
            2 => 4.30,
            3 => 3.18,
            4 => 2.78,
            5 => 2.57,
            6 => 2.45,
            7 => 2.36,
            8 => 2.31,
            _ => 1.96,
        };
        let se = (ss_res / (nf - 2.0) / sxx).sqrt();
        t * se
    } else {
        f64::INFINITY
    };
    SlopeFit {
        slope,
        intercept,
        slope_ci95,
        rms_residual,
        n,
    }
}

/// OLS fit of `log y` against `log x`; `x` and `y` must be positive.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> SlopeFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}
