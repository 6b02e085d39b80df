//! Shared quadrature and finite-difference kernels.
//!
//! Every functional in the ledger and every shift-rate integral uses the
//! same trapezoidal rule on the same grid, so the discrete cross-checks
//! between modules close exactly instead of up to quadrature differences.

/// Neumaier compensated sum; error stays at one ulp of the result.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Trapezoidal rule on a uniform grid with spacing `dx`.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner = compensated_sum(values[1..n - 1].iter().copied());
    dx * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Trapezoidal rule of the pointwise product of two samplings.
pub fn trapezoid_product(f: &[f64], g: &[f64], dx: f64) -> f64 {
    debug_assert_eq!(f.len(), g.len());
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let inner = compensated_sum(f[1..n - 1].iter().zip(&g[1..n - 1]).map(|(a, b)| a * b));
    dx * (inner + 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]))
}

/// Second-order gradient: central in the interior, one-sided at the ends.
pub fn gradient(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "gradient needs at least 3 samples");
    let mut out = vec![0.0; n];
    let inv2 = 0.5 / dx;
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * inv2;
    }
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2;
    out
}

/// Second difference f''; interior central, end values copied inward.
pub fn second_diff(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "second_diff needs at least 3 samples");
    let mut out = vec![0.0; n];
    let inv = 1.0 / (dx * dx);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
    out
}

/// Least-squares line fit; returns (slope, intercept, r_squared).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxx = compensated_sum(x.iter().map(|&xi| (xi - mx) * (xi - mx)));
    let sxy = compensated_sum(x.iter().zip(y).map(|(&xi, &yi)| (xi - mx) * (yi - my)));
    let syy = compensated_sum(y.iter().map(|&yi| (yi - my) * (yi - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}
