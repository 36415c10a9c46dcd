use alloc::vec::Vec;

/// `(f(x + h) - f(x - h)) / (2h)`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `(f(x + h) - 2 f(x) + f(x - h)) / h^2`.
pub fn central_second_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// First derivative of uniformly sampled data at the interior samples
/// `1..n-1`; endpoints are excluded.
pub fn central_diff_series(values: &[f64], dt: f64) -> Vec<f64> {
    values.windows(3).map(|w| (w[2] - w[0]) / (2.0 * dt)).collect()
}

/// Second derivative of uniformly sampled data at the interior samples.
pub fn second_diff_series(values: &[f64], dt: f64) -> Vec<f64> {
    values.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / (dt * dt)).collect()
}
