//! Hill estimator diagnostic for the tail decay exponent.

/// Estimate the decay exponent a (tail ~ t^{-a}) from the k largest
/// positive entries: `a = k / Σ ln(x_(i)/x_(k))`. Returns `None` when the
/// data cannot support the estimate.
pub fn hill_tail_index(values: &[f64], k: usize) -> Option<f64> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    if k == 0 || k >= sorted.len() {
        return None;
    }
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let x_k = sorted[k];
    if x_k <= 0.0 {
        return None;
    }
    let sum_log: f64 = sorted[..k].iter().map(|x| (x / x_k).ln()).sum();
    if sum_log <= 0.0 {
        return None;
    }
    Some(k as f64 / sum_log)
}
