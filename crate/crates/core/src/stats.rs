//! Small descriptive-statistics helpers shared by cleaning, EDA and encoding.
//!
//! Quantiles use linear interpolation between order statistics (the
//! "type 7" convention): for sorted `x` of length `n` and probability `p`,
//! `h = (n - 1) p`, and the result is `x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h])`.

/// Quantile of an already sorted slice. Panics on an empty slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn quantile(values: &[f64], p: f64) -> f64 {
    quantile_sorted(&sorted_copy(values), p)
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// (Q1, Q3) under the type-7 convention.
pub fn quartiles(values: &[f64]) -> (f64, f64) {
    let s = sorted_copy(values);
    (quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.75))
}

/// Returns `(Q1 - k IQR, Q3 + k IQR)`.
pub fn iqr_fences(values: &[f64], k: f64) -> (f64, f64) {
    let (q1, q3) = quartiles(values);
    let iqr = q3 - q1;
    (q1 - k * iqr, q3 + k * iqr)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Variance with denominator `n` (population form).
pub fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (denominator `n - 1`); zero for a single value.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quartiles() {
        assert_eq!(quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0]), (2.0, 4.0));
        let (q1, q3) = quartiles(&[1.0, 2.0, 3.0, 4.0]);
        assert!((q1 - 1.75).abs() < 1e-12);
        assert!((q3 - 3.25).abs() < 1e-12);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0, 5.0]), 3.0);
    }

    #[test]
    fn std_of_constant_is_zero() {
        assert_eq!(sample_std(&[5.0, 5.0, 5.0]), 0.0);
        assert_eq!(sample_std(&[7.0]), 0.0);
        assert!((sample_std(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
