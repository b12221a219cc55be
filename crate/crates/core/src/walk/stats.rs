use crate::group::pairwise_sum;

/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Sample mean and standard error of the mean (zero for a single sample).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ordinary least squares `y ≈ α + β x`; returns `(β, α, r²)`.
///
/// A response with no spread is fitted exactly, so `r² = 1` there.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let beta = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let alpha = my - beta * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (beta, alpha, r2)
}

/// Empirical quantile of type 1 (inverse of the empirical CDF).
pub fn quantile_type1(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let k = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_se_examples() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_se(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn linear_fit_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let (b, a, r2) = linear_fit(&x, &[3.0, 5.0, 7.0, 9.0]);
        assert!((b - 2.0).abs() < 1e-14 && (a - 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
        assert_eq!(linear_fit(&x, &[0.0; 4]), (0.0, 0.0, 1.0));
    }

    #[test]
    fn quantile_examples() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_type1(&s, 0.9), 5.0);
        assert_eq!(quantile_type1(&s, 0.8), 4.0);
        assert_eq!(quantile_type1(&s, 0.0), 1.0);
    }
}
