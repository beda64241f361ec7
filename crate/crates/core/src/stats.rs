//! Goodness-of-fit statistics used by the Monte Carlo checks.
//!
//! Critical values are taken from standard tables and hard-coded.

use crate::error::{domain, Result};

/// Asymptotic Kolmogorov–Smirnov coefficients c(α), external table values.
const KS_COEFF_05: f64 = 1.358;
const KS_COEFF_01: f64 = 1.628;

/// Upper 1% quantiles of χ² with 1..=30 degrees of freedom, external table values.
const CHI2_99: [f64; 30] = [
    6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090, 21.666, 23.209, 24.725, 26.217, 27.688, 29.141, 30.578, 32.000,
    33.409, 34.805, 36.191, 37.566, 38.932, 40.289, 41.638, 42.980, 44.314, 45.642, 46.963, 48.278, 49.588, 50.892,
];

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return domain("a mean estimate needs at least two samples");
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        Ok(Self { mean, std_error: (var / n).sqrt() })
    }

    /// Empirical frequency of `hits` among `n` trials.
    pub fn proportion(hits: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("a proportion needs at least one trial");
        }
        let p = hits as f64 / n as f64;
        Ok(Self { mean: p, std_error: (p * (1.0 - p) / n as f64).sqrt() })
    }

    /// Distance to `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_error
    }
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample KS distance sup |F_n - F|.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> Result<f64> {
    if xs.is_empty() {
        return domain("KS statistic of an empty sample");
    }
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Two-sample KS distance sup |F_n - G_m|.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("KS statistic of an empty sample");
    }
    let (a, b) = (sorted(a), sorted(b));
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Two-sample KS critical value at level `alpha` (0.05 or 0.01).
pub fn ks_two_sample_critical(alpha: f64, n: usize, m: usize) -> Result<f64> {
    let c = ks_coefficient(alpha)?;
    let (n, m) = (n as f64, m as f64);
    Ok(c * ((n + m) / (n * m)).sqrt())
}

/// One-sample KS critical value at level `alpha` (0.05 or 0.01).
pub fn ks_one_sample_critical(alpha: f64, n: usize) -> Result<f64> {
    Ok(ks_coefficient(alpha)? / (n as f64).sqrt())
}

fn ks_coefficient(alpha: f64) -> Result<f64> {
    if alpha == 0.05 {
        Ok(KS_COEFF_05)
    } else if alpha == 0.01 {
        Ok(KS_COEFF_01)
    } else {
        domain(format!("no tabulated KS coefficient for alpha = {alpha}"))
    }
}

/// Pearson χ² statistic of observed counts against cell probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> Result<f64> {
    if observed.len() != probs.len() || observed.is_empty() {
        return domain("observed counts and cell probabilities must have equal non-zero length");
    }
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(probs) {
        if !(p > 0.0) {
            return domain("cell probabilities must be positive");
        }
        let e = p * n as f64;
        stat += (o as f64 - e).powi(2) / e;
    }
    Ok(stat)
}

/// Upper 1% point of χ² with `df` degrees of freedom.
pub fn chi_square_critical_99(df: usize) -> Result<f64> {
    match df {
        1..=30 => Ok(CHI2_99[df - 1]),
        _ => domain(format!("no tabulated chi-square quantile for df = {df}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn chi_square_table_matches_quantiles() {
        for df in 1..=30 {
            let q = ChiSquared::new(df as f64).unwrap().inverse_cdf(0.99);
            assert!((chi_square_critical_99(df).unwrap() - q).abs() < 1e-3, "df = {df}");
        }
        assert!(chi_square_critical_99(0).is_err());
    }

    #[test]
    fn ks_against_exact_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_one_sample(&xs, |x| x).unwrap();
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn ks_two_sample_extremes() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&a, &[4.0, 5.0]).unwrap(), 1.0);
        assert!((ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_critical_values() {
        let c = ks_two_sample_critical(0.01, 100, 100).unwrap();
        assert!((c - 1.628 * 0.02f64.sqrt()).abs() < 1e-12);
        assert!(ks_two_sample_critical(0.2, 10, 10).is_err());
    }

    #[test]
    fn chi_square_zero_for_exact_counts() {
        assert_eq!(chi_square(&[25, 25, 50], &[0.25, 0.25, 0.5]).unwrap(), 0.0);
        assert!(chi_square(&[1], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn mean_estimate() {
        let m = MeanEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.mean, 2.5);
        assert!((m.std_error - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        let p = MeanEstimate::proportion(50, 100).unwrap();
        assert!((p.std_error - 0.05).abs() < 1e-15);
    }
}
