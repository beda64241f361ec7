use crate::error::{domain, Result};
use crate::scalar::{as_f64, from_usize, Scalar};
use crate::sum::CompensatedSum;

/// Inter-arrival law `P(T = n) = r(n) / R_N` on `{1, ..., N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterArrivalLaw<T> {
    weights: Vec<T>,
    normalizer: T,
    probs: Vec<T>,
}

impl<T: Scalar> InterArrivalLaw<T> {
    /// Builds the law from `r(1), ..., r(N)`.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return domain("an inter-arrival law needs N >= 1");
        }
        if let Some(i) = weights.iter().position(|w| !(*w > T::zero())) {
            return domain(format!("weight r({}) is not positive", i + 1));
        }
        let mut acc = CompensatedSum::new();
        for w in &weights {
            acc.add(w.clone());
        }
        let normalizer = acc.value();
        let probs = weights.iter().map(|w| w.clone() / normalizer.clone()).collect();
        Ok(Self { weights, normalizer, probs })
    }

    /// The cutoff `N`.
    pub fn cutoff(&self) -> usize {
        self.weights.len()
    }

    /// `r(n)`, zero outside `1..=N`.
    pub fn weight(&self, n: usize) -> T {
        if n == 0 || n > self.cutoff() {
            T::zero()
        } else {
            self.weights[n - 1].clone()
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `R_N`.
    pub fn normalizer(&self) -> &T {
        &self.normalizer
    }

    /// `P(T = n)`.
    pub fn prob(&self, n: usize) -> T {
        if n == 0 || n > self.cutoff() {
            T::zero()
        } else {
            self.probs[n - 1].clone()
        }
    }

    /// `P(T = 1), ..., P(T = N)`.
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// `P(T ≤ n)`.
    pub fn cdf(&self, n: usize) -> T {
        let mut acc = CompensatedSum::new();
        for p in self.probs.iter().take(n) {
            acc.add(p.clone());
        }
        acc.value()
    }

    pub fn mean(&self) -> T {
        let mut acc = CompensatedSum::new();
        for (i, p) in self.probs.iter().enumerate() {
            acc.add(p.clone() * from_usize::<T>(i + 1));
        }
        acc.value()
    }

    /// Converts to an `f64` law.
    pub fn to_f64(&self) -> InterArrivalLaw<f64> {
        InterArrivalLaw {
            weights: self.weights.iter().map(as_f64).collect(),
            normalizer: as_f64(&self.normalizer),
            probs: self.probs.iter().map(as_f64).collect(),
        }
    }
}

/// `r(n) = 1/n` on `{1, ..., N}`.
pub fn law_from_harmonic<T: Scalar>(n_cut: usize) -> Result<InterArrivalLaw<T>> {
    if n_cut == 0 {
        return domain("harmonic law needs N >= 1");
    }
    InterArrivalLaw::from_weights((1..=n_cut).map(|n| T::one() / from_usize::<T>(n)).collect())
}

/// `λ_N = 1 + θ / ln N`.
pub fn lambda_for_theta(n_cut: f64, theta: f64) -> Result<f64> {
    if !(n_cut >= 2.0) {
        return domain(format!("lambda_for_theta needs N >= 2, got {n_cut}"));
    }
    Ok(1.0 + theta / n_cut.ln())
}
