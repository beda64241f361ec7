use crate::error::{domain, Error, Result};
use crate::renewal::law::InterArrivalLaw;
use crate::scalar::{as_f64, Scalar};
use crate::sum::CompensatedSum;

/// Values of `U` above this magnitude are reported as overflow.
pub const MAGNITUDE_LIMIT: f64 = 1e300;

/// `U_{N,λ}(n) = Σ_k λ^k P(τ_k = n)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalDensity<T> {
    lambda: T,
    cutoff: usize,
    values: Vec<T>,
}

impl<T: Scalar> RenewalDensity<T> {
    pub fn lambda(&self) -> &T {
        &self.lambda
    }

    /// Cutoff `N` of the law the density was built from.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `U(n)`; panics past `n_max`.
    pub fn at(&self, n: usize) -> T {
        self.values[n].clone()
    }
}

/// Solves `U(n) = λ Σ_{m=1}^{min(n,N)} P(T = m) U(n - m)` with `U(0) = 1`.
pub fn renewal_density<T: Scalar>(law: &InterArrivalLaw<T>, lambda: T, n_max: usize) -> Result<RenewalDensity<T>> {
    if lambda < T::zero() {
        return domain("lambda must be non-negative");
    }
    let p = law.probs();
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(T::one());
    for n in 1..=n_max {
        let top = n.min(p.len());
        let mut acc = T::zero();
        for m in 1..=top {
            acc += p[m - 1].clone() * values[n - m].clone();
        }
        let u = acc * lambda.clone();
        let mag = as_f64(&u);
        if !(mag.abs() <= MAGNITUDE_LIMIT) {
            return Err(Error::Overflow { n, value: mag, limit: MAGNITUDE_LIMIT });
        }
        values.push(u);
    }
    Ok(RenewalDensity { lambda, cutoff: law.cutoff(), values })
}

/// Law of `τ_k` restricted to `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauPmf<T> {
    pub pmf: Vec<T>,
    /// `P(τ_k > n_max)`.
    pub beyond: T,
}

/// `P(τ_k = n)` for `n ≤ n_max` by `k`-fold convolution.
pub fn exact_tau_pmf<T: Scalar>(law: &InterArrivalLaw<T>, k: usize, n_max: usize) -> TauPmf<T> {
    let p = law.probs();
    let mut cur = vec![T::zero(); n_max + 1];
    cur[0] = T::one();
    for _ in 0..k {
        let mut next = vec![T::zero(); n_max + 1];
        for (j, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (m, pm) in p.iter().enumerate() {
                let idx = j + m + 1;
                if idx > n_max {
                    break;
                }
                next[idx] += c.clone() * pm.clone();
            }
        }
        cur = next;
    }
    let mut acc = CompensatedSum::new();
    for v in &cur {
        acc.add(v.clone());
    }
    TauPmf { beyond: T::one() - acc.value(), pmf: cur }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::law::law_from_harmonic;
    use crate::Rational;
    use num_traits::{One, Zero};

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn harmonic_two_exact() {
        let law = law_from_harmonic::<Rational>(2).unwrap();
        let u = renewal_density(&law, Rational::one(), 3).unwrap();
        assert_eq!(u.at(0), Rational::one());
        assert_eq!(u.at(1), q(2, 3));
        assert_eq!(u.at(2), q(7, 9));
        let t2 = exact_tau_pmf(&law, 2, 4);
        assert_eq!(t2.pmf, vec![Rational::zero(), Rational::zero(), q(4, 9), q(4, 9), q(1, 9)]);
        assert!(t2.beyond.is_zero());
    }

    #[test]
    fn zero_lambda() {
        let law = law_from_harmonic::<f64>(5).unwrap();
        let u = renewal_density(&law, 0.0, 10).unwrap();
        assert!(u.values()[1..].iter().all(|&v| v == 0.0));
        assert!(renewal_density(&law, -1.0, 3).is_err());
    }

    #[test]
    fn overflow_guard() {
        let law = law_from_harmonic::<f64>(1).unwrap();
        let err = renewal_density(&law, 1e10, 40).unwrap_err();
        assert!(matches!(err, Error::Overflow { n: 31, .. }));
    }

    #[test]
    fn tau_trivial_cases() {
        let law = law_from_harmonic::<f64>(4).unwrap();
        assert_eq!(exact_tau_pmf(&law, 0, 3).pmf, vec![1.0, 0.0, 0.0, 0.0]);
        let one = exact_tau_pmf(&law, 1, 6);
        assert_eq!(&one.pmf[1..5], law.probs());
        assert!(one.beyond.abs() < 1e-15);
    }
}
