//! Exact tails of `τ_k` for harmonic laws checked against the closed-form
//! local and tail inequalities. The constants in those inequalities are
//! only known to exist; the `*_constant` sweeps find the best values on a
//! finite range of parameters.

use crate::error::{domain, Result};
use crate::renewal::law::{law_from_harmonic, InterArrivalLaw};
use crate::sum::CompensatedSum;

/// One inequality instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs }
    }
}

/// Full laws of `τ_0, ..., τ_{k_max}` for the harmonic law with cutoff `m`.
#[derive(Debug, Clone)]
pub struct HarmonicTails {
    law: InterArrivalLaw<f64>,
    /// `pmfs[k][n] = P(τ_k = n)` for `n ≤ k m`.
    pmfs: Vec<Vec<f64>>,
}

impl HarmonicTails {
    pub fn new(m: usize, k_max: usize) -> Result<Self> {
        let law = law_from_harmonic::<f64>(m)?;
        let p = law.probs().to_vec();
        let mut pmfs = vec![vec![1.0]];
        for k in 1..=k_max {
            let prev = &pmfs[k - 1];
            let mut next = vec![0.0; k * m + 1];
            for (j, a) in prev.iter().enumerate() {
                for (i, b) in p.iter().enumerate() {
                    next[j + i + 1] += a * b;
                }
            }
            pmfs.push(next);
        }
        Ok(Self { law, pmfs })
    }

    pub fn law(&self) -> &InterArrivalLaw<f64> {
        &self.law
    }

    pub fn k_max(&self) -> usize {
        self.pmfs.len() - 1
    }

    /// `P(τ_k = n)`.
    pub fn point(&self, k: usize, n: usize) -> f64 {
        self.pmfs[k].get(n).copied().unwrap_or(0.0)
    }

    /// `P(τ_k ≥ n)`, summed from the top of the support.
    pub fn upper(&self, k: usize, n: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        acc.extend(self.pmfs[k].iter().skip(n).copied());
        acc.value().min(1.0)
    }

    /// `P(τ_k ≤ n)`.
    pub fn lower(&self, k: usize, n: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        acc.extend(self.pmfs[k].iter().take(n + 1).copied());
        acc.value().min(1.0)
    }
}

fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

fn sharp_local_rhs(tails: &HarmonicTails, k: usize, n: usize, big_c: f64, c: f64) -> f64 {
    let law = tails.law();
    let z = c * k as f64 / ((n as f64).ln() + 1.0);
    big_c * k as f64 * law.prob(n) * law.cdf(n).powi(k as i32 - 1) * (-z * log_plus(z)).exp()
}

fn check_k(tails: &HarmonicTails, k: usize) -> Result<()> {
    if k > tails.k_max() {
        return domain(format!("k = {k} exceeds the tabulated range {}", tails.k_max()));
    }
    Ok(())
}

/// `P(τ_k = n) ≤ C k P(T = n) P(T ≤ n)^{k-1} exp(-z log⁺ z)` with `z = c k / (ln n + 1)`.
pub fn bound_sharp_local(tails: &HarmonicTails, k: usize, n: usize, big_c: f64, c: f64) -> Result<BoundCheck> {
    check_k(tails, k)?;
    if n == 0 || n > tails.law().cutoff() {
        return domain(format!("sharp local estimate needs 1 <= n <= N, got n = {n}"));
    }
    Ok(BoundCheck::new(tails.point(k, n), sharp_local_rhs(tails, k, n, big_c, c)))
}

/// `P(τ_k ≥ n) ≤ (C k m / (n (ln m + 1)) ∧ 1)^{n/m}`.
pub fn bound_fuk_nagaev(tails: &HarmonicTails, k: usize, n: usize, big_c: f64) -> Result<BoundCheck> {
    check_k(tails, k)?;
    if n == 0 {
        return domain("upper-tail bound needs n >= 1");
    }
    let m = tails.law().cutoff() as f64;
    let base = (big_c * k as f64 * m / (n as f64 * (m.ln() + 1.0))).min(1.0);
    Ok(BoundCheck::new(tails.upper(k, n), base.powf(n as f64 / m)))
}

/// `P(τ_k ≤ n) ≤ (n (ln m + 1) / (c k m) ∧ 1)^{c k / (ln m + 1)}`.
pub fn bound_lower_tail(tails: &HarmonicTails, k: usize, n: usize, c: f64) -> Result<BoundCheck> {
    check_k(tails, k)?;
    if k == 0 {
        return domain("lower-tail bound needs k >= 1");
    }
    let m = tails.law().cutoff() as f64;
    let l = m.ln() + 1.0;
    let base = (n as f64 * l / (c * k as f64 * m)).min(1.0);
    Ok(BoundCheck::new(tails.lower(k, n), base.powf(c * k as f64 / l)))
}

/// Smallest `C` for which the sharp local estimate holds for all
/// `1 ≤ k ≤ k_max`, `1 ≤ n ≤ min(n_max, N)` at the given `c`.
pub fn sharp_local_minimal_constant(n_cut: usize, k_max: usize, n_max: usize, c: f64) -> Result<f64> {
    let tails = HarmonicTails::new(n_cut, k_max)?;
    let mut worst: f64 = 0.0;
    for k in 1..=k_max {
        for n in 1..=n_max.min(n_cut) {
            let lhs = tails.point(k, n);
            if lhs > 0.0 {
                worst = worst.max(lhs / sharp_local_rhs(&tails, k, n, 1.0, c));
            }
        }
    }
    Ok(worst)
}

/// Smallest `C` for which the upper-tail bound holds over the sweep.
pub fn fuk_nagaev_minimal_constant(ms: &[usize], k_max: usize, n_max: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &m in ms {
        let tails = HarmonicTails::new(m, k_max)?;
        let mf = m as f64;
        for k in 1..=k_max {
            for n in 1..=n_max {
                let lhs = tails.upper(k, n);
                if lhs > 0.0 {
                    let need = n as f64 * (mf.ln() + 1.0) / (k as f64 * mf) * lhs.powf(mf / n as f64);
                    worst = worst.max(need);
                }
            }
        }
    }
    Ok(worst)
}

/// Largest `c` for which the lower-tail bound holds over the sweep.
pub fn lower_tail_maximal_constant(ms: &[usize], k_max: usize, n_max: usize) -> Result<f64> {
    let mut best = f64::INFINITY;
    for &m in ms {
        let tails = HarmonicTails::new(m, k_max)?;
        let l = (m as f64).ln() + 1.0;
        for k in 1..=k_max {
            for n in 1..=n_max {
                let lhs = tails.lower(k, n);
                if lhs <= 0.0 {
                    continue;
                }
                let a = n as f64 * l / (k as f64 * m as f64);
                let b = k as f64 / l;
                // rhs(c) = 1 for c ≤ a, then (a / c)^{b c} decreasing
                let log_rhs = |c: f64| if c <= a { 0.0 } else { b * c * (a / c).ln() };
                let target = lhs.ln();
                if target >= 0.0 {
                    best = best.min(a);
                    continue;
                }
                let (mut lo, mut hi) = (a, 2.0 * a + 1.0);
                while log_rhs(hi) >= target {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if log_rhs(mid) >= target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                best = best.min(lo);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails_are_distributions() {
        let t = HarmonicTails::new(5, 6).unwrap();
        for k in 0..=6 {
            assert!((t.upper(k, 0) - 1.0).abs() < 1e-14);
            assert!((t.lower(k, 5 * k) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn k_one_sharp_local_holds_with_unit_constant() {
        let t = HarmonicTails::new(32, 1).unwrap();
        for n in 1..=32 {
            let b = bound_sharp_local(&t, 1, n, 1.0, 0.05).unwrap();
            assert!(b.holds);
            assert!((b.lhs - t.law().prob(n)).abs() < 1e-16);
        }
    }

    #[test]
    fn trivial_supports() {
        let t = HarmonicTails::new(8, 4).unwrap();
        let up = bound_fuk_nagaev(&t, 3, 25, 1.0).unwrap();
        assert_eq!(up.lhs, 0.0);
        assert!(up.holds);
        let low = bound_lower_tail(&t, 4, 3, 1.0).unwrap();
        assert_eq!(low.lhs, 0.0);
        assert!(low.holds);
    }

    #[test]
    fn range_errors() {
        let t = HarmonicTails::new(8, 4).unwrap();
        assert!(bound_sharp_local(&t, 5, 3, 1.0, 0.1).is_err());
        assert!(bound_sharp_local(&t, 2, 9, 1.0, 0.1).is_err());
        assert!(bound_lower_tail(&t, 0, 3, 1.0).is_err());
    }
}
