//! Second moments of the disordered pinning and 2-d directed polymer
//! partition functions in the critical window.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::green::heat_kernel;
use crate::renewal::{
    renewal_density, spacetime_point_fourier, spacetime_renewal_density, InterArrivalLaw, SpaceTimeLaw, SpatialKernel,
    DEFAULT_SPACETIME_BUDGET,
};
use crate::special::{srw_prob, srw_row, EULER_GAMMA};
use crate::sum::{compensated_sum, CompensatedSum};

/// `γ + ln 16 − π`.
pub const ALPHA: f64 = EULER_GAMMA + 4.0 * LN_2 - PI;

type Cgf = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Law of the disorder through its log-moment generating function
/// `λ(β) = ln E[e^{βω}]` and the cumulants `κ₃, κ₄` of `ω`.
#[derive(Clone)]
pub struct DisorderSpec {
    name: String,
    cgf: Cgf,
    kappa3: f64,
    kappa4: f64,
}

impl fmt::Debug for DisorderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DisorderSpec")
            .field("name", &self.name)
            .field("kappa3", &self.kappa3)
            .field("kappa4", &self.kappa4)
            .finish()
    }
}

impl DisorderSpec {
    /// Standard Gaussian, `λ(β) = β²/2`.
    pub fn gaussian() -> Self {
        Self { name: "gaussian".into(), cgf: Arc::new(|b| 0.5 * b * b), kappa3: 0.0, kappa4: 0.0 }
    }

    /// Symmetric ±1 variables, `λ(β) = ln cosh β`.
    pub fn rademacher() -> Self {
        let cgf = |b: f64| {
            let a = b.abs();
            a + (-2.0 * a).exp().ln_1p() - LN_2
        };
        Self { name: "rademacher".into(), cgf: Arc::new(cgf), kappa3: 0.0, kappa4: -2.0 }
    }

    /// A user supplied law. `λ(0) = 0` and convexity are spot-checked.
    pub fn custom<F>(name: &str, cgf: F, kappa3: f64, kappa4: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if cgf(0.0).abs() > 1e-14 {
            return Err(Error::InvalidDisorder(format!("{name}: lambda(0) must vanish")));
        }
        let grid: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
        for w in grid.windows(3) {
            let (a, b, c) = (cgf(w[0]), cgf(w[1]), cgf(w[2]));
            if !(a.is_finite() && b.is_finite() && c.is_finite()) {
                return Err(Error::InvalidDisorder(format!("{name}: lambda must be finite")));
            }
            if a + c - 2.0 * b < -1e-10 {
                return Err(Error::InvalidDisorder(format!("{name}: lambda is not convex near {}", w[1])));
            }
        }
        Ok(Self { name: name.into(), cgf: Arc::new(cgf), kappa3, kappa4 })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kappa3(&self) -> f64 {
        self.kappa3
    }

    pub fn kappa4(&self) -> f64 {
        self.kappa4
    }

    pub fn cgf(&self, beta: f64) -> f64 {
        (self.cgf)(beta)
    }

    /// `σ_β² = e^{λ(2β) − 2λ(β)} − 1`.
    pub fn sigma2(&self, beta: f64) -> Result<f64> {
        if !(beta >= 0.0) {
            return domain(format!("beta must be non-negative, got {beta}"));
        }
        Ok((self.cgf(2.0 * beta) - 2.0 * self.cgf(beta)).exp_m1().max(0.0))
    }

    /// Solves `σ_β² = target` by bisection.
    pub fn beta_from_sigma2(&self, target: f64) -> Result<f64> {
        if !(target >= 0.0) {
            return domain(format!("target sigma^2 must be non-negative, got {target}"));
        }
        if target == 0.0 {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut prev = 0.0;
        loop {
            let v = self.sigma2(hi)?;
            if v < prev * (1.0 - 1e-12) {
                return Err(Error::InvalidDisorder(format!("{}: sigma^2 is not monotone in beta", self.name)));
            }
            if v >= target {
                break;
            }
            if hi > 1e6 || !v.is_finite() {
                return Err(Error::InvalidDisorder(format!("{}: sigma^2 never reaches {target}", self.name)));
            }
            prev = v;
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sigma2(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `ε − κ₃ ε^{3/2} + (3/2 κ₃² − 7/12 κ₄ − 1/2) ε²`.
    pub fn series_beta2(&self, eps: f64) -> f64 {
        let k3 = self.kappa3;
        let k4 = self.kappa4;
        eps - k3 * eps.powf(1.5) + (1.5 * k3 * k3 - 7.0 / 12.0 * k4 - 0.5) * eps * eps
    }
}

/// `u(n) = C(2n, n) / 4^n`.
pub fn return_prob(n: u64) -> f64 {
    crate::special::central_binomial_prob(n)
}

/// `r(n) = u(n)²` on `{1, ..., N}`.
pub fn pinning_weights(n_cut: usize) -> Result<InterArrivalLaw<f64>> {
    if n_cut == 0 {
        return domain("pinning law needs N >= 1");
    }
    InterArrivalLaw::from_weights((1..=n_cut as u64).map(|n| return_prob(n).powi(2)).collect())
}

/// `R_N` together with `π R_N − ln N − α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaCheck {
    pub n_cut: usize,
    pub r_n: f64,
    pub residual: f64,
}

pub fn alpha_check(n_cut: usize) -> Result<AlphaCheck> {
    if n_cut < 2 {
        return domain("alpha check needs N >= 2");
    }
    let mut acc = CompensatedSum::new();
    for n in 1..=n_cut as u64 {
        acc.add(return_prob(n).powi(2));
    }
    let r_n = acc.value();
    Ok(AlphaCheck { n_cut, r_n, residual: PI * r_n - (n_cut as f64).ln() - ALPHA })
}

/// Disorder strength on the critical window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub beta: f64,
    pub sigma2: f64,
    /// `σ_β² R_N`
    pub lambda: f64,
}

/// `β` with `σ_β² = (1 + θ / ln N) / R_N` for the pinning normalizer `R_N`.
pub fn beta_for_theta(spec: &DisorderSpec, n_cut: usize, theta: f64) -> Result<Coupling> {
    if n_cut < 2 {
        return domain("beta_for_theta needs N >= 2");
    }
    let law = pinning_weights(n_cut)?;
    let r_n = *law.normalizer();
    let sigma2 = (1.0 + theta / (n_cut as f64).ln()) / r_n;
    if sigma2 < 0.0 {
        return domain(format!("theta = {theta} gives negative sigma^2 at N = {n_cut}"));
    }
    let beta = spec.beta_from_sigma2(sigma2)?;
    Ok(Coupling { beta, sigma2, lambda: sigma2 * r_n })
}

/// Coupling at a given `β`.
pub fn coupling(spec: &DisorderSpec, n_cut: usize, beta: f64) -> Result<Coupling> {
    let law = pinning_weights(n_cut)?;
    let sigma2 = spec.sigma2(beta)?;
    Ok(Coupling { beta, sigma2, lambda: sigma2 * law.normalizer() })
}

/// A second moment with the coupling it was computed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub coupling: Coupling,
}

fn check_range(n: usize, n_cut: usize) -> Result<()> {
    if n == 0 || n > n_cut {
        return domain(format!("need 1 <= n <= N, got n = {n}, N = {n_cut}"));
    }
    Ok(())
}

/// Constrained pinning second moment `U_{N,λ}(n) / σ_β²`, `λ = σ_β² R_N`.
pub fn pinning_second_moment(n: usize, n_cut: usize, beta: f64, spec: &DisorderSpec) -> Result<Moment> {
    check_range(n, n_cut)?;
    let c = coupling(spec, n_cut, beta)?;
    if c.sigma2 == 0.0 {
        return Ok(Moment { value: return_prob(n as u64).powi(2), coupling: c });
    }
    let law = pinning_weights(n_cut)?;
    let u = renewal_density(&law, c.lambda, n)?;
    Ok(Moment { value: u.at(n) / c.sigma2, coupling: c })
}

/// Free pinning second moment `1 + Σ_{ℓ ≤ n} U_{N,λ}(ℓ)`.
pub fn pinning_free_second_moment(n: usize, n_cut: usize, beta: f64, spec: &DisorderSpec) -> Result<Moment> {
    check_range(n, n_cut)?;
    let c = coupling(spec, n_cut, beta)?;
    let law = pinning_weights(n_cut)?;
    let u = renewal_density(&law, c.lambda, n)?;
    let mut acc = CompensatedSum::new();
    acc.extend(u.values().iter().copied());
    Ok(Moment { value: acc.value(), coupling: c })
}

/// `w_n(a) w_n(b)` with `a = x₁ + x₂`, `b = x₁ − x₂`.
pub fn polymer_kernel_q(n: usize, x: [i64; 2]) -> f64 {
    srw_prob(n as u64, x[0] + x[1]) * srw_prob(n as u64, x[0] - x[1])
}

/// Step law `p(n, x) = q_n(x)² / u(n)²` of the polymer replica overlap.
///
/// In the diagonal coordinates it is the product of two copies of
/// `κ_n(j) = w_n(j)² / u(n)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolymerKernel;

impl PolymerKernel {
    fn kappa(n: usize) -> Vec<f64> {
        let sq: Vec<f64> = srw_row(n as u64).into_iter().map(|w| w * w).collect();
        let u = compensated_sum(sq.iter().copied());
        sq.into_iter().map(|v| v / u).collect()
    }

    /// `q_n(x)²` for all `x`, with `Σ_x q_n(x)²`.
    pub fn squared(&self, n: usize) -> (Vec<([i64; 2], f64)>, f64) {
        let r = n as i64;
        let mut out = Vec::new();
        let mut acc = CompensatedSum::new();
        for a in (-r..=r).step_by(2) {
            for b in (-r..=r).step_by(2) {
                let x = [(a + b) / 2, (a - b) / 2];
                let q = polymer_kernel_q(n, x);
                out.push((x, q * q));
                acc.add(q * q);
            }
        }
        (out, acc.value())
    }
}

impl SpatialKernel for PolymerKernel {
    fn dim(&self) -> usize {
        2
    }

    fn radius(&self, n: usize) -> usize {
        n
    }

    fn pmf(&self, n: usize) -> Vec<(Vec<i64>, f64)> {
        let k = Self::kappa(n);
        let r = n as i64;
        let mut out = Vec::with_capacity((n + 1) * (n + 1));
        for a in (-r..=r).step_by(2) {
            for b in (-r..=r).step_by(2) {
                let p = k[(a + r) as usize] * k[(b + r) as usize];
                if p > 0.0 {
                    out.push((vec![(a + b) / 2, (a - b) / 2], p));
                }
            }
        }
        out
    }

    fn admissible(&self, n: usize, x: &[i64]) -> bool {
        (x[0] + x[1] + n as i64) % 2 == 0
    }

    fn variance_constant(&self) -> f64 {
        0.25
    }

    fn periodicity(&self) -> f64 {
        2.0
    }

    fn factor(&self, n: usize) -> Option<Vec<f64>> {
        Some(Self::kappa(n))
    }

    fn factor_coords(&self, x: &[i64]) -> Vec<i64> {
        vec![x[0] + x[1], x[0] - x[1]]
    }
}

/// Space-time law `P(T = n, X = x) = q_n(x)² / R_N`.
pub fn polymer_law(n_cut: usize) -> Result<SpaceTimeLaw<PolymerKernel>> {
    SpaceTimeLaw::new(pinning_weights(n_cut)?, PolymerKernel)
}

/// Constrained polymer second moment `bsU_{N,λ}(n, x) / σ_β²`.
/// Off the even sublattice the value is exactly zero.
pub fn polymer_second_moment(n: usize, x: [i64; 2], n_cut: usize, beta: f64, spec: &DisorderSpec) -> Result<Moment> {
    check_range(n, n_cut)?;
    let c = coupling(spec, n_cut, beta)?;
    if !PolymerKernel.admissible(n, &x) {
        return Ok(Moment { value: 0.0, coupling: c });
    }
    if c.sigma2 == 0.0 {
        return Ok(Moment { value: polymer_kernel_q(n, x).powi(2), coupling: c });
    }
    let law = polymer_law(n_cut)?;
    let v = if n <= 64 {
        spacetime_renewal_density(&law, c.lambda, n, DEFAULT_SPACETIME_BUDGET)?.value(n, &x)
    } else {
        spacetime_point_fourier(&law, c.lambda, n, &x)?
    };
    Ok(Moment { value: v / c.sigma2, coupling: c })
}

/// Free polymer second moment from the space-time program, checked
/// against the pinning free moment.
pub fn polymer_free_second_moment(n: usize, n_cut: usize, beta: f64, spec: &DisorderSpec) -> Result<Moment> {
    check_range(n, n_cut)?;
    let c = coupling(spec, n_cut, beta)?;
    let law = polymer_law(n_cut)?;
    let st = spacetime_renewal_density(&law, c.lambda, n, DEFAULT_SPACETIME_BUDGET)?;
    let mut acc = CompensatedSum::new();
    for l in 0..=n {
        acc.add(st.slice_sum(l));
    }
    let value = acc.value();
    let pinning = pinning_free_second_moment(n, n_cut, beta, spec)?.value;
    if (value - pinning).abs() > 1e-10 * pinning {
        return domain(format!("free moments disagree: polymer {value}, pinning {pinning}"));
    }
    Ok(Moment { value, coupling: c })
}

/// `sup |n p(n, x) − 2 g_{1/4}(x/√n)|` over the even sublattice with `|x| ≤ 3√n`.
pub fn local_limit_deviation(n: usize) -> Result<f64> {
    if n == 0 {
        return domain("local limit check needs n >= 1");
    }
    let k = PolymerKernel::kappa(n);
    let r = n as i64;
    let lim = (3.0 * (n as f64).sqrt()).floor() as i64;
    let sn = (n as f64).sqrt();
    let mut worst: f64 = 0.0;
    for x1 in -lim..=lim {
        for x2 in -lim..=lim {
            if (x1 + x2 + r) % 2 != 0 || ((x1 * x1 + x2 * x2) as f64).sqrt() > 3.0 * sn {
                continue;
            }
            let (a, b) = (x1 + x2, x1 - x2);
            let p = if a.abs() <= r && b.abs() <= r { k[(a + r) as usize] * k[(b + r) as usize] } else { 0.0 };
            let g = heat_kernel(0.25, 1.0, &[x1 as f64 / sn, x2 as f64 / sn])?;
            worst = worst.max((n as f64 * p - 2.0 * g).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_value() {
        assert_relative_eq!(ALPHA, 0.208_211_733_551_520_8, epsilon = 1e-15);
        assert_eq!(alpha_check(2).unwrap().r_n, 0.25 + 9.0 / 64.0);
    }

    #[test]
    fn pinning_weights_small() {
        let law = pinning_weights(2).unwrap();
        assert_eq!(law.weight(1), 0.25);
        assert_eq!(law.weight(2), 9.0 / 64.0);
    }

    #[test]
    fn gaussian_and_rademacher_sigma() {
        let g = DisorderSpec::gaussian();
        assert_relative_eq!(g.sigma2(0.7).unwrap(), (0.49f64).exp_m1(), max_relative = 1e-14);
        assert_eq!(g.sigma2(0.0).unwrap(), 0.0);
        let r = DisorderSpec::rademacher();
        let b: f64 = 0.8;
        let want = (2.0 * b).cosh() / b.cosh().powi(2) - 1.0;
        assert_relative_eq!(r.sigma2(b).unwrap(), want, max_relative = 1e-13);
    }

    #[test]
    fn inversion_round_trip() {
        for spec in [DisorderSpec::gaussian(), DisorderSpec::rademacher()] {
            for target in [1e-4, 0.3, 0.9] {
                let b = spec.beta_from_sigma2(target).unwrap();
                assert_relative_eq!(spec.sigma2(b).unwrap(), target, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(DisorderSpec::custom("shifted", |b| b * b + 1.0, 0.0, 0.0).is_err());
        assert!(DisorderSpec::custom("concave", |b| -b * b, 0.0, 0.0).is_err());
        assert!(DisorderSpec::gaussian().beta_from_sigma2(-1.0).is_err());
        let bounded = DisorderSpec::custom("capped", |b: f64| 0.5 * b.min(1.0).powi(2) + (b - 1.0).max(0.0), 0.0, 0.0);
        assert!(bounded.unwrap().beta_from_sigma2(1e9).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(polymer_kernel_q(1, [1, 0]), 0.25);
        assert_eq!(polymer_kernel_q(1, [0, 0]), 0.0);
        let (_, total) = PolymerKernel.squared(2);
        assert_relative_eq!(total, 9.0 / 64.0, max_relative = 1e-15);
    }

    #[test]
    fn first_step_moments() {
        let g = DisorderSpec::gaussian();
        for beta in [0.0, 0.3] {
            assert_relative_eq!(pinning_second_moment(1, 8, beta, &g).unwrap().value, 0.25, max_relative = 1e-15);
            let m = polymer_second_moment(1, [1, 0], 8, beta, &g).unwrap().value;
            assert_relative_eq!(m, 1.0 / 16.0, max_relative = 1e-15);
        }
        assert_eq!(polymer_second_moment(3, [1, 1], 8, 0.3, &g).unwrap().value, 0.0);
    }
}
