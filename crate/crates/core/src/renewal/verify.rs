use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::green::{green_direct, heat_kernel, GreenEvaluator};
use crate::renewal::density::renewal_density;
use crate::renewal::law::{lambda_for_theta, law_from_harmonic};
use crate::renewal::spacetime::{
    spacetime_point_fourier, spacetime_renewal_density, SpaceTimeLaw, SpatialKernel, DEFAULT_SPACETIME_BUDGET,
};

/// How the limiting profile G_θ(t) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenRoute {
    /// Single integral over `s` (and its extension beyond 1).
    Quadrature,
    /// `∫ e^{θs} f_s(t) ds` against the subordinator densities.
    Direct,
}

fn green_value(route: GreenRoute, theta: f64, t: f64) -> Result<f64> {
    match route {
        GreenRoute::Quadrature => GreenEvaluator::new(theta).value(t),
        GreenRoute::Direct => green_direct(theta, t, 1.0 / 1024.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalRow {
    pub n_cut: usize,
    pub n: usize,
    pub u: f64,
    /// `(N / ln N) U(n) / G_θ(t)`
    pub ratio: f64,
}

impl RenewalRow {
    pub fn deviation(&self) -> f64 {
        (self.ratio - 1.0).abs()
    }
}

/// Sweep of the sharp renewal theorem for the harmonic law.
///
/// Tolerances applied to these ratios are empirical: no convergence rate
/// is available.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalReport {
    pub theta: f64,
    pub t: f64,
    pub green: f64,
    pub rows: Vec<RenewalRow>,
}

impl RenewalReport {
    /// Whether `|ratio - 1|` is non-increasing along the sweep.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].deviation() <= w[0].deviation())
    }

    pub fn final_deviation(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, RenewalRow::deviation)
    }
}

pub fn verify_renewal_theorem(ns: &[usize], theta: f64, t: f64, route: GreenRoute) -> Result<RenewalReport> {
    if !(t > 0.0 && t <= 1.0) {
        return domain(format!("renewal sweep needs t in (0, 1], got {t}"));
    }
    if ns.iter().any(|&n| n < 2) {
        return domain("every N must be at least 2");
    }
    let green = green_value(route, theta, t)?;
    let rows = ns
        .par_iter()
        .map(|&n_cut| {
            let n = ((t * n_cut as f64).round() as usize).max(1);
            let law = law_from_harmonic::<f64>(n_cut)?;
            let lambda = lambda_for_theta(n_cut as f64, theta)?;
            let u = renewal_density(&law, lambda, n)?.at(n);
            let scale = n_cut as f64 / (n_cut as f64).ln();
            Ok(RenewalRow { n_cut, n, u, ratio: scale * u / green })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RenewalReport { theta, t, green, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeReport {
    pub n_cut: usize,
    pub n: usize,
    pub x: Vec<i64>,
    /// Whether `(n, x)` lies on the support sublattice; off it the value is exactly zero.
    pub admissible: bool,
    pub value: f64,
    /// `G_θ(t) g_{ct}(x / √N)` times the periodicity factor.
    pub limit: f64,
    /// `N^{1+d/2} / ln N · bsU(n, x) / limit`
    pub ratio: f64,
}

/// Space-time renewal theorem at one point. With `adjust_parity` the
/// lattice point is moved onto the support sublattice.
pub fn verify_spacetime_theorem<K: SpatialKernel>(
    law: &SpaceTimeLaw<K>,
    theta: f64,
    t: f64,
    x_scaled: &[f64],
    adjust_parity: bool,
) -> Result<SpaceTimeReport> {
    let n_cut = law.base().cutoff();
    if n_cut < 2 {
        return domain("space-time sweep needs N >= 2");
    }
    if !(t > 0.0 && t <= 1.0) {
        return domain(format!("space-time sweep needs t in (0, 1], got {t}"));
    }
    let d = law.dim();
    if x_scaled.len() != d {
        return domain("point dimension does not match the kernel");
    }
    let nf = n_cut as f64;
    let n = ((t * nf).round() as usize).max(1);
    let mut x: Vec<i64> = x_scaled.iter().map(|v| (v * nf.sqrt()).round() as i64).collect();
    if adjust_parity && !law.kernel().admissible(n, &x) {
        x[0] += 1;
    }
    let admissible = law.kernel().admissible(n, &x);
    let lambda = lambda_for_theta(nf, theta)?;
    let value = if !admissible {
        0.0
    } else if n <= 64 {
        spacetime_renewal_density(law, lambda, n, DEFAULT_SPACETIME_BUDGET)?.value(n, &x)
    } else {
        spacetime_point_fourier(law, lambda, n, &x)?
    };
    let xs: Vec<f64> = x.iter().map(|&c| c as f64 / nf.sqrt()).collect();
    let c = law.kernel().variance_constant();
    let limit = GreenEvaluator::new(theta).value(t)? * heat_kernel(c, t, &xs)? * law.kernel().periodicity();
    let ratio = nf.powf(1.0 + d as f64 / 2.0) / nf.ln() * value / limit;
    Ok(SpaceTimeReport { n_cut, n, x, admissible, value, limit, ratio })
}
