//! The exponentially weighted continuum renewal density
//! G_θ(t) = ∫_0^∞ e^{θ s} f_s(t) ds, its integral Ḡ_θ, the heat kernel and
//! the space-time product G_θ(t) g_{ct}(x).
//!
//! On `(0, 1]` G_θ is a single integral over `s`. For small `t` the
//! substitution `σ = s log(1/t)` is used, which makes the integrand
//! uniformly well scaled and gives
//! `t log²(1/t) G_θ(t) = ∫ σ e^{-σ} e^{(θ-γ)σ/x} / Γ(1 + σ/x) dσ` with
//! `x = log(1/t)`.
//!
//! Beyond 1 G_θ is obtained from the decomposition according to the jump
//! that straddles the last integer below `t`:
//! `G_θ(t) = ∫∫_{0<u<T≤v<t, v-u<1} G_θ(u) G_θ(t-v) / (v-u) du dv`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::dickman::{density_f, DensityGrid};
use crate::error::{domain, Result};
use crate::quad::{gauss_legendre8_nodes, graded_breaks, integrate_semi_infinite};
use crate::special::{log_gamma, EULER_GAMMA};

/// Default relative tolerance of the `s`-quadratures.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Step of the cached extension grids.
pub const EXTENSION_STEP: f64 = 1.0 / 1024.0;
/// Largest `t` the extension supports.
pub const MAX_T: f64 = 8.0;

const TABLE_NODES: usize = 2048;

fn ln_gamma(x: f64) -> f64 {
    log_gamma(x).expect("positive argument")
}

/// `t log²(1/t) G_θ(t)` for `x = log(1/t) ≥ 1`, with the cutoff used.
fn scaled_green(theta: f64, x: f64, tol: f64) -> (f64, f64) {
    let a = (theta - EULER_GAMMA) / x;
    let f = |sig: f64| {
        if sig <= 0.0 {
            return 0.0;
        }
        (sig.ln() - sig + a * sig - ln_gamma(1.0 + sig / x)).exp()
    };
    let r = integrate_semi_infinite(f, 1.0, tol);
    (r.value, r.cutoff / x)
}

/// `log(1/u) Ḡ_θ(u)` for `x = log(1/u) ≥ 1`.
fn scaled_green_bar(theta: f64, x: f64, tol: f64) -> f64 {
    let a = (theta - EULER_GAMMA) / x;
    let f = |sig: f64| (-sig + a * sig - ln_gamma(1.0 + sig / x)).exp();
    integrate_semi_infinite(f, 1.0, tol).value
}

fn direct_green(theta: f64, t: f64, tol: f64) -> (f64, f64) {
    let lt = t.ln();
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (s.ln() + (theta - EULER_GAMMA) * s + (s - 1.0) * lt - ln_gamma(s + 1.0)).exp()
    };
    let r = integrate_semi_infinite(f, 1.0, tol);
    (r.value, r.cutoff)
}

fn direct_green_bar(theta: f64, u: f64, tol: f64) -> f64 {
    let lu = u.ln();
    let f = |s: f64| ((theta - EULER_GAMMA) * s + s * lu - ln_gamma(s + 1.0)).exp();
    integrate_semi_infinite(f, 1.0, tol).value
}

/// Composite 8-point Gauss–Legendre over `(0, ∞)` for smooth integrands
/// vanishing at infinity.
fn smooth_tail<F: Fn(f64) -> f64>(f: F) -> f64 {
    let mut total = 0.0;
    let mut a: f64 = 0.0;
    let mut peak: f64 = 0.0;
    loop {
        let w = (0.05 * a).max(0.5);
        let mut piece = 0.0;
        for (x, wt) in gauss_legendre8_nodes(a, a + w) {
            let v = f(x);
            peak = peak.max(v);
            piece += wt * v;
        }
        total += piece;
        a += w;
        let fa = f(a);
        if fa < peak && fa < 1e-18 * total && piece < 1e-17 * total {
            return total;
        }
    }
}

/// Smooth re-parametrisations of G_θ and Ḡ_θ on `(0, 1]`, tabulated in
/// `y = 1 / (1 + log(1/t))`.
#[derive(Debug)]
struct GreenTable {
    /// `t (1 + x)² G_θ(t)`
    q: Vec<f64>,
    /// `(1 + x) Ḡ_θ(t)`
    r: Vec<f64>,
}

impl GreenTable {
    fn build(theta: f64) -> Self {
        let rows: Vec<(f64, f64)> = (0..=TABLE_NODES)
            .into_par_iter()
            .map(|j| {
                if j == 0 {
                    return (1.0, 1.0);
                }
                let y = j as f64 / TABLE_NODES as f64;
                let x = 1.0 / y - 1.0;
                let c = theta - EULER_GAMMA;
                if x >= 1.0 {
                    let a = c / x;
                    let k = smooth_tail(|sig| {
                        if sig <= 0.0 {
                            return 0.0;
                        }
                        (sig.ln() - sig + a * sig - ln_gamma(1.0 + sig / x)).exp()
                    });
                    let l = smooth_tail(|sig| (-sig + a * sig - ln_gamma(1.0 + sig / x)).exp());
                    let s = (1.0 + x) / x;
                    (k * s * s, l * s)
                } else {
                    let g = smooth_tail(|s| {
                        if s <= 0.0 {
                            return 0.0;
                        }
                        (s.ln() + c * s - s * x - ln_gamma(s + 1.0)).exp()
                    });
                    let gb = smooth_tail(|s| (c * s - s * x - ln_gamma(s + 1.0)).exp());
                    ((1.0 + x) * (1.0 + x) * g, (1.0 + x) * gb)
                }
            })
            .collect();
        let (q, r) = rows.into_iter().unzip();
        Self { q, r }
    }

    fn lookup(v: &[f64], y: f64) -> f64 {
        let p = y * TABLE_NODES as f64;
        let base = (p.floor() as isize - 1).clamp(0, TABLE_NODES as isize - 3) as usize;
        let x = p - base as f64;
        let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        l0 * v[base] + l1 * v[base + 1] + l2 * v[base + 2] + l3 * v[base + 3]
    }

    fn green(&self, t: f64) -> f64 {
        let x = -t.ln();
        let y = 1.0 / (1.0 + x);
        Self::lookup(&self.q, y) * y * y / t
    }

    fn green_bar(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let x = -u.ln();
        let y = 1.0 / (1.0 + x);
        Self::lookup(&self.r, y) * y
    }
}

/// Evaluator for G_θ at a fixed θ.
///
/// The `(0, 1]` interpolation table and the per-unit-interval extension
/// grids are filled lazily, each exactly once; concurrent readers block
/// on the fill and then share the result.
#[derive(Debug)]
pub struct GreenEvaluator {
    theta: f64,
    quad_tol: f64,
    table: OnceLock<GreenTable>,
    /// Grid of G_θ on `[k, k + 1]` at step [`EXTENSION_STEP`], index `k - 1`.
    extension: Vec<OnceLock<Vec<f64>>>,
}

/// A value of G_θ together with the `s`-cutoff used by its quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    pub s_max: f64,
}

impl GreenEvaluator {
    pub fn new(theta: f64) -> Self {
        Self::with_tolerance(theta, DEFAULT_QUAD_TOL)
    }

    pub fn with_tolerance(theta: f64, quad_tol: f64) -> Self {
        let units = MAX_T as usize;
        Self { theta, quad_tol, table: OnceLock::new(), extension: (0..units).map(|_| OnceLock::new()).collect() }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// G_θ(t) on `(0, 1]` by quadrature over `s`.
    pub fn green_detailed(&self, t: f64) -> Result<GreenValue> {
        if !(t > 0.0) {
            return domain(format!("G_theta requires t > 0, got {t}"));
        }
        if t > 1.0 {
            return domain(format!("G_theta quadrature covers (0, 1]; use the extension for t = {t}"));
        }
        let x = -t.ln();
        if x >= 1.0 {
            let (k, s_max) = scaled_green(self.theta, x, self.quad_tol * 1e-2);
            Ok(GreenValue { value: k / (t * x * x), s_max })
        } else {
            let (g, s_max) = direct_green(self.theta, t, self.quad_tol * 1e-2);
            Ok(GreenValue { value: g, s_max })
        }
    }

    pub fn green(&self, t: f64) -> Result<f64> {
        self.green_detailed(t).map(|g| g.value)
    }

    /// Ḡ_θ(u) = ∫_0^u G_θ for `u ∈ (0, 1]`.
    pub fn green_bar(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) || u > 1.0 {
            return domain(format!("G_bar requires u in (0, 1], got {u}"));
        }
        let x = -u.ln();
        let tol = self.quad_tol * 1e-2;
        Ok(if x >= 1.0 { scaled_green_bar(self.theta, x, tol) / x } else { direct_green_bar(self.theta, u, tol) })
    }

    /// G_θ(t) for any `t ∈ (0, MAX_T]`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if t <= 1.0 {
            self.green(t)
        } else {
            self.extend(t)
        }
    }

    /// G_θ(t) for `t > 1` through the straddle decomposition; delegates to
    /// the quadrature for `t ≤ 1`.
    pub fn extend(&self, t: f64) -> Result<f64> {
        if t <= 1.0 {
            return self.green(t);
        }
        if t > MAX_T {
            return domain(format!("G_theta extension supports t <= {MAX_T}, got {t}"));
        }
        let lower = (t.ceil() - 1.0) as usize;
        for k in 1..lower {
            self.extension_grid(k);
        }
        Ok(self.straddle(t, lower))
    }

    fn table(&self) -> &GreenTable {
        self.table.get_or_init(|| GreenTable::build(self.theta))
    }

    fn extension_grid(&self, k: usize) -> &[f64] {
        self.extension[k - 1].get_or_init(|| {
            for j in 1..k {
                self.extension_grid(j);
            }
            let n = (1.0 / EXTENSION_STEP) as usize;
            let left = if k == 1 { self.table().green(1.0) } else { *self.extension_grid(k - 1).last().unwrap() };
            let mut out = vec![left];
            let rest: Vec<f64> =
                (1..=n).into_par_iter().map(|j| self.straddle(k as f64 + j as f64 * EXTENSION_STEP, k)).collect();
            out.extend(rest);
            out
        })
    }

    /// G_θ at `u ∈ (0, lower]` from the table and the cached grids.
    fn green_known(&self, u: f64) -> f64 {
        if u <= 1.0 {
            return self.table().green(u);
        }
        let k = (u.ceil() - 1.0) as usize;
        let grid = self.extension[k - 1].get().expect("extension grid filled before use");
        let n = grid.len() - 1;
        let p = (u - k as f64) / EXTENSION_STEP;
        let base = (p.floor() as isize - 1).clamp(0, n as isize - 3) as usize;
        let x = p - base as f64;
        let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        l0 * grid[base] + l1 * grid[base + 1] + l2 * grid[base + 2] + l3 * grid[base + 3]
    }

    /// `I(v) = ∫_{v-1}^{T} G_θ(u) / (v - u) du` at `v = T + e`, `e ∈ (0, 1)`.
    fn inner(&self, e: f64, lower: usize) -> f64 {
        let top = lower as f64;
        let lo = top - 1.0 + e;
        if e <= 0.0 || lo >= top {
            return 0.0;
        }
        let mut cuts = vec![lo];
        let first_seam = lo.floor() as usize + 1;
        for k in first_seam..lower {
            cuts.push(k as f64);
        }
        cuts.push(top);
        let mut acc = 0.0;
        let last = cuts.len() - 2;
        for (i, w) in cuts.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            // G blows up at 0 and is only continuous at the integer seams
            let left_gap = if lower == 1 {
                Some(a)
            } else if i > 0 || a.fract() == 0.0 {
                Some(0.0)
            } else {
                None
            };
            let right_gap = if i == last { Some(e) } else { None };
            let mut min_width = 1e-13 * (b - a);
            if lower == 1 {
                min_width = min_width.min(0.1 * a);
            }
            let br = graded_breaks(a, b, left_gap, right_gap, 3.0, min_width, 0.125);
            for p in br.windows(2) {
                for (u, wt) in gauss_legendre8_nodes(p[0], p[1]) {
                    acc += wt * self.green_known(u) / ((top - u) + e);
                }
            }
        }
        acc
    }

    fn straddle(&self, t: f64, lower: usize) -> f64 {
        let table = self.table();
        let d = t - lower as f64;
        let w_min = 1e-12 * d;
        // ∫_0^{w_min} G(w) I(t - w) dw with I frozen at its value near t
        let mut acc = table.green_bar(w_min) * self.inner(d - 0.5 * w_min, lower);
        let br = graded_breaks(w_min, d, Some(w_min), Some(0.0), 3.0, 1e-13 * d, 0.125);
        for p in br.windows(2) {
            for (w, wt) in gauss_legendre8_nodes(p[0], p[1]) {
                acc += wt * table.green(w) * self.inner(d - w, lower);
            }
        }
        acc
    }
}

/// G_θ(t) for `t ∈ (0, 1]`.
pub fn green_g(theta: f64, t: f64) -> Result<f64> {
    GreenEvaluator::new(theta).green(t)
}

/// G_θ(t) for `t > 1` (delegates to [`green_g`] for `t ≤ 1`).
pub fn green_extend(theta: f64, t: f64) -> Result<f64> {
    GreenEvaluator::new(theta).extend(t)
}

/// Ḡ_θ(u) for `u ∈ (0, 1]`.
pub fn green_bar(theta: f64, u: f64) -> Result<f64> {
    GreenEvaluator::new(theta).green_bar(u)
}

/// G_θ(t) = ∫_0^∞ e^{θs} f_s(t) ds integrated directly against the
/// subordinator densities (grids of step `h` are built when `t > 2`).
pub fn green_direct(theta: f64, t: f64, h: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("G_theta requires t > 0, got {t}"));
    }
    let width = if t < 1.0 { (1.0 / -t.ln()).min(1.0) } else { 1.0 };
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let fs = if t <= 2.0 { density_f(s, t, h) } else { DensityGrid::build(s, h, t).and_then(|g| g.value(t)) };
        (theta * s).exp() * fs.unwrap_or(f64::NAN)
    };
    let r = integrate_semi_infinite(f, width, 1e-7);
    if !r.value.is_finite() {
        return domain("density evaluation failed inside the s-integral");
    }
    Ok(r.value)
}

/// g_{ct}(x) = (2π c t)^{-d/2} exp(-|x|² / (2 c t)).
pub fn heat_kernel(c: f64, t: f64, x: &[f64]) -> Result<f64> {
    if !(c > 0.0) {
        return domain(format!("heat kernel requires c > 0, got {c}"));
    }
    if !(t > 0.0) {
        return domain(format!("heat kernel requires t > 0, got {t}"));
    }
    let var = c * t;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let d = x.len() as f64;
    Ok((2.0 * PI * var).powf(-0.5 * d) * (-r2 / (2.0 * var)).exp())
}

/// The space-time density G_θ(t) g_{ct}(x).
pub fn green_spacetime(eval: &GreenEvaluator, c: f64, t: f64, x: &[f64]) -> Result<f64> {
    let g = heat_kernel(c, t, x)?;
    Ok(eval.value(t)? * g)
}
