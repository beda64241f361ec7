//! The Dickman function ρ and the marginal density f_s of the Dickman
//! subordinator.
//!
//! On `(0, 1]` both are available in closed form. Beyond 1 they are built
//! panel by panel on a uniform grid whose step divides 1: every unit
//! interval `(k, k + 1]` is filled using values already computed on
//! `(k - 1, k]`, so the construction is a delay-equation march.
//!
//! For the density, the integral term over `(0, min(t - 1, 1)]` is known
//! exactly: with `q = a / (1 + a)` the integrand `s a^{s-1} (1 + a)^{-s}`
//! becomes `s q^{s-1} / (1 - q)`, an incomplete beta function with a
//! geometric series. Beyond 1 a running Simpson sum over the grid is used.

use crate::error::{domain, Error, Result};
use crate::quad::{gauss_legendre8, graded_breaks};
use crate::scalar::{as_f64, from_usize, lit, Real};
use crate::special::{log_gamma, EULER_GAMMA};

/// Default grid step, 2^-12.
pub const DEFAULT_STEP: f64 = 1.0 / 4096.0;
/// Default right end of a density grid.
pub const DEFAULT_T_MAX: f64 = 16.0;

fn euler_gamma<T: Real>() -> T {
    lit(EULER_GAMMA)
}

/// Grid resolution `1 / h`, validated to be an integer of at least 4.
fn cells_per_unit<T: Real>(h: T) -> Result<usize> {
    let hf = as_f64(&h);
    if !(hf > 0.0) || !hf.is_finite() {
        return domain(format!("grid step must be positive, got {hf}"));
    }
    let m = (1.0 / hf).round();
    if m < 4.0 || ((1.0 / hf) - m).abs() > 1e-9 * m {
        return domain(format!("grid step must be 1/m for an integer m >= 4, got {hf}"));
    }
    Ok(m as usize)
}

/// P(Y_s ≤ 1) = e^{-γ s} / Γ(s + 1).
pub fn mass_below_one<T: Real>(s: T) -> Result<T> {
    if !(s > T::zero()) {
        return domain(format!("subordinator time must be positive, got {s}"));
    }
    Ok((-euler_gamma::<T>() * s - log_gamma(s + T::one())?).exp())
}

fn closed_form<T: Real>(s: T, t: T, c: T) -> T {
    s * t.powf(s - T::one()) * c
}

/// `∫_0^x s a^{s-1} (1 + a)^{-s} da` for `0 ≤ x ≤ 1`.
fn straddle_series<T: Real>(s: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let q = x / (T::one() + x);
    let mut acc = T::zero();
    let mut qk = T::one();
    for k in 0..400 {
        let term = qk / (s + from_usize::<T>(k));
        acc = acc + term;
        if term <= T::epsilon() * lit(1e-2) * acc {
            break;
        }
        qk = qk * q;
    }
    s * q.powf(s) * acc
}

/// f_s(t) on (1, 2].
fn density_first_panel<T: Real>(s: T, t: T, c: T) -> T {
    (closed_form(s, t, c) * (T::one() - straddle_series(s, t - T::one()))).max(T::zero())
}

/// The Dickman function tabulated on `[0, t_max]` with step `h`.
#[derive(Debug, Clone)]
pub struct RhoTable<T> {
    h: T,
    m: usize,
    /// ρ at `i h`, `i = 0..=len`; index 0 holds the right limit ρ(0+) = 1.
    values: Vec<T>,
}

impl<T: Real> RhoTable<T> {
    /// Integrates `t ρ'(t) + ρ(t - 1) = 0` from `ρ ≡ 1` on `(0, 1]`.
    pub fn build(h: T, t_max: T) -> Result<Self> {
        let m = cells_per_unit(h)?;
        if !(t_max > T::zero()) {
            return domain("t_max must be positive");
        }
        let units = as_f64(&t_max).ceil().max(1.0) as usize;
        let len = units * m;
        let h = T::one() / from_usize::<T>(m);
        let mut values = vec![T::one(); len + 1];
        let sixth: T = lit(1.0 / 6.0);
        let four: T = lit(4.0);
        for i in (m + 1)..=len {
            let k = (i - 1) / m; // t_i ∈ (k, k + 1]
            let t0 = from_usize::<T>(i - 1) * h;
            let t1 = from_usize::<T>(i) * h;
            let tm = (t0 + t1) * lit(0.5);
            let lo = (k - 1) * m;
            let hi = k * m;
            let g0 = values[i - 1 - m] / t0;
            let g1 = values[i - m] / t1;
            let mid = interp(&values, lo, hi, from_usize::<T>(i - 1 - m) + lit(0.5));
            let gm = mid / tm;
            values[i] = values[i - 1] - h * sixth * (g0 + four * gm + g1);
        }
        Ok(Self { h, m, values })
    }

    pub fn step(&self) -> T {
        self.h
    }

    pub fn t_max(&self) -> T {
        from_usize::<T>(self.values.len() - 1) * self.h
    }

    /// Grid values at `t = i h`, starting from `i = 0`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return domain(format!("dickman_rho requires t > 0, got {t}"));
        }
        if t <= T::one() {
            return Ok(T::one());
        }
        if t > self.t_max() {
            return Err(Error::BeyondGrid { t: as_f64(&t), t_max: as_f64(&self.t_max()) });
        }
        let pos = t / self.h;
        let j = as_f64(&pos).floor() as usize;
        let tj = from_usize::<T>(j) * self.h;
        if t == tj {
            return Ok(self.values[j]);
        }
        // finish the partial cell with the same delay-equation integrand
        let k = j / self.m;
        let (lo, hi) = ((k - 1) * self.m, k * self.m);
        let integral = gauss_legendre8(
            |u: T| {
                let p = (u - T::one()) / self.h;
                interp(&self.values, lo, hi, p) / u
            },
            tj,
            t,
        );
        Ok(self.values[j] - integral)
    }
}

/// Cubic Lagrange interpolation of `values` at fractional index `p`, with
/// the four-point stencil kept inside `[lo, hi]`.
fn interp<T: Real>(values: &[T], lo: usize, hi: usize, p: T) -> T {
    let pf = as_f64(&p);
    let base = (pf.floor() as isize - 1).clamp(lo as isize, hi as isize - 3) as usize;
    let x = p - from_usize::<T>(base);
    let y = [values[base], values[base + 1], values[base + 2], values[base + 3]];
    lagrange4(y, x)
}

/// Cubic through nodes 0, 1, 2, 3 evaluated at `x`.
fn lagrange4<T: Real>(y: [T; 4], x: T) -> T {
    let one = T::one();
    let two: T = lit(2.0);
    let three: T = lit(3.0);
    let six: T = lit(6.0);
    let l0 = -(x - one) * (x - two) * (x - three) / six;
    let l1 = x * (x - two) * (x - three) / two;
    let l2 = -x * (x - one) * (x - three) / two;
    let l3 = x * (x - one) * (x - two) / six;
    l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3]
}

/// ρ(t) with grid step `h` (which must be `1/m`, `m ≥ 256`).
pub fn dickman_rho<T: Real>(t: T, h: T) -> Result<T> {
    if !(t > T::zero()) {
        return domain(format!("dickman_rho requires t > 0, got {t}"));
    }
    if h > lit(1.0 / 256.0) {
        return domain(format!("dickman_rho requires h <= 2^-8, got {h}"));
    }
    if t <= T::one() {
        return Ok(T::one());
    }
    if t <= lit(2.0) {
        return Ok(T::one() - t.ln());
    }
    RhoTable::build(h, t)?.value(t)
}

/// Incremental composite Simpson integral over an equispaced sequence.
///
/// `integral(k)` is the integral from node 0 to node k: Simpson for even
/// `k`, Simpson plus a closing 3/8 rule for odd `k ≥ 3`, and a four-point
/// cubic rule for the first cell.
#[derive(Debug, Clone)]
struct CumulativeSimpson<T> {
    h: T,
    ys: Vec<T>,
    even: Vec<T>,
}

impl<T: Real> CumulativeSimpson<T> {
    fn new(h: T) -> Self {
        Self { h, ys: Vec::new(), even: vec![T::zero()] }
    }

    fn push(&mut self, y: T) {
        self.ys.push(y);
        let n = self.ys.len() - 1;
        if n >= 2 && n.is_multiple_of(2) {
            let prev = *self.even.last().unwrap();
            let s = self.h / lit(3.0) * (self.ys[n - 2] + lit::<T>(4.0) * self.ys[n - 1] + self.ys[n]);
            self.even.push(prev + s);
        }
    }

    fn integral(&self, k: usize) -> T {
        let y = &self.ys;
        match k {
            0 => T::zero(),
            1 if y.len() >= 4 => {
                self.h / lit(24.0) * (lit::<T>(9.0) * y[0] + lit::<T>(19.0) * y[1] - lit::<T>(5.0) * y[2] + y[3])
            }
            1 => self.h * lit(0.5) * (y[0] + y[1]),
            k if k % 2 == 0 => self.even[k / 2],
            k => {
                self.even[(k - 3) / 2]
                    + self.h * lit(3.0 / 8.0) * (y[k - 3] + lit::<T>(3.0) * y[k - 2] + lit::<T>(3.0) * y[k - 1] + y[k])
            }
        }
    }
}

/// Tabulated density f_s on `t = h, 2h, ..., t_max` for one fixed `s`.
#[derive(Debug, Clone)]
pub struct DensityGrid<T = f64> {
    s: T,
    h: T,
    m: usize,
    norm: T,
    /// f_s at `t = (i + 1) h`.
    values: Vec<T>,
    /// P(Y_s ≤ t) at `t = i h`, `i = m ..= len`, stored from index 0.
    cdf_from_one: Vec<T>,
}

impl<T: Real> DensityGrid<T> {
    pub fn build(s: T, h: T, t_max: T) -> Result<Self> {
        if !(s > T::zero()) || !s.is_finite() {
            return domain(format!("subordinator time must be positive, got {s}"));
        }
        let m = cells_per_unit(h)?;
        if !(t_max > T::zero()) {
            return domain("t_max must be positive");
        }
        let h = T::one() / from_usize::<T>(m);
        let units = as_f64(&t_max).ceil().max(1.0) as usize;
        let len = units * m;
        let c = mass_below_one(s)?;
        let one = T::one();

        let mut values = Vec::with_capacity(len);
        for i in 1..=len.min(m) {
            values.push(closed_form(s, from_usize::<T>(i) * h, c));
        }

        // Second unit panel: exact values plus cell-wise mass and the
        // straddle integral J(a) = ∫_1^a f_s(b) (1 + b)^{-s} db.
        let mut cdf_from_one = vec![c];
        let mut j_first = vec![T::zero()];
        if units >= 2 {
            let mut mass = c;
            let mut jacc = T::zero();
            for i in (m + 1)..=(2 * m) {
                let t = from_usize::<T>(i) * h;
                values.push(density_first_panel(s, t, c));
                let a = t - h;
                let (dm, dj) = first_panel_cell(s, c, a, t, i == m + 1);
                mass = mass + dm;
                jacc = jacc + dj;
                cdf_from_one.push(mass);
                j_first.push(jacc);
            }
        }

        if units >= 3 {
            let const_part = c * (one - straddle_series(s, one));
            // g(a) = f_s(a) (1 + a)^{-s} on the grid from a = 2
            let mut g_run = CumulativeSimpson::new(h);
            let mut f_run = CumulativeSimpson::new(h);
            let t2 = lit::<T>(2.0);
            g_run.push(values[2 * m - 1] * (one + t2).powf(-s));
            f_run.push(values[2 * m - 1]);
            let j_two = *j_first.last().unwrap();
            let mass_two = *cdf_from_one.last().unwrap();
            for i in (2 * m + 1)..=len {
                let t = from_usize::<T>(i) * h;
                // t - 1 sits at grid index i - m
                let jm = i - m;
                let jval = if jm <= 2 * m { j_first[jm - m] } else { j_two + g_run.integral(jm - 2 * m) };
                let f = (s * t.powf(s - one) * (const_part - jval)).max(T::zero());
                values.push(f);
                g_run.push(f * (one + t).powf(-s));
                f_run.push(f);
            }
            // cumulative mass beyond 2 once every ordinate is known
            for k in 1..=(len - 2 * m) {
                cdf_from_one.push(mass_two + f_run.integral(k));
            }
        }

        Ok(Self { s, h, m, norm: c, values, cdf_from_one })
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn step(&self) -> T {
        self.h
    }

    pub fn t_max(&self) -> T {
        from_usize::<T>(self.values.len()) * self.h
    }

    /// Density values at `t = h, 2h, ..., t_max`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Abscissa of `values()[i]`.
    pub fn t_at(&self, i: usize) -> T {
        from_usize::<T>(i + 1) * self.h
    }

    /// Iterator over `(t, f_s(t))` grid pairs.
    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.t_at(i), v))
    }

    /// f_s(t), closed form or exact on `(0, 2]`, interpolated inside a unit
    /// panel beyond 2.
    pub fn value(&self, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return domain(format!("density requires t > 0, got {t}"));
        }
        if t > self.t_max() {
            return Err(Error::BeyondGrid { t: as_f64(&t), t_max: as_f64(&self.t_max()) });
        }
        if t <= T::one() {
            return Ok(closed_form(self.s, t, self.norm));
        }
        if t <= lit(2.0) {
            return Ok(density_first_panel(self.s, t, self.norm));
        }
        Ok(self.interp_beyond_two(t))
    }

    fn interp_beyond_two(&self, t: T) -> T {
        // node index i holds t = i h (values[i - 1])
        let p = t / self.h;
        let k = as_f64(&t).ceil() as usize - 1;
        let (lo, hi) = (k * self.m, ((k + 1) * self.m).min(self.values.len()));
        let pf = as_f64(&p);
        let base = (pf.floor() as isize - 1).clamp(lo as isize, hi as isize - 3) as usize;
        let x = p - from_usize::<T>(base);
        let y = [self.node(base), self.node(base + 1), self.node(base + 2), self.node(base + 3)];
        lagrange4(y, x).max(T::zero())
    }

    fn node(&self, i: usize) -> T {
        if i == 0 {
            // only reached for k >= 2 panels, never for the singular origin
            T::zero()
        } else {
            self.values[i - 1]
        }
    }

    /// P(Y_s ≤ t) for `0 < t ≤ t_max`.
    pub fn cdf(&self, t: T) -> Result<T> {
        if !(t > T::zero()) {
            return domain(format!("cdf requires t > 0, got {t}"));
        }
        if t > self.t_max() {
            return Err(Error::BeyondGrid { t: as_f64(&t), t_max: as_f64(&self.t_max()) });
        }
        if t <= T::one() {
            return Ok(t.powf(self.s) * self.norm);
        }
        let p = t / self.h;
        let j = as_f64(&p).floor() as usize;
        let tj = from_usize::<T>(j) * self.h;
        let base = self.cdf_from_one[j - self.m];
        if t == tj {
            return Ok(base.min(T::one()));
        }
        let partial = if t <= lit(2.0) {
            first_panel_cell(self.s, self.norm, tj, t, j == self.m).0
        } else {
            gauss_legendre8(|u: T| self.interp_beyond_two(u), tj, t)
        };
        Ok((base + partial).min(T::one()))
    }

    /// Total mass on `(0, t_max]`.
    pub fn mass(&self) -> T {
        *self.cdf_from_one.last().unwrap()
    }

    /// P(Y_s ≤ t) at every node `t = 1, 1 + h, ..., t_max`.
    pub fn cdf_nodes_from_one(&self) -> &[T] {
        &self.cdf_from_one
    }
}

/// Mass and straddle-integral increments of one cell `[a, b] ⊂ [1, 2]`.
///
/// The density has a `(t - 1)^s` cusp at 1, so the first cell is graded
/// toward its left end.
fn first_panel_cell<T: Real>(s: T, c: T, a: T, b: T, graded: bool) -> (T, T) {
    let one = T::one();
    let f = |t: T| density_first_panel(s, t, c);
    let g = |t: T| density_first_panel(s, t, c) * (one + t).powf(-s);
    if !graded {
        return (gauss_legendre8(f, a, b), gauss_legendre8(g, a, b));
    }
    let (af, bf) = (as_f64(&a), as_f64(&b));
    let w = bf - af;
    let br = graded_breaks(af, bf, Some(0.0), None, 2.0, w * 1e-12, w);
    let mut dm = T::zero();
    let mut dj = T::zero();
    for p in br.windows(2) {
        let (x0, x1) = (lit::<T>(p[0]), lit::<T>(p[1]));
        dm = dm + gauss_legendre8(f, x0, x1);
        dj = dj + gauss_legendre8(g, x0, x1);
    }
    (dm, dj)
}

/// f_s(t), building whatever grid is needed to reach `t`.
pub fn density_f<T: Real>(s: T, t: T, h: T) -> Result<T> {
    if !(s > T::zero()) {
        return domain(format!("density requires s > 0, got {s}"));
    }
    if !(t > T::zero()) {
        return domain(format!("density requires t > 0, got {t}"));
    }
    if t <= lit(2.0) {
        let c = mass_below_one(s)?;
        return Ok(if t <= T::one() { closed_form(s, t, c) } else { density_first_panel(s, t, c) });
    }
    DensityGrid::build(s, h, t)?.value(t)
}

/// P(Y_s ≤ t).
pub fn cdf_f<T: Real>(s: T, t: T, h: T) -> Result<T> {
    if !(s > T::zero()) {
        return domain(format!("cdf requires s > 0, got {s}"));
    }
    if !(t > T::zero()) {
        return domain(format!("cdf requires t > 0, got {t}"));
    }
    if t <= T::one() {
        return Ok(t.powf(s) * mass_below_one(s)?);
    }
    DensityGrid::build(s, h, t.max(lit(2.0)))?.cdf(t)
}

/// Chernoff bound on P(Y_s > t) from the Laplace transform
/// `E[e^{λ Y_s}] = exp(s ∫_0^1 (e^{λu} - 1) du / u)`, minimised over λ ≥ 0.
pub fn tail_bound(s: f64, t: f64) -> f64 {
    // ∫_0^1 (e^{λu} - 1)/u du = Σ_{k≥1} λ^k / (k · k!)
    let ein = |lam: f64| {
        let mut acc = 0.0;
        let mut term = 1.0;
        for k in 1..400 {
            term *= lam / k as f64;
            let add = term / k as f64;
            acc += add;
            if add < 1e-17 * acc {
                break;
            }
        }
        acc
    };
    // stationarity: s (e^λ - 1) / λ = t
    let objective = |lam: f64| s * ein(lam) - lam * t;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while s * (hi.exp() - 1.0) / hi < t && hi < 700.0 {
        hi *= 2.0;
    }
    if s >= t {
        return 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if s * (mid.exp_m1()) / mid < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    objective(0.5 * (lo + hi)).exp().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const E_NEG_GAMMA: f64 = 0.561_459_483_566_885_2;

    #[test]
    fn rho_constant_on_unit_interval() {
        for t in [1e-9, 0.3, 0.5, 1.0] {
            assert_eq!(dickman_rho(t, DEFAULT_STEP).unwrap(), 1.0);
        }
    }

    #[test]
    fn rho_second_panel_is_one_minus_log() {
        let v = dickman_rho(2.0, DEFAULT_STEP).unwrap();
        assert!((v - (1.0 - 2f64.ln())).abs() < 1e-12, "{v}");
        let v = dickman_rho(1.37, DEFAULT_STEP).unwrap();
        assert!((v - (1.0 - 1.37f64.ln())).abs() < 1e-12, "{v}");
    }

    #[test]
    fn rho_rejects_bad_input() {
        assert!(dickman_rho(0.0, DEFAULT_STEP).is_err());
        assert!(dickman_rho(-1.0, DEFAULT_STEP).is_err());
        assert!(dickman_rho(2.0, 1.0 / 16.0).is_err());
        let table = RhoTable::build(DEFAULT_STEP, 3.0).unwrap();
        assert!(matches!(table.value(3.5), Err(Error::BeyondGrid { .. })));
    }

    #[test]
    fn rho_non_increasing_and_positive() {
        let table = RhoTable::build(1.0 / 1024.0, 10.0).unwrap();
        let v = table.values();
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn rho_is_scaled_unit_density() {
        let grid = DensityGrid::build(1.0, 1.0 / 1024.0, 5.0).unwrap();
        let table = RhoTable::build(1.0 / 1024.0, 5.0).unwrap();
        for t in [0.5, 1.5, 2.5, 3.25, 4.75] {
            let want = table.value(t).unwrap() * E_NEG_GAMMA;
            assert!((grid.value(t).unwrap() - want).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn density_closed_form_values() {
        assert_relative_eq!(density_f(1.0, 0.5, DEFAULT_STEP).unwrap(), E_NEG_GAMMA, max_relative = 1e-14);
        let e2 = (-2.0 * EULER_GAMMA).exp();
        assert_relative_eq!(density_f(2.0, 1.0, DEFAULT_STEP).unwrap(), e2, max_relative = 1e-14);
        let v = density_f(1.0, 1.5, DEFAULT_STEP).unwrap();
        assert_relative_eq!(v, E_NEG_GAMMA * (1.0 - 1.5f64.ln()), max_relative = 1e-13);
    }

    #[test]
    fn density_domain_errors() {
        assert!(density_f(0.0, 1.0, DEFAULT_STEP).is_err());
        assert!(density_f(1.0, 0.0, DEFAULT_STEP).is_err());
        assert!(density_f(1.0, 3.0, 0.3).is_err());
        let g = DensityGrid::build(1.0, 1.0 / 256.0, 4.0).unwrap();
        assert!(matches!(g.value(4.5), Err(Error::BeyondGrid { .. })));
    }

    #[test]
    fn density_continuous_through_one() {
        for s in [0.3, 0.5, 1.0, 2.5] {
            let c = mass_below_one(s).unwrap();
            let left = density_f(s, 1.0, DEFAULT_STEP).unwrap();
            let d: f64 = 1e-12;
            let right = density_f(s, 1.0 + d, DEFAULT_STEP).unwrap();
            // the density has a (t - 1)^s cusp at 1
            let bound = 2.0 * c * d.powf(s.min(1.0)) + 1e-12;
            assert!((left - right).abs() < bound, "s = {s}: {left} vs {right}");
        }
    }

    #[test]
    fn cdf_values() {
        assert_relative_eq!(cdf_f(1.0, 1.0, DEFAULT_STEP).unwrap(), E_NEG_GAMMA, max_relative = 1e-14);
        assert_relative_eq!(cdf_f(1.0, 0.5, DEFAULT_STEP).unwrap(), 0.5 * E_NEG_GAMMA, max_relative = 1e-14);
        assert!(cdf_f(2.0, 1e-12, DEFAULT_STEP).unwrap() < 1e-23);
    }

    #[test]
    fn cdf_is_monotone() {
        let g = DensityGrid::build(0.5, 1.0 / 512.0, 6.0).unwrap();
        let nodes = g.cdf_nodes_from_one();
        assert!(nodes.windows(2).all(|w| w[1] >= w[0]));
        assert!(g.cdf(2.3).unwrap() <= g.cdf(2.31).unwrap());
    }

    #[test]
    fn tail_bound_is_valid_probability() {
        let b = tail_bound(1.0, 12.0);
        assert!(b > 0.0 && b < 1e-8);
        assert_eq!(tail_bound(2.0, 1.0), 1.0);
    }

    #[test]
    fn single_precision_grid() {
        let g = DensityGrid::<f32>::build(1.0, 1.0 / 256.0, 3.0).unwrap();
        let v = g.value(1.5).unwrap();
        assert!((v as f64 - E_NEG_GAMMA * (1.0 - 1.5f64.ln())).abs() < 1e-5);
    }
}
