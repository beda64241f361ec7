use std::f64::consts::PI;
use std::fmt::Debug;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::renewal::density::renewal_density;
use crate::renewal::law::InterArrivalLaw;
use crate::special::srw_row;
use crate::sum::CompensatedSum;

/// Default cap on `n_max · (spatial support)²` for the dense space-time program.
pub const DEFAULT_SPACETIME_BUDGET: u128 = 1 << 40;

/// Family of step laws `p(n, ·)` on `Z^d`, one per jump length `n`.
pub trait SpatialKernel: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// Largest `|x_i|` in the support of `p(n, ·)`.
    fn radius(&self, n: usize) -> usize;

    /// Non-zero entries of `p(n, ·)`.
    fn pmf(&self, n: usize) -> Vec<(Vec<i64>, f64)>;

    /// Whether a walk with total time `n` can sit at `x`.
    fn admissible(&self, _n: usize, _x: &[i64]) -> bool {
        true
    }

    /// Asymptotic variance per unit time of each component.
    fn variance_constant(&self) -> f64;

    /// Local-limit factor of the support sublattice.
    fn periodicity(&self) -> f64 {
        1.0
    }

    /// One-dimensional law `κ_n` on `-n..=n` (index `j + n`) such that
    /// `p(n, x) = Π_i κ_n(a_i)` with `a = self.factor_coords(x)`, when the
    /// kernel has that product form.
    fn factor(&self, _n: usize) -> Option<Vec<f64>> {
        None
    }

    fn factor_coords(&self, x: &[i64]) -> Vec<i64> {
        x.to_vec()
    }
}

/// The `n`-step simple random walk on `Z^d`, `d ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SrwKernel {
    dim: usize,
}

impl SrwKernel {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return domain(format!("simple random walk kernel supports d = 1, 2, got {dim}"));
        }
        Ok(Self { dim })
    }
}

impl SpatialKernel for SrwKernel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn radius(&self, n: usize) -> usize {
        n
    }

    fn pmf(&self, n: usize) -> Vec<(Vec<i64>, f64)> {
        let r = n as i64;
        let w = srw_row(n as u64);
        let at = |j: i64| w[(j + r) as usize];
        let mut out = Vec::new();
        if self.dim == 1 {
            for j in (-r..=r).step_by(2) {
                out.push((vec![j], at(j)));
            }
        } else {
            for x1 in -r..=r {
                for x2 in -r..=r {
                    if (x1 + x2 + r) % 2 == 0 && x1.abs() + x2.abs() <= r {
                        out.push((vec![x1, x2], at(x1 + x2) * at(x1 - x2)));
                    }
                }
            }
        }
        out
    }

    fn admissible(&self, n: usize, x: &[i64]) -> bool {
        (x.iter().sum::<i64>() + n as i64) % 2 == 0
    }

    fn variance_constant(&self) -> f64 {
        1.0 / self.dim as f64
    }

    fn periodicity(&self) -> f64 {
        2.0
    }

    fn factor(&self, n: usize) -> Option<Vec<f64>> {
        Some(srw_row(n as u64))
    }

    fn factor_coords(&self, x: &[i64]) -> Vec<i64> {
        if self.dim == 1 {
            x.to_vec()
        } else {
            vec![x[0] + x[1], x[0] - x[1]]
        }
    }
}

/// Joint law `P(T = n, X = x) = P(T = n) p(n, x)`.
#[derive(Debug, Clone)]
pub struct SpaceTimeLaw<K> {
    base: InterArrivalLaw<f64>,
    kernel: K,
}

impl<K: SpatialKernel> SpaceTimeLaw<K> {
    pub fn new(base: InterArrivalLaw<f64>, kernel: K) -> Result<Self> {
        if kernel.dim() == 0 {
            return domain("spatial dimension must be positive");
        }
        Ok(Self { base, kernel })
    }

    pub fn base(&self) -> &InterArrivalLaw<f64> {
        &self.base
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    /// Checks mass, centring and linear second-moment growth of `p(n, ·)`
    /// for `n ≤ n_max`, returning the largest `E|X|² / n` seen.
    pub fn validate(&self, n_max: usize) -> Result<f64> {
        let mut k_max: f64 = 0.0;
        for n in 1..=n_max.min(self.base.cutoff()) {
            let pmf = self.kernel.pmf(n);
            let mut mass = CompensatedSum::new();
            let mut mean = vec![CompensatedSum::new(); self.dim()];
            let mut second = 0.0;
            for (x, p) in &pmf {
                if *p < 0.0 {
                    return Err(Error::InvalidKernel(format!("negative mass at n = {n}")));
                }
                mass.add(*p);
                for (i, xi) in x.iter().enumerate() {
                    mean[i].add(*xi as f64 * p);
                }
                second += x.iter().map(|v| (*v * *v) as f64).sum::<f64>() * p;
            }
            if (mass.value() - 1.0).abs() > 1e-14 {
                return Err(Error::InvalidKernel(format!("p({n}, .) has mass {}", mass.value())));
            }
            if mean.iter().any(|m| m.value().abs() > 1e-12) {
                return Err(Error::InvalidKernel(format!("p({n}, .) is not centred")));
            }
            k_max = k_max.max(second / n as f64);
        }
        Ok(k_max)
    }
}

#[derive(Debug, Clone)]
struct Slice {
    reach: usize,
    values: Vec<f64>,
}

/// `bsU_{N,λ}(n, x)` for `n ≤ n_max`, all reachable `x`, with its time marginal.
#[derive(Debug, Clone)]
pub struct SpaceTimeDensity {
    lambda: f64,
    dim: usize,
    slices: Vec<Slice>,
    marginal: Vec<f64>,
}

fn side(reach: usize) -> usize {
    2 * reach + 1
}

fn linear_index(x: &[i64], reach: usize) -> Option<usize> {
    let s = side(reach) as i64;
    let mut idx = 0i64;
    for &xi in x {
        if xi.unsigned_abs() as usize > reach {
            return None;
        }
        idx = idx * s + xi + reach as i64;
    }
    Some(idx as usize)
}

fn coords(mut idx: usize, reach: usize, dim: usize) -> Vec<i64> {
    let s = side(reach);
    let mut x = vec![0i64; dim];
    for i in (0..dim).rev() {
        x[i] = (idx % s) as i64 - reach as i64;
        idx /= s;
    }
    x
}

impl SpaceTimeDensity {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.slices.len() - 1
    }

    /// Largest `|x_i|` reachable at time `n`.
    pub fn reach(&self, n: usize) -> usize {
        self.slices[n].reach
    }

    pub fn value(&self, n: usize, x: &[i64]) -> f64 {
        let s = &self.slices[n];
        linear_index(x, s.reach).map_or(0.0, |i| s.values[i])
    }

    /// Non-zero entries of `bsU(n, ·)`.
    pub fn entries(&self, n: usize) -> impl Iterator<Item = (Vec<i64>, f64)> + '_ {
        let s = &self.slices[n];
        s.values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(move |(i, v)| (coords(i, s.reach, self.dim), *v))
    }

    /// `Σ_x bsU(n, x)`.
    pub fn slice_sum(&self, n: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        acc.extend(self.slices[n].values.iter().copied());
        acc.value()
    }

    /// `U(n)` from the time-only program.
    pub fn marginal(&self, n: usize) -> f64 {
        self.marginal[n]
    }

    /// `Σ_{|x| > r} bsU(n, x)`.
    pub fn tail_mass(&self, n: usize, r: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, v) in self.entries(n) {
            let norm = x.iter().map(|c| (c * c) as f64).sum::<f64>().sqrt();
            if norm > r {
                acc.add(v);
            }
        }
        acc.value()
    }
}

/// Dense space-time convolution program
/// `bsU(n, x) = λ Σ_m P(T = m) Σ_y p(m, y) bsU(n - m, x - y)`.
pub fn spacetime_renewal_density<K: SpatialKernel>(
    law: &SpaceTimeLaw<K>,
    lambda: f64,
    n_max: usize,
    budget: u128,
) -> Result<SpaceTimeDensity> {
    if !(lambda >= 0.0) {
        return domain("lambda must be non-negative");
    }
    let dim = law.dim();
    let cut = law.base.cutoff();
    let kernel = &law.kernel;
    let mut reach = vec![0usize; n_max + 1];
    for n in 1..=n_max {
        reach[n] = (1..=n.min(cut)).map(|m| reach[n - m] + kernel.radius(m)).max().unwrap_or(0);
    }
    let support = (side(reach[n_max]) as u128).pow(dim as u32);
    let required = (n_max as u128).max(1) * support * support;
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    let steps: Vec<Vec<(Vec<i64>, f64)>> = (1..=n_max.min(cut)).map(|m| kernel.pmf(m)).collect();
    let mut slices: Vec<Slice> = Vec::with_capacity(n_max + 1);
    slices.push(Slice { reach: 0, values: vec![1.0] });
    let mut nonzero: Vec<Vec<usize>> = vec![vec![0]];
    for n in 1..=n_max {
        let r = reach[n];
        let s = side(r);
        let strides: Vec<usize> = (0..dim).map(|i| s.pow((dim - 1 - i) as u32)).collect();
        let mut values = vec![0.0; s.pow(dim as u32)];
        for m in 1..=n.min(cut) {
            let w = lambda * law.base.prob(m);
            let src = &slices[n - m];
            let src_nz = &nonzero[n - m];
            // index in the new slice of each source point, before the shift by y
            let base: Vec<usize> = src_nz
                .iter()
                .map(|&i| {
                    let x = coords(i, src.reach, dim);
                    linear_index(&x, r).expect("source inside target reach")
                })
                .collect();
            for (y, p) in &steps[m - 1] {
                let mut off = 0isize;
                for i in 0..dim {
                    off += y[i] as isize * strides[i] as isize;
                }
                let f = w * p;
                for (k, &i) in src_nz.iter().enumerate() {
                    values[(base[k] as isize + off) as usize] += f * src.values[i];
                }
            }
        }
        nonzero.push(values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, _)| i).collect());
        slices.push(Slice { reach: r, values });
    }
    let marginal = renewal_density(&law.base, lambda, n_max)?.values().to_vec();
    Ok(SpaceTimeDensity { lambda, dim, slices, marginal })
}

/// `M² Σ_{|x| > M√n} bsU(n, x) / U(n)` for each `M`.
pub fn diffusive_tail(density: &SpaceTimeDensity, n: usize, ms: &[f64]) -> Vec<(f64, f64)> {
    let u = density.slice_sum(n);
    ms.iter().map(|&m| (m, m * m * density.tail_mass(n, m * (n as f64).sqrt()) / u)).collect()
}

/// `bsU(n, x)` for kernels of product form, by solving the renewal
/// program for each Fourier mode on a torus large enough that wrapped
/// mass is negligible.
pub fn spacetime_point_fourier<K: SpatialKernel>(law: &SpaceTimeLaw<K>, lambda: f64, n: usize, x: &[i64]) -> Result<f64> {
    let kernel = &law.kernel;
    if x.len() != kernel.dim() {
        return domain("point dimension does not match the kernel");
    }
    if !kernel.admissible(n, x) {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(if x.iter().all(|&c| c == 0) { 1.0 } else { 0.0 });
    }
    let cut = law.base.cutoff();
    let top = n.min(cut);
    let mut factors = Vec::with_capacity(top);
    for m in 1..=top {
        match kernel.factor(m) {
            Some(f) => factors.push(f),
            None => return domain("Fourier evaluation needs a kernel of product form"),
        }
    }
    let a = kernel.factor_coords(x);
    let d = a.len();
    // spread of one factor coordinate after total time n
    let rate = factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let m = i + 1;
            let v: f64 = f.iter().enumerate().map(|(j, p)| ((j as f64) - m as f64).powi(2) * p).sum();
            v / m as f64
        })
        .fold(0.0, f64::max);
    let sd = (rate * n as f64).sqrt();
    let amax = a.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
    let exact = 2 * n + 1;
    let mut len = 2 * (amax + (14.0 * sd).ceil() as usize) + 1;
    if len >= exact {
        len = exact;
    }
    let half = (len - 1) / 2;
    // cos-transform of each wrapped factor law
    let table: Vec<Vec<f64>> = factors
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let m = (i + 1) as i64;
            let mut wrapped = vec![0.0; len];
            for (j, p) in f.iter().enumerate() {
                let pos = (j as i64 - m).rem_euclid(len as i64) as usize;
                wrapped[pos] += p;
            }
            (0..=half)
                .map(|k| {
                    let mut acc = 0.0;
                    for (pos, w) in wrapped.iter().enumerate() {
                        if *w != 0.0 {
                            acc += w * (2.0 * PI * (k * pos % len) as f64 / len as f64).cos();
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let probs: Vec<f64> = (1..=top).map(|m| lambda * law.base.prob(m)).collect();
    let symmetric = a.iter().all(|&c| c == a[0]);
    let modes: Vec<Vec<usize>> = multi_indices(d, half + 1, symmetric);
    let phase = |k: usize, c: i64| (2.0 * PI * (k as i64 * c).rem_euclid(len as i64) as f64 / len as f64).cos();
    let contributions: Vec<f64> = modes
        .par_iter()
        .map(|ks| {
            let phi: Vec<f64> = (0..top).map(|i| probs[i] * ks.iter().map(|&k| table[i][k]).product::<f64>()).collect();
            let mut u = vec![0.0; n + 1];
            u[0] = 1.0;
            for t in 1..=n {
                let mut acc = 0.0;
                for m in 1..=t.min(top) {
                    acc += phi[m - 1] * u[t - m];
                }
                u[t] = acc;
            }
            let mut weight: f64 = ks.iter().map(|&k| if k == 0 { 1.0 } else { 2.0 }).product();
            if symmetric {
                weight *= permutations(ks) as f64;
            }
            let cosines: f64 = ks.iter().zip(&a).map(|(&k, &c)| phase(k, c)).product();
            weight * cosines * u[n]
        })
        .collect();
    let mut acc = CompensatedSum::new();
    acc.extend(contributions);
    Ok(acc.value() / (len as f64).powi(d as i32))
}

fn multi_indices(d: usize, upto: usize, sorted_only: bool) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for v in &out {
            let start = if sorted_only { v.last().copied().unwrap_or(0) } else { 0 };
            for k in start..upto {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Number of distinct orderings of a sorted multi-index.
fn permutations(ks: &[usize]) -> usize {
    let fact = |n: usize| (1..=n).product::<usize>();
    let mut total = fact(ks.len());
    let mut i = 0;
    while i < ks.len() {
        let mut j = i;
        while j < ks.len() && ks[j] == ks[i] {
            j += 1;
        }
        total /= fact(j - i);
        i = j;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renewal::law::law_from_harmonic;

    fn srw_law(n_cut: usize) -> SpaceTimeLaw<SrwKernel> {
        SpaceTimeLaw::new(law_from_harmonic(n_cut).unwrap(), SrwKernel::new(2).unwrap()).unwrap()
    }

    #[test]
    fn origin_slice() {
        let st = spacetime_renewal_density(&srw_law(4), 1.0, 6, DEFAULT_SPACETIME_BUDGET).unwrap();
        assert_eq!(st.value(0, &[0, 0]), 1.0);
        assert_eq!(st.value(0, &[1, 0]), 0.0);
        assert_eq!(st.value(3, &[40, 0]), 0.0);
    }

    #[test]
    fn marginal_and_symmetry() {
        let st = spacetime_renewal_density(&srw_law(6), 1.2, 12, DEFAULT_SPACETIME_BUDGET).unwrap();
        for n in 0..=12 {
            assert!((st.slice_sum(n) - st.marginal(n)).abs() <= 1e-12 * st.marginal(n).max(1.0));
            for (x, v) in st.entries(n) {
                let neg: Vec<i64> = x.iter().map(|c| -c).collect();
                assert!((st.value(n, &neg) - v).abs() <= 1e-15 * v);
                assert!((st.value(n, &[x[1], x[0]]) - v).abs() <= 1e-15 * v);
            }
        }
    }

    #[test]
    fn off_parity_is_zero() {
        let law = srw_law(5);
        let st = spacetime_renewal_density(&law, 1.0, 8, DEFAULT_SPACETIME_BUDGET).unwrap();
        assert_eq!(st.value(5, &[1, 1]), 0.0);
        assert_eq!(spacetime_point_fourier(&law, 1.0, 5, &[1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn fourier_matches_dense() {
        let law = srw_law(10);
        let st = spacetime_renewal_density(&law, 0.9, 20, DEFAULT_SPACETIME_BUDGET).unwrap();
        for (n, x) in [(20usize, [0i64, 0i64]), (20, [2, 0]), (13, [3, -2]), (7, [1, 0])] {
            let f = spacetime_point_fourier(&law, 0.9, n, &x).unwrap();
            assert!((f - st.value(n, &x)).abs() < 1e-14, "{n} {x:?}: {f} vs {}", st.value(n, &x));
        }
    }

    #[test]
    fn budget_guard() {
        let err = spacetime_renewal_density(&srw_law(8), 1.0, 40, 1000).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn kernel_validation() {
        let law = srw_law(16);
        let k = law.validate(16).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
        assert!(SrwKernel::new(3).is_err());
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(&[1, 1]), 1);
        assert_eq!(permutations(&[0, 3]), 2);
        assert_eq!(multi_indices(2, 3, true).len(), 6);
    }
}
