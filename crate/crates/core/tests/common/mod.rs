//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

/// `ρ(3)` from `ρ = 1 − ln t` on [1, 2] and Simpson for
/// `ρ(3) = ρ(2) − ∫_2^3 (1 − ln(u − 1)) / u du` with step `h`.
pub fn rho3_oracle(h: f64) -> f64 {
    let n = (1.0 / h).round() as usize;
    let f = |u: f64| (1.0 - (u - 1.0).ln()) / u;
    let mut acc = f(2.0) + f(3.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(2.0 + i as f64 * h);
    }
    (1.0 - 2f64.ln()) - acc * h / 3.0
}

/// `C(n, k)` as a float product.
pub fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `P(S_{2n} = 0)` for the simple random walk on Z.
pub fn return_prob(n: u64) -> f64 {
    binomial(2 * n, n) / 4f64.powi(n as i32)
}

/// Law of `τ_k` by repeated convolution of `probs` (index 0 is `P(T = 1)`).
pub fn tau_pmf(probs: &[f64], k: usize, n_max: usize) -> Vec<f64> {
    let mut cur = vec![0.0; n_max + 1];
    cur[0] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; n_max + 1];
        for (j, a) in cur.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (i, p) in probs.iter().enumerate() {
                if j + i + 1 <= n_max {
                    next[j + i + 1] += a * p;
                }
            }
        }
        cur = next;
    }
    cur
}

/// `Σ_k λ^k P(τ_k = n)` for all `n ≤ n_max`.
pub fn renewal_k_sum(probs: &[f64], lambda: f64, n_max: usize) -> Vec<f64> {
    let mut u = vec![0.0; n_max + 1];
    for k in 0..=n_max {
        let pmf = tau_pmf(probs, k, n_max);
        for n in 0..=n_max {
            u[n] += lambda.powi(k as i32) * pmf[n];
        }
    }
    u
}

/// `P(S_n = x)` for the planar simple random walk, by enumerating all `4^n` paths.
pub fn planar_srw_paths(n: usize) -> HashMap<(i64, i64), f64> {
    let mut out = HashMap::new();
    let steps = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let total = 4usize.pow(n as u32);
    for code in 0..total {
        let (mut x, mut y, mut c) = (0i64, 0i64, code);
        for _ in 0..n {
            let (dx, dy) = steps[c % 4];
            x += dx;
            y += dy;
            c /= 4;
        }
        *out.entry((x, y)).or_insert(0.0) += 1.0 / total as f64;
    }
    out
}

/// Ordered time partitions `0 < n_1 < ... < n_k = n` as gap lists.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    (0..1u64 << (n - 1))
        .map(|mask| {
            let mut gaps = Vec::new();
            let mut last = 0;
            for i in 1..n {
                if mask >> (i - 1) & 1 == 1 {
                    gaps.push(i - last);
                    last = i;
                }
            }
            gaps.push(n - last);
            gaps
        })
        .collect()
}

/// Constrained pinning second moment from the chaos expansion.
pub fn pinning_chaos(n: usize, n_cut: usize, sigma2: f64) -> f64 {
    compositions(n)
        .into_iter()
        .filter(|g| g.iter().all(|&m| m <= n_cut))
        .map(|g| sigma2.powi(g.len() as i32 - 1) * g.iter().map(|&m| return_prob(m as u64).powi(2)).product::<f64>())
        .sum()
}

/// Constrained polymer second moment at `(n, x)` from the chaos expansion,
/// with `q` taken from path enumeration.
pub fn polymer_chaos(n: usize, x: (i64, i64), n_cut: usize, sigma2: f64) -> f64 {
    let q: Vec<HashMap<(i64, i64), f64>> = (0..=n).map(planar_srw_paths).collect();
    let mut total = 0.0;
    for gaps in compositions(n).into_iter().filter(|g| g.iter().all(|&m| m <= n_cut)) {
        let mut cur: HashMap<(i64, i64), f64> = HashMap::from([((0, 0), 1.0)]);
        for &m in &gaps {
            let mut next = HashMap::new();
            for (&(a, b), v) in &cur {
                for (&(dx, dy), p) in &q[m] {
                    *next.entry((a + dx, b + dy)).or_insert(0.0) += v * p * p;
                }
            }
            cur = next;
        }
        total += sigma2.powi(gaps.len() as i32 - 1) * cur.get(&x).copied().unwrap_or(0.0);
    }
    total
}
