//! Special functions.

use crate::error::{domain, Result};
use crate::scalar::{lit, Real};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.57721566490153286;

// zeta(k) - 1 for k = 2, 3, ...
const ZETA_MINUS_ONE: [f64; 40] = [
    6.44934066848226406e-01,
    2.02056903159594292e-01,
    8.23232337111381857e-02,
    3.69277551433699266e-02,
    1.73430619844491402e-02,
    8.34927738192282713e-03,
    4.07735619794433960e-03,
    2.00839282608221426e-03,
    9.94575127818085256e-04,
    4.94188604119464529e-04,
    2.46086553308048320e-04,
    1.22713347578489145e-04,
    6.12481350587048277e-05,
    3.05882363070204933e-05,
    1.52822594086518710e-05,
    7.63719763789976257e-06,
    3.81729326499984022e-06,
    1.90821271655393897e-06,
    9.53962033872796212e-07,
    4.76932986787806447e-07,
    2.38450502727733004e-07,
    1.19219925965311064e-07,
    5.96081890512594801e-08,
    2.98035035146522793e-08,
    1.49015548283650427e-08,
    7.45071178983543006e-09,
    3.72533402478845728e-09,
    1.86265972351304914e-09,
    9.31327432419668166e-10,
    4.65662906503378366e-10,
    2.32831183367650534e-10,
    1.16415501727005193e-10,
    5.82077208790270145e-11,
    2.91038504449710001e-11,
    1.45519218910419849e-11,
    7.27595983505748180e-12,
    3.63797954737865086e-12,
    1.81898965030706607e-12,
    9.09494784026388841e-13,
    4.54747378304215422e-13,
];

// Stirling series coefficients B_{2j} / (2j (2j - 1)).
const STIRLING: [f64; 8] =
    [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0];

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Near the zeros of ln Γ at 1 and 2 a Taylor series in `x - 2` with
/// zeta-function coefficients keeps the relative error small; large
/// arguments use the Stirling series after upward recurrence.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return domain(format!("log_gamma requires a finite positive argument, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

/// Γ(x) for `x > 0`.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    log_gamma(x).map(T::exp)
}

fn ln_gamma_pos<T: Real>(x: T) -> T {
    let half: T = lit(0.5);
    let one = T::one();
    if x < half {
        // ln Γ(x) = ln Γ(x + 1) - ln x
        return ln_gamma_pos(x + one) - x.ln();
    }
    if x < lit(1.5) {
        let z = x - one;
        return ln_gamma_near_two(z) - z.ln_1p();
    }
    if x <= lit(2.5) {
        return ln_gamma_near_two(x - lit(2.0));
    }
    let ten: T = lit(10.0);
    if x >= ten {
        return stirling(x);
    }
    let mut shifted = x;
    let mut prod = one;
    while shifted < ten {
        prod = prod * shifted;
        shifted = shifted + one;
    }
    stirling(shifted) - prod.ln()
}

/// ln Γ(2 + z) for |z| ≤ 1/2.
fn ln_gamma_near_two<T: Real>(z: T) -> T {
    let mut acc = T::zero();
    let mut zk = z * z;
    for (i, &c) in ZETA_MINUS_ONE.iter().enumerate() {
        let k = i + 2;
        let term = lit::<T>(c) * zk / lit(k as f64);
        acc = if k % 2 == 0 { acc + term } else { acc - term };
        if term.abs() <= T::epsilon() * lit(1e-3) * acc.abs() {
            break;
        }
        zk = zk * z;
    }
    (one_minus_gamma::<T>()) * z + acc
}

fn one_minus_gamma<T: Real>() -> T {
    T::one() - lit(EULER_GAMMA)
}

fn stirling<T: Real>(x: T) -> T {
    let half: T = lit(0.5);
    let ln_sqrt_2pi: T = lit(0.918_938_533_204_672_8);
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for &c in STIRLING.iter() {
        series = series + lit::<T>(c) * pow;
        pow = pow * inv2;
    }
    (x - half) * x.ln() - x + ln_sqrt_2pi + series
}

/// ln of the binomial coefficient C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let (n, k) = (n as f64, k as f64);
    ln_gamma_pos(n + 1.0) - ln_gamma_pos(k + 1.0) - ln_gamma_pos(n - k + 1.0)
}

/// Largest `n` for which `C(n, k)` is computed exactly in `u128`.
const EXACT_BINOMIAL_MAX: u64 = 120;

fn exact_binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        // c * (n - k + i) is divisible by i
        c = c * (n as u128 - k as u128 + i) / i;
    }
    c
}

/// Beyond this `n` the return probability uses its asymptotic series.
const RETURN_SERIES_MIN: u64 = 1000;

/// `Γ(n + 1/2) / (√n Γ(n + 1))` in powers of `1/n`.
const RETURN_SERIES: [f64; 6] = [1.0, -1.0 / 8.0, 1.0 / 128.0, 5.0 / 1024.0, -21.0 / 32768.0, -399.0 / 262144.0];

/// Return probability of the one-dimensional simple random walk,
/// u(n) = C(2n, n) / 4^n.
pub fn central_binomial_prob(n: u64) -> f64 {
    let exact_max = EXACT_BINOMIAL_MAX / 2;
    if n <= exact_max {
        return exact_binomial(2 * n, n) as f64 * (-2.0 * n as f64).exp2();
    }
    if n < RETURN_SERIES_MIN {
        let start = exact_binomial(2 * exact_max, exact_max) as f64 * (-2.0 * exact_max as f64).exp2();
        return ((exact_max + 1)..=n).fold(start, |u, k| u * (2 * k - 1) as f64 / (2 * k) as f64);
    }
    let x = (n as f64).recip();
    let series = RETURN_SERIES.iter().rev().fold(0.0, |acc, c| acc * x + c);
    series / (std::f64::consts::PI * n as f64).sqrt()
}

/// Probability that a one-dimensional simple random walk sits at `j` after
/// `n` steps.
pub fn srw_prob(n: u64, j: i64) -> f64 {
    let a = j.unsigned_abs();
    if a > n || (n + a) % 2 == 1 {
        return 0.0;
    }
    let k = (n + a) / 2;
    if n <= EXACT_BINOMIAL_MAX {
        return exact_binomial(n, k) as f64 * (-(n as f64)).exp2();
    }
    (ln_binomial(n, k) - n as f64 * std::f64::consts::LN_2).exp()
}

/// `srw_prob(n, j)` for `j = -n..=n`. Beyond the exact range the row is
/// renormalized so its mass is one to rounding.
pub fn srw_row(n: u64) -> Vec<f64> {
    let r = n as i64;
    let mut row: Vec<f64> = (-r..=r).map(|j| srw_prob(n, j)).collect();
    if n > EXACT_BINOMIAL_MAX {
        let total = crate::sum::compensated_sum(row.iter().copied());
        row.iter_mut().for_each(|p| *p /= total);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn return_prob_branches_agree() {
        let mut u = 1.0f64;
        for k in 1..=2000u64 {
            u *= (2 * k - 1) as f64 / (2 * k) as f64;
            assert!((central_binomial_prob(k) - u).abs() <= 1e-13 * u, "n = {k}");
        }
    }
    use approx::assert_relative_eq;

    #[test]
    fn integer_points() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        let mut fact = 1.0f64;
        for n in 1..30 {
            fact *= n as f64;
            assert_relative_eq!(log_gamma(n as f64 + 1.0).unwrap(), fact.ln(), max_relative = 1e-14);
        }
    }

    #[test]
    fn half_is_ln_sqrt_pi() {
        let want = 0.5 * std::f64::consts::PI.ln();
        assert_relative_eq!(log_gamma(0.5).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(log_gamma(0.5f32).unwrap(), want as f32, max_relative = 1e-6);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn relative_accuracy_near_roots() {
        // ln Γ(1 + z) = -γ z + ζ(2) z² / 2 + O(z³)
        let z = 1e-7;
        let want = -EULER_GAMMA * z + 0.822_467_033_424_113_2 * z * z;
        assert_relative_eq!(log_gamma(1.0 + z).unwrap(), want, max_relative = 1e-9);
    }

    #[test]
    fn central_binomial_small() {
        assert_eq!(central_binomial_prob(1), 0.5);
        assert_eq!(central_binomial_prob(2), 0.375);
        let lg = (ln_binomial(200, 100) - 200.0 * std::f64::consts::LN_2).exp();
        assert_relative_eq!(central_binomial_prob(100), lg, max_relative = 1e-12);
    }

    #[test]
    fn srw_prob_sums_to_one() {
        for n in [1u64, 2, 7, 30] {
            let s: f64 = (-(n as i64)..=n as i64).map(|j| srw_prob(n, j)).sum();
            assert_relative_eq!(s, 1.0, max_relative = 1e-13);
        }
        assert_eq!(srw_prob(3, 0), 0.0);
        assert_eq!(srw_prob(1, 1), 0.5);
    }
}
