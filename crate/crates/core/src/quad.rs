//! Quadrature rules: adaptive Simpson, composite Gauss–Legendre on
//! graded panels, and semi-infinite integration with a decay cutoff.

use crate::scalar::{lit, Real};

const GL8_X: [f64; 4] = [0.18343464249564978, 0.525532409916329, 0.7966664774136267, 0.9602898564975362];
const GL8_W: [f64; 4] = [0.36268378337836177, 0.31370664587788705, 0.22238103445337434, 0.10122853629037669];

/// Eight-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre8<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T) -> T {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let mut acc = T::zero();
    for (&x, &w) in GL8_X.iter().zip(GL8_W.iter()) {
        let dx = half * lit(x);
        acc = acc + lit::<T>(w) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Nodes and weights of the eight-point rule mapped to `[a, b]`.
pub fn gauss_legendre8_nodes(a: f64, b: f64) -> [(f64, f64); 8] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (mid - half * GL8_X[i], half * GL8_W[i]);
        out[2 * i + 1] = (mid + half * GL8_X[i], half * GL8_W[i]);
    }
    out
}

/// Composite eight-point rule over consecutive breakpoints.
pub fn gauss_legendre_panels<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64]) -> f64 {
    breaks.windows(2).map(|w| gauss_legendre8(&mut f, w[0], w[1])).sum()
}

/// Breakpoints on `[a, b]` graded geometrically toward singular points that
/// sit at distance `left_gap` before `a` and `right_gap` after `b`.
///
/// A gap of zero means the singularity sits on the endpoint itself; grading
/// then stops at `min_width`. Panels never exceed `max_width`.
pub fn graded_breaks(
    a: f64,
    b: f64,
    left_gap: Option<f64>,
    right_gap: Option<f64>,
    ratio: f64,
    min_width: f64,
    max_width: f64,
) -> Vec<f64> {
    debug_assert!(b > a && ratio > 1.0);
    let mut pts = vec![a, b];
    if let Some(g) = left_gap {
        let mut d = g.max(min_width);
        // distance measured from the singular point a - g
        loop {
            let x = a - g + d * ratio;
            if x >= b {
                break;
            }
            if x > a {
                pts.push(x);
            }
            d *= ratio;
        }
        if g < min_width {
            pts.push(a + min_width);
        }
    }
    if let Some(g) = right_gap {
        let mut d = g.max(min_width);
        loop {
            let x = b + g - d * ratio;
            if x <= a {
                break;
            }
            if x < b {
                pts.push(x);
            }
            d *= ratio;
        }
        if g < min_width {
            pts.push(b - min_width);
        }
    }
    pts.retain(|&x| x >= a && x <= b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * x.abs().max(y.abs()));
    // split long panels
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        out.push(w[0]);
        let len = w[1] - w[0];
        if len > max_width {
            let k = (len / max_width).ceil() as usize;
            for j in 1..k {
                out.push(w[0] + len * j as f64 / k as f64);
            }
        }
    }
    out.push(*pts.last().unwrap());
    out
}

/// Adaptive Simpson quadrature to relative tolerance `rel_tol`
/// (with an absolute floor `abs_tol`).
pub fn adaptive_simpson<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, rel_tol: T, abs_tol: T) -> T {
    // coarse pre-split so narrow features are not missed
    let pieces = 8;
    let h = (b - a) / lit(pieces as f64);
    let xs: Vec<T> = (0..=pieces).map(|i| if i == pieces { b } else { a + h * lit(i as f64) }).collect();
    let fs: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    let mut coarse = Vec::with_capacity(pieces);
    let mut scale = T::zero();
    for i in 0..pieces {
        let xm = (xs[i] + xs[i + 1]) * lit(0.5);
        let fm = f(xm);
        let s = simpson(xs[i], xs[i + 1], fs[i], fm, fs[i + 1]);
        scale = scale + s.abs();
        coarse.push((fm, s));
    }
    let tol = (rel_tol * scale).max(abs_tol) / lit(pieces as f64);
    let mut acc = T::zero();
    for (i, &(fm, s)) in coarse.iter().enumerate() {
        acc = acc + simpson_rec(&mut f, xs[i], xs[i + 1], fs[i], fm, fs[i + 1], s, tol, 40);
    }
    acc
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T {
    let m = (a + b) * lit(0.5);
    let lm = (a + m) * lit(0.5);
    let rm = (m + b) * lit(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let sum = left + right;
    let delta = sum - whole;
    if depth == 0 || delta.abs() <= lit::<T>(15.0) * tol {
        return sum + delta / lit(15.0);
    }
    let half: T = lit(0.5);
    simpson_rec(f, a, m, fa, flm, fm, left, tol * half, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol * half, depth - 1)
}

/// Result of a semi-infinite integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailIntegral {
    pub value: f64,
    /// Upper cutoff actually used.
    pub cutoff: f64,
}

/// Integrates a non-negative, eventually decaying integrand over `[0, ∞)`.
///
/// The range is processed in pieces `[0, w], [w, 2w], [2w, 4w], ...`; the
/// cutoff is the first piece boundary where the integrand falls below
/// `1e-16` times the running integral and the last piece contributed
/// negligibly.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(mut f: F, first_width: f64, rel_tol: f64) -> TailIntegral {
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = first_width;
    for _ in 0..200 {
        let floor = if total > 0.0 { 1e-2 * rel_tol * total } else { 1e-300 };
        let piece = adaptive_simpson(&mut f, a, b, rel_tol, floor);
        total += piece;
        let fb = f(b).abs();
        if total > 0.0 && fb < 1e-16 * total && piece.abs() < 1e-15 * total {
            return TailIntegral { value: total, cutoff: b };
        }
        a = b;
        b = if a < 8.0 * first_width { a + first_width } else { 1.5 * a };
    }
    TailIntegral { value: total, cutoff: a }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl8_exact_for_degree_15() {
        let v = gauss_legendre8(|x: f64| x.powi(15) + x.powi(4), 0.0, 2.0);
        assert_relative_eq!(v, 2f64.powi(16) / 16.0 + 32.0 / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn simpson_matches_exp() {
        let v = adaptive_simpson(|x: f64| x.exp(), 0.0, 3.0, 1e-13, 1e-300);
        assert_relative_eq!(v, 3f64.exp() - 1.0, max_relative = 1e-12);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let r = integrate_semi_infinite(|x| (-x * x).exp(), 1.0, 1e-12);
        assert_relative_eq!(r.value, 0.5 * std::f64::consts::PI.sqrt(), max_relative = 1e-11);
        assert!((-r.cutoff * r.cutoff).exp() < 1e-16 * r.value);
    }

    #[test]
    fn graded_log_singularity() {
        // ∫_0^1 ln(x) dx = -1 with the singular point on the left endpoint
        let br = graded_breaks(0.0, 1.0, Some(0.0), None, 2.0, 1e-20, 0.25);
        let v = gauss_legendre_panels(|x| x.ln(), &br);
        assert_relative_eq!(v, -1.0, max_relative = 1e-12);
        assert!(br.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn graded_near_singularity_outside() {
        // ∫_0^1 dx / (x + 1e-9) = ln((1 + 1e-9) / 1e-9)
        let g = 1e-9;
        let br = graded_breaks(0.0, 1.0, Some(g), None, 2.0, 1e-20, 0.25);
        let v = gauss_legendre_panels(|x| 1.0 / (x + g), &br);
        assert_relative_eq!(v, ((1.0 + g) / g).ln(), max_relative = 1e-12);
    }
}
