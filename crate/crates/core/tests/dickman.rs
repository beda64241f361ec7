mod common;

use approx::assert_relative_eq;
use dickman::dickman::{mass_below_one, tail_bound};
use dickman::special::gamma;
use dickman::{cdf_f, density_f, dickman_rho, DensityGrid64, RhoTable64, EULER_GAMMA};

const H: f64 = 1.0 / 4096.0;

#[test]
fn closed_form_on_unit_interval() {
    let want = (-EULER_GAMMA).exp();
    for i in 1..=100 {
        let t = i as f64 / 100.0;
        assert!((density_f(1.0, t, H).unwrap() - want).abs() <= 1e-12);
    }
    let s = 2.5f64;
    let t = 0.3f64;
    let want = s * t.powf(s - 1.0) * (-EULER_GAMMA * s).exp() / gamma(s + 1.0).unwrap();
    assert_relative_eq!(density_f(s, t, H).unwrap(), want, max_relative = 1e-14);
}

#[test]
fn rho_reference_points() {
    for i in 1..=50 {
        assert_eq!(dickman_rho(i as f64 / 50.0, H).unwrap(), 1.0);
    }
    assert!((dickman_rho(2.0, H).unwrap() - (1.0 - 2f64.ln())).abs() <= 1e-8);
    let oracle = common::rho3_oracle(1.0 / 65536.0);
    assert!((dickman_rho(3.0, H).unwrap() - oracle).abs() <= 1e-8, "{oracle}");
}

#[test]
fn rho_is_positive_and_non_increasing() {
    let table = RhoTable64::build(H, 10.0).unwrap();
    let v = table.values();
    assert!(v.iter().all(|&x| x > 0.0));
    assert!(v.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn density_relates_to_rho() {
    for t in [1.25, 1.5, 2.0, 2.75, 3.5] {
        let f = density_f(1.0, t, H).unwrap();
        assert_relative_eq!(f, (-EULER_GAMMA).exp() * dickman_rho(t, H).unwrap(), max_relative = 1e-8);
    }
}

#[test]
fn normalization_with_tail_bound() {
    for s in [0.5, 1.0, 2.0] {
        let grid = DensityGrid64::build(s, H, 12.0).unwrap();
        let tail = tail_bound(s, 12.0);
        assert!(tail < 1e-6);
        // trapezoid over (1, 12] on the grid, exact mass on (0, 1]
        let pts: Vec<(f64, f64)> = grid.points().filter(|(t, _)| *t >= 1.0 - 1e-12).collect();
        let trap: f64 = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum();
        let total = mass_below_one(s).unwrap() + trap;
        assert!((total - 1.0).abs() <= 1e-6 + tail, "s = {s}: trapezoid {total}");
        assert!((grid.mass() - 1.0).abs() <= 1e-6 + tail, "s = {s}: grid {}", grid.mass());
    }
}

#[test]
fn cdf_scaling_below_one() {
    let c = (-EULER_GAMMA).exp();
    assert_relative_eq!(cdf_f(1.0, 1.0, H).unwrap(), c, max_relative = 1e-14);
    assert_relative_eq!(cdf_f(1.0, 0.5, H).unwrap(), 0.5 * c, max_relative = 1e-14);
    assert!(cdf_f(2.0, 1e-12, H).unwrap() < 1e-20);
}

#[test]
fn self_convolution_semigroup() {
    let h = 1.0 / 1024.0;
    for s in [2.0, 3.0] {
        let half = DensityGrid64::build(s / 2.0, h, 4.0).unwrap();
        let full = DensityGrid64::build(s, h, 4.0).unwrap();
        let at_zero = if s == 2.0 { (-EULER_GAMMA).exp() } else { 0.0 };
        let f: Vec<f64> = std::iter::once(at_zero).chain(half.values().iter().copied()).collect();
        for i in (256..4096).step_by(128) {
            let mut acc = 0.5 * (f[0] * f[i] + f[i] * f[0]);
            for j in 1..i {
                acc += f[j] * f[i - j];
            }
            let conv = acc * h;
            let want = full.values()[i - 1];
            assert!((conv - want).abs() <= 5e-4, "s = {s}, t = {}: {conv} vs {want}", i as f64 * h);
        }
    }
}

#[test]
fn small_s_tail_is_quadratic() {
    for s in [0.1, 0.05, 0.01, 0.001] {
        let tail = 1.0 - mass_below_one(s).unwrap();
        assert!(tail >= 0.0 && tail <= 2.0 * s * s, "s = {s}: {tail}");
    }
}

#[test]
fn single_precision_agrees() {
    let g32 = dickman::DensityGrid32::build(1.0f32, 1.0 / 1024.0, 4.0).unwrap();
    let g64 = DensityGrid64::build(1.0, 1.0 / 1024.0, 4.0).unwrap();
    for (a, b) in g32.values().iter().zip(g64.values()) {
        assert!((*a as f64 - b).abs() < 1e-5);
    }
}

#[test]
fn beyond_grid_is_an_error() {
    let grid = DensityGrid64::build(1.0, H, 3.0).unwrap();
    assert!(grid.value(3.5).is_err());
    assert!(density_f(0.0, 1.0, H).is_err());
    assert!(density_f(1.0, -1.0, H).is_err());
}

#[test]
fn continuous_through_one_for_small_s() {
    // Just above 1 the density drops by s F_s(δ) / (1 + δ), a Hölder-s modulus.
    for s in [0.25, 0.5] {
        let at = density_f(s, 1.0, H).unwrap();
        let below = density_f(s, 1.0 - 1e-9, H).unwrap();
        assert!((below - at).abs() < 1e-8, "s = {s}");
        let modulus = s * (-EULER_GAMMA * s).exp() / gamma(s + 1.0).unwrap();
        for d in [1e-5, 1e-7, 1e-9] {
            let drop = at - density_f(s, 1.0 + d, H).unwrap();
            assert_relative_eq!(drop / d.powf(s), modulus, max_relative = 1e-2);
        }
    }
}
