use dickman::models::polymer_law;
use dickman::renewal::{
    diffusive_tail, lambda_for_theta, law_from_harmonic, spacetime_point_fourier, spacetime_renewal_density,
    verify_spacetime_theorem, SpaceTimeLaw, SpatialKernel, SrwKernel, DEFAULT_SPACETIME_BUDGET,
};
use dickman::Error;

/// `M² Σ_{|x| > M√n} bsU / U` at N = 64, n = 32 for M = 1, frozen from a reference run.
const FROZEN_DIFFUSIVE_M1: f64 = 0.16498826022489324;
/// Constant bounding the diffusive tails over M ∈ {1, 2, 4}.
const DIFFUSIVE_CONSTANT: f64 = 0.17;

fn srw_law(n_cut: usize, d: usize) -> SpaceTimeLaw<SrwKernel> {
    SpaceTimeLaw::new(law_from_harmonic(n_cut).unwrap(), SrwKernel::new(d).unwrap()).unwrap()
}

#[test]
fn spatial_marginal_is_time_density() {
    for (law_name, n_cut) in [("srw1", 64), ("srw2", 20), ("polymer", 64)] {
        let density = match law_name {
            "srw1" => spacetime_renewal_density(&srw_law(n_cut, 1), 1.3, 64, DEFAULT_SPACETIME_BUDGET),
            "srw2" => spacetime_renewal_density(&srw_law(n_cut, 2), 0.8, 40, DEFAULT_SPACETIME_BUDGET),
            _ => spacetime_renewal_density(&polymer_law(n_cut).unwrap(), 1.0, 64, DEFAULT_SPACETIME_BUDGET),
        }
        .unwrap();
        for n in 0..=density.n_max() {
            let (a, b) = (density.slice_sum(n), density.marginal(n));
            assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{law_name}, n = {n}: {a} vs {b}");
        }
    }
}

#[test]
fn fourier_agrees_with_dense_program() {
    let law = polymer_law(48).unwrap();
    let dense = spacetime_renewal_density(&law, 1.1, 40, DEFAULT_SPACETIME_BUDGET).unwrap();
    for (n, x) in [(40, [0, 0]), (40, [3, 1]), (37, [2, 1]), (25, [5, -2])] {
        let f = spacetime_point_fourier(&law, 1.1, n, &x).unwrap();
        let d = dense.value(n, &x);
        assert!((f - d).abs() <= 1e-10 * d, "n = {n}, x = {x:?}: {f} vs {d}");
    }
    let law1 = srw_law(30, 1);
    let dense1 = spacetime_renewal_density(&law1, 0.9, 50, DEFAULT_SPACETIME_BUDGET).unwrap();
    for x in [0, 2, 6, -10] {
        let f = spacetime_point_fourier(&law1, 0.9, 50, &[x]).unwrap();
        assert!((f - dense1.value(50, &[x])).abs() <= 1e-10 * f);
    }
}

#[test]
fn polymer_kernel_variance() {
    let law = polymer_law(64).unwrap();
    let worst = law.validate(64).unwrap();
    assert!((worst - 1.0).abs() < 1e-12, "{worst}");
    for n in [1, 7, 30, 64] {
        let var: f64 = law.kernel().pmf(n).iter().map(|(x, p)| p * (x[0] * x[0]) as f64).sum();
        let nf = n as f64;
        assert!((var - nf * nf / (2.0 * (2.0 * nf - 1.0))).abs() < 1e-12 * nf, "n = {n}: {var}");
    }
}

#[test]
fn diffusive_concentration() {
    let n_cut = 64;
    let law = polymer_law(n_cut).unwrap();
    let lambda = lambda_for_theta(n_cut as f64, 0.0).unwrap();
    let density = spacetime_renewal_density(&law, lambda, 32, DEFAULT_SPACETIME_BUDGET).unwrap();
    let tails = diffusive_tail(&density, 32, &[1.0, 2.0, 4.0]);
    assert!(tails.iter().all(|(_, v)| *v <= DIFFUSIVE_CONSTANT), "{tails:?}");
    assert!((tails[0].1 - FROZEN_DIFFUSIVE_M1).abs() <= 1e-9);
}

#[test]
fn budget_guard() {
    let law = polymer_law(512).unwrap();
    let err = spacetime_renewal_density(&law, 1.0, 512, 1 << 20).unwrap_err();
    assert!(matches!(err, Error::Budget { .. }));
}

#[test]
fn parity_is_exact_zero() {
    let law = polymer_law(16).unwrap();
    let density = spacetime_renewal_density(&law, 1.0, 16, DEFAULT_SPACETIME_BUDGET).unwrap();
    assert_eq!(density.value(5, &[1, 1]), 0.0);
    assert!(density.value(5, &[1, 0]) > 0.0);
    let report = verify_spacetime_theorem(&law, 0.0, 0.5, &[0.1, 0.0], false).unwrap();
    assert_eq!(report.admissible, report.value != 0.0);
}

#[test]
fn spacetime_renewal_theorem_band() {
    for n_cut in [1 << 8, 1 << 10] {
        let law = polymer_law(n_cut).unwrap();
        let report = verify_spacetime_theorem(&law, 0.0, 0.5, &[0.0, 0.0], true).unwrap();
        assert!((report.ratio - 1.0).abs() < 0.25, "N = {n_cut}: {}", report.ratio);
    }
}

#[test]
#[ignore = "about 13 minutes on one core"]
fn spacetime_renewal_theorem_large() {
    let law = polymer_law(1 << 12).unwrap();
    let report = verify_spacetime_theorem(&law, 0.0, 0.5, &[0.0, 0.0], true).unwrap();
    assert!((report.ratio - 1.0).abs() < 0.25, "{}", report.ratio);
}
