use dickman::models::polymer_law;
use dickman::montecarlo::{sample_dickman, sample_renewal_path, sample_spacetime_path, test_scale_invariance, SimulationConfig};
use dickman::renewal::{law_from_harmonic, SpaceTimeLaw, SpatialKernel, SrwKernel};
use dickman::special::gamma;
use dickman::stats::{chi_square, chi_square_critical_99, ks_one_sample, MeanEstimate};
use dickman::{DensityGrid64, EULER_GAMMA};

const SAMPLES: usize = 100_000;

#[test]
fn truncated_mean() {
    let cfg = SimulationConfig::new(17, SAMPLES, 1.0);
    let ys: Vec<f64> = sample_dickman(&cfg).unwrap().iter().map(|d| d.y).collect();
    let est = MeanEstimate::from_samples(&ys).unwrap();
    assert!(est.z_score(1.0 - cfg.epsilon).abs() < 3.0, "{est:?}");
}

#[test]
fn largest_jump_and_unit_mass() {
    for s in [1.0, 2.0] {
        let draws = sample_dickman(&SimulationConfig::new(5, SAMPLES, s)).unwrap();
        let below = draws.iter().filter(|d| d.m < 0.5).count();
        let p = MeanEstimate::proportion(below, draws.len()).unwrap();
        assert!(p.z_score(0.5f64.powf(s)).abs() < 3.0, "s = {s}: {p:?}");
        let unit = draws.iter().filter(|d| d.y <= 1.0).count();
        let p = MeanEstimate::proportion(unit, draws.len()).unwrap();
        let want = (-EULER_GAMMA * s).exp() / gamma(s + 1.0).unwrap();
        assert!(p.z_score(want).abs() < 3.0, "s = {s}: {p:?} vs {want}");
    }
}

#[test]
fn scale_invariance() {
    for (s, t) in [(1.0, 0.5), (0.5, 0.5), (1.0, 0.2)] {
        let r = test_scale_invariance(&SimulationConfig::new(23, SAMPLES, s), t).unwrap();
        assert!(r.ks < 0.02 && r.ks < r.critical, "s = {s}, t = {t}: {r:?}");
    }
    let r = test_scale_invariance(&SimulationConfig::new(29, 20_000, 1.0), 0.999).unwrap();
    assert!(r.ks < r.critical, "{r:?}");
}

#[test]
fn truncation_bias_envelope() {
    let mean = |eps: f64| {
        let cfg = SimulationConfig::new(31, SAMPLES, 1.0).with_epsilon(eps);
        let ys: Vec<f64> = sample_dickman(&cfg).unwrap().iter().map(|d| d.y).collect();
        MeanEstimate::from_samples(&ys).unwrap()
    };
    let (a, b) = (mean(1e-3), mean(1e-4));
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() <= 1e-3 + 3.0 * se);
}

#[test]
fn reproducible_across_thread_counts() {
    let cfg = SimulationConfig::new(99, 20_000, 1.5);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| sample_dickman(&cfg).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn one_step_matches_law() {
    let law = law_from_harmonic::<f64>(16).unwrap();
    let taus = sample_renewal_path(&law, 1, &SimulationConfig::new(3, SAMPLES, 1.0)).unwrap();
    let mut counts = vec![0u64; 16];
    for t in taus {
        counts[t as usize - 1] += 1;
    }
    let stat = chi_square(&counts, law.probs()).unwrap();
    assert!(stat < chi_square_critical_99(15).unwrap(), "{stat}");
}

#[test]
fn rescaled_renewal_approaches_dickman() {
    let grid = DensityGrid64::build(1.0, 1.0 / 4096.0, 16.0).unwrap();
    let mut distances = Vec::new();
    for k in [8, 12, 16] {
        let n = 1usize << k;
        let law = law_from_harmonic::<f64>(n).unwrap();
        let steps = (n as f64).ln().floor() as usize;
        let taus = sample_renewal_path(&law, steps, &SimulationConfig::new(11, 20_000, 1.0)).unwrap();
        let xs: Vec<f64> = taus.iter().map(|&t| t as f64 / n as f64).collect();
        distances.push(ks_one_sample(&xs, |x| grid.cdf(x.min(16.0)).unwrap()).unwrap());
    }
    assert!(distances.windows(2).all(|w| w[1] < w[0]), "{distances:?}");
}

fn check_spacetime_variance<K: SpatialKernel>(law: &SpaceTimeLaw<K>) {
    let n = law.base().cutoff();
    let steps = (n as f64).ln().floor() as usize;
    let paths = sample_spacetime_path(law, steps, &SimulationConfig::new(41, 20_000, 1.0)).unwrap();
    let tau: Vec<f64> = paths.iter().map(|p| p.tau as f64 / n as f64).collect();
    let target = law.kernel().variance_constant() * MeanEstimate::from_samples(&tau).unwrap().mean;
    for i in 0..law.dim() {
        let xs: Vec<f64> = paths.iter().map(|p| p.position[i] as f64 / (n as f64).sqrt()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((var - target).abs() <= 0.1 * target, "component {i}: {var} vs {target}");
    }
    for p in &paths {
        assert!(law.kernel().admissible(p.tau as usize, &p.position));
    }
}

#[test]
fn spacetime_paths_are_diffusive() {
    check_spacetime_variance(&polymer_law(1024).unwrap());
    let srw = SpaceTimeLaw::new(law_from_harmonic(1024).unwrap(), SrwKernel::new(2).unwrap()).unwrap();
    check_spacetime_variance(&srw);
    let srw1 = SpaceTimeLaw::new(law_from_harmonic(256).unwrap(), SrwKernel::new(1).unwrap()).unwrap();
    check_spacetime_variance(&srw1);
}
