//! Simulation of the Dickman subordinator from its Poisson point process
//! of jumps, and of the triangular renewal arrays.
//!
//! Samples are produced in fixed-size chunks; chunk `i` draws from stream
//! `i` of a ChaCha generator keyed by the seed, so results do not depend
//! on how chunks are scheduled across threads.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::renewal::{InterArrivalLaw, SpaceTimeLaw, SpatialKernel};
use crate::stats::{ks_two_sample, ks_two_sample_critical};

/// Default jump truncation level.
pub const DEFAULT_EPSILON: f64 = 1e-4;

const CHUNK: usize = 4096;

/// Streams at and above this index are reserved for reference samples.
const REFERENCE_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub seed: u64,
    pub samples: usize,
    pub epsilon: f64,
    pub s: f64,
}

impl SimulationConfig {
    pub fn new(seed: u64, samples: usize, s: f64) -> Self {
        Self { seed, samples, epsilon: DEFAULT_EPSILON, s }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return domain(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.samples == 0 {
            return domain("samples must be at least 1");
        }
        if !(self.s > 0.0) {
            return domain(format!("s must be positive, got {}", self.s));
        }
        Ok(())
    }
}

fn stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `draw` for every sample, chunk by chunk, and concatenates in order.
fn chunked<T, F>(seed: u64, first_stream: u64, samples: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha20Rng) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, first_stream + c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// One draw of the truncated subordinator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickmanSample {
    /// Sum of the jumps `Y_s^{(ε)}`.
    pub y: f64,
    /// Largest jump, 0 without jumps.
    pub m: f64,
}

fn draw_dickman(rng: &mut ChaCha20Rng, poisson: &Poisson<f64>, ln_eps: f64) -> DickmanSample {
    let count = poisson.sample(rng) as u64;
    let mut y = 0.0;
    let mut m: f64 = 0.0;
    for _ in 0..count {
        let u: f64 = rng.gen();
        let jump = (u * ln_eps).exp();
        y += jump;
        m = m.max(jump);
    }
    DickmanSample { y, m }
}

fn dickman_stream(cfg: &SimulationConfig, first_stream: u64) -> Result<Vec<DickmanSample>> {
    cfg.validate()?;
    let ln_eps = cfg.epsilon.ln();
    let rate = -cfg.s * ln_eps;
    let poisson = Poisson::new(rate).map_err(|e| Error::Domain(format!("Poisson rate {rate}: {e}")))?;
    Ok(chunked(cfg.seed, first_stream, cfg.samples, |rng| draw_dickman(rng, &poisson, ln_eps)))
}

/// Draws `(Y_s^{(ε)}, M_s)`: a Poisson(s ln(1/ε)) number of jumps, each
/// distributed as `ε^U` with `U` uniform.
pub fn sample_dickman(cfg: &SimulationConfig) -> Result<Vec<DickmanSample>> {
    dickman_stream(cfg, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleInvariance {
    /// Two-sample KS distance between `Y_s / t | M_s < t` and `Y_s`.
    pub ks: f64,
    pub accepted: usize,
    pub reference: usize,
    /// Two-sample KS critical value at the 1% level for these sizes.
    pub critical: f64,
}

/// Compares `Y_s / t` on `{M_s < t}` with an independent unconditional sample.
pub fn test_scale_invariance(cfg: &SimulationConfig, t: f64) -> Result<ScaleInvariance> {
    cfg.validate()?;
    if !(t < 1.0 && t >= 10.0 * cfg.epsilon) {
        return domain(format!("t must lie in [10 epsilon, 1), got {t}"));
    }
    let conditioned: Vec<f64> = sample_dickman(cfg)?.into_iter().filter(|d| d.m < t).map(|d| d.y / t).collect();
    if conditioned.len() < 100 {
        return Err(Error::InsufficientAcceptance { accepted: conditioned.len(), required: 100 });
    }
    let reference: Vec<f64> = dickman_stream(cfg, REFERENCE_STREAM)?.into_iter().map(|d| d.y).collect();
    let ks = ks_two_sample(&conditioned, &reference)?;
    let critical = ks_two_sample_critical(0.01, conditioned.len(), reference.len())?;
    Ok(ScaleInvariance { ks, accepted: conditioned.len(), reference: reference.len(), critical })
}

/// Inverse-CDF sampler over `{1, ..., N}` (or any finite list of masses).
#[derive(Debug, Clone)]
struct InverseCdf {
    cumulative: Vec<f64>,
}

impl InverseCdf {
    fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    /// Index of the first cell whose cumulative mass exceeds `u · total`.
    fn index(&self, u: f64) -> usize {
        let target = u * self.cumulative.last().copied().unwrap_or(0.0);
        self.cumulative.partition_point(|&c| c <= target).min(self.cumulative.len() - 1)
    }
}

/// `τ_steps` for `cfg.samples` independent renewal paths.
pub fn sample_renewal_path(law: &InterArrivalLaw<f64>, steps: usize, cfg: &SimulationConfig) -> Result<Vec<u64>> {
    if cfg.samples == 0 {
        return domain("samples must be at least 1");
    }
    let table = InverseCdf::new(law.probs());
    Ok(chunked(cfg.seed, 0, cfg.samples, |rng| (0..steps).map(|_| table.index(rng.gen()) as u64 + 1).sum()))
}

/// One space-time renewal path endpoint `(τ, S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSample {
    pub tau: u64,
    pub position: Vec<i64>,
}

/// `(τ_steps, S_steps)` for `cfg.samples` independent space-time paths.
/// Kernels of product form are sampled coordinate by coordinate in their
/// factor coordinates; planar diagonal coordinates are mapped back to the
/// lattice.
pub fn sample_spacetime_path<K: SpatialKernel>(
    law: &SpaceTimeLaw<K>,
    steps: usize,
    cfg: &SimulationConfig,
) -> Result<Vec<SpaceTimeSample>> {
    if cfg.samples == 0 {
        return domain("samples must be at least 1");
    }
    let kernel = law.kernel();
    let d = kernel.dim();
    let factored = kernel.factor(1).is_some();
    let diagonal = d == 2 && kernel.factor_coords(&[1, 0]) == [1, 1] && kernel.factor_coords(&[0, 1]) == [1, -1];
    let times = InverseCdf::new(law.base().probs());
    let chunks = cfg.samples.div_ceil(CHUNK);
    let parts: Vec<Vec<SpaceTimeSample>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(cfg.seed, c as u64);
            let mut factor_cache: HashMap<usize, InverseCdf> = HashMap::new();
            let mut pmf_cache: HashMap<usize, (InverseCdf, Vec<Vec<i64>>)> = HashMap::new();
            let len = CHUNK.min(cfg.samples - c * CHUNK);
            (0..len)
                .map(|_| {
                    let mut tau = 0u64;
                    let mut pos = vec![0i64; d];
                    for _ in 0..steps {
                        let m = times.index(rng.gen()) + 1;
                        tau += m as u64;
                        if factored {
                            let table = factor_cache
                                .entry(m)
                                .or_insert_with(|| InverseCdf::new(&kernel.factor(m).expect("product kernel")));
                            let a: Vec<i64> = (0..d).map(|_| table.index(rng.gen()) as i64 - m as i64).collect();
                            if diagonal {
                                pos[0] += (a[0] + a[1]) / 2;
                                pos[1] += (a[0] - a[1]) / 2;
                            } else {
                                for i in 0..d {
                                    pos[i] += a[i];
                                }
                            }
                        } else {
                            let (table, points) = pmf_cache.entry(m).or_insert_with(|| {
                                let pmf = kernel.pmf(m);
                                let probs: Vec<f64> = pmf.iter().map(|(_, p)| *p).collect();
                                (InverseCdf::new(&probs), pmf.into_iter().map(|(x, _)| x).collect())
                            });
                            let x = &points[table.index(rng.gen())];
                            for i in 0..d {
                                pos[i] += x[i];
                            }
                        }
                    }
                    SpaceTimeSample { tau, position: pos }
                })
                .collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}
