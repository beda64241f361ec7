//! Numerics for the Dickman subordinator and the triangular-array renewal
//! processes in its domain of attraction.
//!
//! * [`dickman`]: the Dickman function and subordinator density f_s.
//! * [`green`]: the continuum renewal density G_θ and its space-time form.
//! * [`renewal`]: exact renewal densities U_{N,λ} by convolution dynamic
//!   programming, theorem sweeps and tail-bound evaluators.
//! * [`montecarlo`]: Poisson point process sampling and goodness-of-fit.
//! * [`models`]: second moments of pinning and directed polymer partition
//!   functions.
//!
//! Analytic code is generic over [`Real`]; the renewal dynamic programs are
//! generic over [`Scalar`] and run unchanged on exact rationals.

#![allow(clippy::assign_op_pattern, clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod dickman;
pub mod error;
pub mod green;
pub mod models;
pub mod montecarlo;
pub mod quad;
pub mod renewal;
pub mod scalar;
pub mod special;
pub mod stats;
pub mod sum;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};
pub use special::EULER_GAMMA;

pub use dickman::{cdf_f, density_f, dickman_rho, DensityGrid, RhoTable};
pub use green::GreenEvaluator;
pub use renewal::{InterArrivalLaw, RenewalDensity, SpaceTimeDensity, SpaceTimeLaw};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type DensityGrid32 = DensityGrid<f32>;
pub type DensityGrid64 = DensityGrid<f64>;
pub type RhoTable64 = RhoTable<f64>;
pub type InterArrivalLaw64 = InterArrivalLaw<f64>;
pub type RenewalDensity64 = RenewalDensity<f64>;
pub type ExactInterArrivalLaw = InterArrivalLaw<Rational>;
pub type ExactRenewalDensity = RenewalDensity<Rational>;
