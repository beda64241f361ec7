//! Triangular-array renewal laws and their exponentially weighted renewal
//! densities, in time and in space-time.

mod bounds;
mod density;
mod law;
mod spacetime;
mod verify;

pub use bounds::{
    bound_fuk_nagaev, bound_lower_tail, bound_sharp_local, fuk_nagaev_minimal_constant, lower_tail_maximal_constant,
    sharp_local_minimal_constant, BoundCheck, HarmonicTails,
};
pub use density::{exact_tau_pmf, renewal_density, RenewalDensity, TauPmf, MAGNITUDE_LIMIT};
pub use law::{lambda_for_theta, law_from_harmonic, InterArrivalLaw};
pub use spacetime::{
    diffusive_tail, spacetime_point_fourier, spacetime_renewal_density, SpaceTimeDensity, SpaceTimeLaw, SpatialKernel, SrwKernel,
    DEFAULT_SPACETIME_BUDGET,
};
pub use verify::{verify_renewal_theorem, verify_spacetime_theorem, GreenRoute, RenewalReport, RenewalRow, SpaceTimeReport};
