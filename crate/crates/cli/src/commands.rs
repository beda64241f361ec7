use clap::{Args, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use dickman::green::{green_bar, GreenEvaluator};
use dickman::models::{
    alpha_check, beta_for_theta, pinning_free_second_moment, pinning_second_moment, pinning_weights, polymer_free_second_moment,
    polymer_law, polymer_second_moment, DisorderSpec, PolymerKernel, ALPHA,
};
use dickman::montecarlo::{sample_dickman, test_scale_invariance, SimulationConfig, DEFAULT_EPSILON};
use dickman::renewal::{
    bound_fuk_nagaev, bound_lower_tail, bound_sharp_local, fuk_nagaev_minimal_constant, lambda_for_theta, law_from_harmonic,
    lower_tail_maximal_constant, renewal_density, sharp_local_minimal_constant, spacetime_point_fourier,
    spacetime_renewal_density, verify_renewal_theorem, verify_spacetime_theorem, GreenRoute, HarmonicTails, SpaceTimeLaw,
    SpatialKernel, SrwKernel, DEFAULT_SPACETIME_BUDGET,
};
use dickman::{cdf_f, density_f, dickman_rho, DensityGrid64, InterArrivalLaw64};

use crate::output::{Cell, Report};
use crate::Failure;

const DEFAULT_H: f64 = 1.0 / 4096.0;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density f_s(t) of the Dickman subordinator, or its grid with `--grid`.
    #[command(allow_negative_numbers = true)]
    Density(DensityArgs),
    /// Dickman function ρ(t).
    #[command(allow_negative_numbers = true)]
    Rho(RhoArgs),
    /// P(Y_s ≤ t).
    #[command(allow_negative_numbers = true)]
    Cdf(CdfArgs),
    /// Continuum renewal density G_θ(t).
    #[command(allow_negative_numbers = true)]
    Green(GreenArgs),
    /// Integrated density Ḡ_θ(u) on (0, 1].
    #[command(name = "green-bar", allow_negative_numbers = true)]
    GreenBar(GreenBarArgs),
    /// Exact renewal density U_{N,λ}(n) for n ≤ nmax.
    #[command(name = "renewal-u", allow_negative_numbers = true)]
    RenewalU(RenewalUArgs),
    /// Space-time renewal density at one point.
    #[command(name = "spacetime-u", allow_negative_numbers = true)]
    SpacetimeU(SpacetimeUArgs),
    /// Sharp renewal theorem sweep over N.
    #[command(name = "verify-renewal", allow_negative_numbers = true)]
    VerifyRenewal(VerifyRenewalArgs),
    /// Space-time renewal theorem sweep over N.
    #[command(name = "verify-spacetime", allow_negative_numbers = true)]
    VerifySpacetime(VerifySpacetimeArgs),
    /// Best constants of the τ_k inequalities over a sweep, and checks of supplied ones.
    #[command(allow_negative_numbers = true)]
    Bounds(BoundsArgs),
    /// Samples of (Y_s, M_s) from the truncated Poisson point process.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Two-sample KS test of scale invariance.
    #[command(name = "test-scale", allow_negative_numbers = true)]
    TestScale(TestScaleArgs),
    /// Pinning second moment on the critical window.
    #[command(name = "pinning-m2", allow_negative_numbers = true)]
    PinningM2(PinningArgs),
    /// Directed polymer second moment on the critical window.
    #[command(name = "polymer-m2", allow_negative_numbers = true)]
    PolymerM2(PolymerArgs),
    /// π R_N − ln N against the constant γ + ln 16 − π.
    #[command(allow_negative_numbers = true)]
    Alpha(AlphaArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    s: f64,
    #[arg(long, required_unless_present = "grid")]
    t: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_H)]
    h: f64,
    /// Emit the whole grid `t,f_s` up to `--t-max`.
    #[arg(long)]
    grid: bool,
    #[arg(long = "t-max", default_value_t = 16.0)]
    t_max: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct RhoArgs {
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = DEFAULT_H)]
    h: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CdfArgs {
    #[arg(long)]
    s: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = DEFAULT_H)]
    h: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GreenArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long, required_unless_present = "table")]
    t: Option<f64>,
    /// Tabulate on `tmin, tmin + step, ..., tmax`.
    #[arg(long, num_args = 3, value_names = ["TMIN", "TMAX", "STEP"], conflicts_with = "t")]
    table: Option<Vec<f64>>,
    #[arg(long, default_value_t = dickman::green::DEFAULT_QUAD_TOL)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GreenBarArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    u: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    Harmonic,
    Pinning,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Srw1,
    Srw2,
    Polymer,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteKind {
    Quadrature,
    Direct,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderKind {
    Gaussian,
    Rademacher,
}

#[derive(Debug, Args, Serialize)]
pub struct RenewalUArgs {
    #[arg(long, value_enum, default_value_t = LawKind::Harmonic)]
    law: LawKind,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n_cut: usize,
    /// Defaults to 1 + θ / ln N.
    #[arg(long, conflicts_with = "theta")]
    lambda: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    nmax: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SpacetimeUArgs {
    #[arg(long, value_enum, default_value_t = KernelKind::Polymer)]
    kernel: KernelKind,
    /// Time law; the polymer kernel always uses the pinning law.
    #[arg(long, value_enum, default_value_t = LawKind::Harmonic)]
    law: LawKind,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n_cut: usize,
    #[arg(long, conflicts_with = "theta")]
    lambda: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    n: usize,
    /// Lattice point, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyRenewalArgs {
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long)]
    t: f64,
    #[arg(long = "Ns", value_delimiter = ',', required = true)]
    #[serde(rename = "Ns")]
    ns: Vec<usize>,
    #[arg(long, value_enum, default_value_t = RouteKind::Quadrature)]
    route: RouteKind,
    /// Largest accepted |ratio − 1| at the largest N.
    #[arg(long, default_value_t = 0.1)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifySpacetimeArgs {
    #[arg(long, value_enum, default_value_t = KernelKind::Polymer)]
    kernel: KernelKind,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long)]
    t: f64,
    /// Rescaled point x / √N, comma separated; the origin by default.
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long = "Ns", value_delimiter = ',', required = true)]
    #[serde(rename = "Ns")]
    ns: Vec<usize>,
    /// Largest accepted |ratio − 1| at every N.
    #[arg(long, default_value_t = 0.25)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long = "m-max", default_value_t = 64)]
    m_max: usize,
    #[arg(long = "k-max", default_value_t = 64)]
    k_max: usize,
    #[arg(long = "n-max", default_value_t = 64)]
    n_max: usize,
    /// Exponent constant `c` of the sharp local estimate.
    #[arg(long = "local-c", default_value_t = 1.0)]
    local_c: f64,
    /// Constant `C` of the sharp local estimate to check.
    #[arg(long = "local-C")]
    #[serde(rename = "local_C")]
    local_big_c: Option<f64>,
    /// Constant `C` of the upper-tail bound to check.
    #[arg(long = "upper-C")]
    #[serde(rename = "upper_C")]
    upper_c: Option<f64>,
    /// Constant `c` of the lower-tail bound to check.
    #[arg(long = "lower-c")]
    lower_c: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    s: f64,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct TestScaleArgs {
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PinningArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n_cut: usize,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = DisorderKind::Gaussian)]
    disorder: DisorderKind,
    /// Free instead of constrained moment.
    #[arg(long)]
    free: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PolymerArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    x1: i64,
    #[arg(long, default_value_t = 0)]
    x2: i64,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n_cut: usize,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, value_enum, default_value_t = DisorderKind::Gaussian)]
    disorder: DisorderKind,
    /// Free instead of constrained moment; the point is ignored.
    #[arg(long)]
    free: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n_cut: usize,
}

type Outcome = Result<(Report, Option<String>), Failure>;

fn config<A: Serialize>(args: &A) -> Map<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

fn report<A: Serialize>(name: &str, args: &A, columns: &[&str]) -> Report {
    Report::new(name, config(args), columns)
}

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Density(a) => density(a),
        Command::Rho(a) => {
            let mut r = report("rho", a, &["rho", "t"]);
            r.push(vec![dickman_rho(a.t, a.h)?.into(), a.t.into()]);
            Ok((r, None))
        }
        Command::Cdf(a) => {
            let mut r = report("cdf", a, &["F", "s", "t"]);
            r.push(vec![cdf_f(a.s, a.t, a.h)?.into(), a.s.into(), a.t.into()]);
            Ok((r, None))
        }
        Command::Green(a) => green(a),
        Command::GreenBar(a) => {
            let mut r = report("green-bar", a, &["G_bar", "theta", "u"]);
            r.push(vec![green_bar(a.theta, a.u)?.into(), a.theta.into(), a.u.into()]);
            Ok((r, None))
        }
        Command::RenewalU(a) => renewal_u(a),
        Command::SpacetimeU(a) => spacetime_u(a),
        Command::VerifyRenewal(a) => verify_renewal(a),
        Command::VerifySpacetime(a) => verify_spacetime(a),
        Command::Bounds(a) => bounds(a),
        Command::Simulate(a) => simulate(a),
        Command::TestScale(a) => test_scale(a),
        Command::PinningM2(a) => pinning(a),
        Command::PolymerM2(a) => polymer(a),
        Command::Alpha(a) => {
            let c = alpha_check(a.n_cut)?;
            let mut r = report("alpha", a, &["residual", "R_N", "N", "alpha"]);
            r.push(vec![c.residual.into(), c.r_n.into(), a.n_cut.into(), ALPHA.into()]);
            Ok((r, None))
        }
    }
}

fn density(a: &DensityArgs) -> Outcome {
    if a.grid {
        let grid = DensityGrid64::build(a.s, a.h, a.t_max)?;
        let mut r = report("density", a, &["t", "f_s"]).tabular();
        for (t, f) in grid.points() {
            r.push(vec![t.into(), f.into()]);
        }
        return Ok((r, None));
    }
    let t = a.t.expect("clap requires --t without --grid");
    let mut r = report("density", a, &["f_s", "s", "t"]);
    r.push(vec![density_f(a.s, t, a.h)?.into(), a.s.into(), t.into()]);
    Ok((r, None))
}

fn green(a: &GreenArgs) -> Outcome {
    let ev = GreenEvaluator::with_tolerance(a.theta, a.tol);
    if let Some(tab) = &a.table {
        let (lo, hi, step) = (tab[0], tab[1], tab[2]);
        if !(step > 0.0) || !(lo > 0.0) || hi < lo {
            return Err(Failure::Domain("table needs 0 < tmin <= tmax and step > 0".into()));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        let ts: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
        let values = ts.par_iter().map(|&t| ev.value(t)).collect::<Result<Vec<_>, _>>()?;
        let mut r = report("green", a, &["t", "G"]).tabular();
        for (t, g) in ts.into_iter().zip(values) {
            r.push(vec![t.into(), g.into()]);
        }
        return Ok((r, None));
    }
    let t = a.t.expect("clap requires --t without --table");
    let mut r = report("green", a, &["G", "theta", "t"]);
    r.push(vec![ev.value(t)?.into(), a.theta.into(), t.into()]);
    Ok((r, None))
}

fn time_law(kind: LawKind, n_cut: usize) -> Result<InterArrivalLaw64, Failure> {
    Ok(match kind {
        LawKind::Harmonic => law_from_harmonic(n_cut)?,
        LawKind::Pinning => pinning_weights(n_cut)?,
    })
}

fn resolve_lambda(lambda: Option<f64>, theta: Option<f64>, n_cut: usize) -> Result<f64, Failure> {
    match (lambda, theta) {
        (Some(l), _) => Ok(l),
        (None, Some(th)) => Ok(lambda_for_theta(n_cut as f64, th)?),
        (None, None) => Ok(1.0),
    }
}

fn renewal_u(a: &RenewalUArgs) -> Outcome {
    let law = time_law(a.law, a.n_cut)?;
    let lambda = resolve_lambda(a.lambda, a.theta, a.n_cut)?;
    let u = renewal_density(&law, lambda, a.nmax)?;
    let mut r = report("renewal-u", a, &["n", "U"]).tabular();
    for (n, v) in u.values().iter().enumerate() {
        r.push(vec![n.into(), (*v).into()]);
    }
    Ok((r, None))
}

fn point_value<K: SpatialKernel>(law: &SpaceTimeLaw<K>, lambda: f64, n: usize, x: &[i64]) -> Result<f64, Failure> {
    if x.len() != law.dim() {
        return Err(Failure::Domain(format!("--x needs {} coordinates", law.dim())));
    }
    if !law.kernel().admissible(n, x) {
        return Ok(0.0);
    }
    Ok(if n <= 64 {
        spacetime_renewal_density(law, lambda, n, DEFAULT_SPACETIME_BUDGET)?.value(n, x)
    } else {
        spacetime_point_fourier(law, lambda, n, x)?
    })
}

fn spacetime_u(a: &SpacetimeUArgs) -> Outcome {
    let lambda = resolve_lambda(a.lambda, a.theta, a.n_cut)?;
    let value = match a.kernel {
        KernelKind::Polymer => point_value(&polymer_law(a.n_cut)?, lambda, a.n, &a.x)?,
        KernelKind::Srw1 | KernelKind::Srw2 => {
            let d = if matches!(a.kernel, KernelKind::Srw1) { 1 } else { 2 };
            let law = SpaceTimeLaw::new(time_law(a.law, a.n_cut)?, SrwKernel::new(d)?)?;
            point_value(&law, lambda, a.n, &a.x)?
        }
    };
    let xs: Vec<String> = a.x.iter().map(|c| c.to_string()).collect();
    let mut r = report("spacetime-u", a, &["U", "n", "x"]);
    r.push(vec![value.into(), a.n.into(), Cell::Text(xs.join(";"))]);
    Ok((r, None))
}

fn verify_renewal(a: &VerifyRenewalArgs) -> Outcome {
    let route = match a.route {
        RouteKind::Quadrature => GreenRoute::Quadrature,
        RouteKind::Direct => GreenRoute::Direct,
    };
    let rep = verify_renewal_theorem(&a.ns, a.theta, a.t, route)?;
    let mut r = report("verify-renewal", a, &["N", "n", "U", "ratio"]).tabular();
    for row in &rep.rows {
        r.push(vec![row.n_cut.into(), row.n.into(), row.u.into(), row.ratio.into()]);
    }
    let mut problems = Vec::new();
    if !rep.monotone() {
        problems.push("|ratio - 1| is not non-increasing in N".to_string());
    }
    if !(rep.final_deviation() < a.tol) {
        problems.push(format!("final |ratio - 1| = {} exceeds {}", rep.final_deviation(), a.tol));
    }
    Ok((r, (!problems.is_empty()).then(|| problems.join("; "))))
}

fn verify_spacetime(a: &VerifySpacetimeArgs) -> Outcome {
    let dim = if matches!(a.kernel, KernelKind::Srw1) { 1 } else { 2 };
    let x = if a.x.is_empty() { vec![0.0; dim] } else { a.x.clone() };
    let mut r = report("verify-spacetime", a, &["N", "n", "x", "value", "limit", "ratio"]).tabular();
    let mut worst: f64 = 0.0;
    for &n_cut in &a.ns {
        let rep = match a.kernel {
            KernelKind::Polymer => verify_spacetime_theorem(&polymer_law(n_cut)?, a.theta, a.t, &x, true)?,
            _ => {
                let law = SpaceTimeLaw::new(law_from_harmonic(n_cut)?, SrwKernel::new(dim)?)?;
                verify_spacetime_theorem(&law, a.theta, a.t, &x, true)?
            }
        };
        worst = worst.max((rep.ratio - 1.0).abs());
        let xs: Vec<String> = rep.x.iter().map(|c| c.to_string()).collect();
        r.push(vec![n_cut.into(), rep.n.into(), Cell::Text(xs.join(";")), rep.value.into(), rep.limit.into(), rep.ratio.into()]);
    }
    let verdict = (!(worst < a.tol)).then(|| format!("largest |ratio - 1| = {worst} exceeds {}", a.tol));
    Ok((r, verdict))
}

fn bounds(a: &BoundsArgs) -> Outcome {
    if a.m_max == 0 || a.k_max == 0 || a.n_max == 0 {
        return Err(Failure::Domain("sweep ranges must be at least 1".into()));
    }
    let ms: Vec<usize> = (1..=a.m_max).collect();
    let local = ms
        .par_iter()
        .map(|&m| sharp_local_minimal_constant(m, a.k_max, a.n_max, a.local_c))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let upper = fuk_nagaev_minimal_constant(&ms, a.k_max, a.n_max)?;
    let lower = lower_tail_maximal_constant(&ms, a.k_max, a.n_max)?;

    let mut violations = [0usize; 3];
    if a.local_big_c.is_some() || a.upper_c.is_some() || a.lower_c.is_some() {
        for &m in &ms {
            let tails = HarmonicTails::new(m, a.k_max)?;
            for k in 1..=a.k_max {
                for n in 1..=a.n_max {
                    if let Some(c) = a.local_big_c {
                        if n <= m && !bound_sharp_local(&tails, k, n, c, a.local_c)?.holds {
                            violations[0] += 1;
                        }
                    }
                    if let Some(c) = a.upper_c {
                        violations[1] += !bound_fuk_nagaev(&tails, k, n, c)?.holds as usize;
                    }
                    if let Some(c) = a.lower_c {
                        violations[2] += !bound_lower_tail(&tails, k, n, c)?.holds as usize;
                    }
                }
            }
        }
    }
    let mut r = report("bounds", a, &["bound", "best_constant", "supplied", "violations"]).tabular();
    let supplied = |c: Option<f64>| c.map_or(Cell::Text(String::new()), Cell::Real);
    r.push(vec!["sharp-local".into(), local.into(), supplied(a.local_big_c), violations[0].into()]);
    r.push(vec!["upper-tail".into(), upper.into(), supplied(a.upper_c), violations[1].into()]);
    r.push(vec!["lower-tail".into(), lower.into(), supplied(a.lower_c), violations[2].into()]);
    let total: usize = violations.iter().sum();
    Ok((r, (total > 0).then(|| format!("{total} inequality instances violated"))))
}

fn simulate(a: &SimulateArgs) -> Outcome {
    let cfg = SimulationConfig::new(a.seed, a.samples, a.s).with_epsilon(a.epsilon);
    let draws = sample_dickman(&cfg)?;
    let mut r = report("simulate", a, &["sample", "Y", "M"]).tabular();
    for (i, d) in draws.iter().enumerate() {
        r.push(vec![i.into(), d.y.into(), d.m.into()]);
    }
    Ok((r, None))
}

fn test_scale(a: &TestScaleArgs) -> Outcome {
    let cfg = SimulationConfig::new(a.seed, a.samples, a.s).with_epsilon(a.epsilon);
    let res = test_scale_invariance(&cfg, a.t)?;
    let mut r = report("test-scale", a, &["ks", "critical", "accepted", "reference"]);
    r.push(vec![res.ks.into(), res.critical.into(), res.accepted.into(), res.reference.into()]);
    let verdict =
        (res.ks >= res.critical).then(|| format!("KS distance {} exceeds the 1% critical value {}", res.ks, res.critical));
    Ok((r, verdict))
}

fn disorder(kind: DisorderKind) -> DisorderSpec {
    match kind {
        DisorderKind::Gaussian => DisorderSpec::gaussian(),
        DisorderKind::Rademacher => DisorderSpec::rademacher(),
    }
}

fn moment_report<A: Serialize>(name: &str, args: &A, m: dickman::models::Moment) -> Outcome {
    let mut r = report(name, args, &["value", "lambda", "sigma2", "beta"]);
    r.push(vec![m.value.into(), m.coupling.lambda.into(), m.coupling.sigma2.into(), m.coupling.beta.into()]);
    Ok((r, None))
}

fn pinning(a: &PinningArgs) -> Outcome {
    let spec = disorder(a.disorder);
    let beta = beta_for_theta(&spec, a.n_cut, a.theta)?.beta;
    let m = if a.free {
        pinning_free_second_moment(a.n, a.n_cut, beta, &spec)?
    } else {
        pinning_second_moment(a.n, a.n_cut, beta, &spec)?
    };
    moment_report("pinning-m2", a, m)
}

fn polymer(a: &PolymerArgs) -> Outcome {
    let spec = disorder(a.disorder);
    let beta = beta_for_theta(&spec, a.n_cut, a.theta)?.beta;
    if !a.free && !PolymerKernel.admissible(a.n, &[a.x1, a.x2]) {
        eprintln!("note: (n, x) is off the even sublattice; the moment is exactly 0");
    }
    let m = if a.free {
        polymer_free_second_moment(a.n, a.n_cut, beta, &spec)?
    } else {
        polymer_second_moment(a.n, [a.x1, a.x2], a.n_cut, beta, &spec)?
    };
    moment_report("polymer-m2", a, m)
}
