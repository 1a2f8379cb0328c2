//! Randomized self-verification suites behind the `verify` command:
//! deterministic spot checks of the split-ratio floors and the
//! split-enumeration route to the posterior ratio, at configurable scale.
//!
//! A failing suite is a *result*, not an error: callers inspect the report
//! and decide (the CLI maps it to a dedicated exit code). The
//! `marginal_bias` hook deliberately corrupts the computed ratios so the
//! failure path itself can be exercised end to end.

use crate::error::Result;
use crate::eppf::PitmanYorParams;
use crate::marginal::{
    gaussian_ratio_exponent, gaussian_split_floor, log_marginal_ratio, uniform_split_floor,
    ClusterStats, ComponentPrior,
};
use crate::posterior::{exact_posterior, ratio_via_extensions, ExactOptions, MixtureModel};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Scale and seeding of the verification run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Random cluster pairs per floor suite.
    pub floor_cases: usize,
    /// Random datasets per (n, model, prior) combination in the identity
    /// suite.
    pub identity_datasets: usize,
    /// The identity suite runs each n from 4 up to this (enumeration cost
    /// grows like the Bell numbers).
    pub identity_n: usize,
    pub seed: u64,
    /// Fault injection: added to every computed log marginal ratio before
    /// the floor comparisons. Zero in normal operation; a negative value
    /// simulates a broken marginal and must make the floor suites fail.
    pub marginal_bias: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            floor_cases: 1000,
            identity_datasets: 2,
            identity_n: 6,
            seed: 17,
            marginal_bias: 0.0,
        }
    }
}

/// Outcome of one suite.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Description of the first failing case, for the report.
    pub first_counterexample: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// All suite outcomes of one verification run.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// Comparison slack for the floor inequalities: they hold with real
/// analytic margin, so anything beyond rounding noise is a genuine breach.
const FLOOR_SLACK: f64 = 1e-12;

/// Runs all suites and reports per-suite pass/fail with counterexamples.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerifyReport> {
    Ok(VerifyReport {
        suites: vec![
            uniform_floor_suite(opts)?,
            gaussian_floor_suite(opts)?,
            extension_identity_suite(opts)?,
        ],
    })
}

/// Cluster pairs with a 3-wide margin inside a [-10, 10] support must keep
/// their marginal ratio above the deterministic uniform-prior floor.
fn uniform_floor_suite(opts: &VerifyOptions) -> Result<SuiteResult> {
    const LO: f64 = -10.0;
    const HI: f64 = 10.0;
    const MARGIN: f64 = 3.0;
    let prior = ComponentPrior::uniform(LO, HI)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut failures = 0;
    let mut first = None;

    for case in 0..opts.floor_cases {
        let s = draw_cluster(&mut rng, |r| r.random_range(LO + MARGIN..HI - MARGIN));
        let t = draw_cluster(&mut rng, |r| r.random_range(LO + MARGIN..HI - MARGIN));
        let lmr = log_marginal_ratio(&s, &t, &prior)? + opts.marginal_bias;
        let floor = uniform_split_floor(s.count(), t.count(), MARGIN, HI - LO);
        if lmr < floor.ln() - FLOOR_SLACK {
            failures += 1;
            first.get_or_insert_with(|| {
                format!(
                    "case {case}: sizes ({}, {}), means ({}, {}): \
                     log ratio {lmr} under log floor {}",
                    s.count(),
                    t.count(),
                    s.mean(),
                    t.mean(),
                    floor.ln()
                )
            });
        }
    }
    Ok(SuiteResult {
        name: "uniform-split-floor",
        cases: opts.floor_cases,
        failures,
        first_counterexample: first,
    })
}

/// Whenever the data-dependent exponent is nonnegative at the prior
/// precision, the Gaussian-prior ratio must clear its floor.
fn gaussian_floor_suite(opts: &VerifyOptions) -> Result<SuiteResult> {
    const TAUS: [f64; 3] = [0.25, 1.0, 4.0];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let mut failures = 0;
    let mut first = None;
    let mut cases = 0;

    for case in 0..opts.floor_cases {
        let s = draw_cluster(&mut rng, |r| r.sample(StandardNormal));
        let t = draw_cluster(&mut rng, |r| r.sample(StandardNormal));
        for tau in TAUS {
            if gaussian_ratio_exponent(tau, &s, &t) < 0.0 {
                continue;
            }
            cases += 1;
            let prior = ComponentPrior::gaussian(1.0 / tau)?;
            let lmr = log_marginal_ratio(&s, &t, &prior)? + opts.marginal_bias;
            let floor = gaussian_split_floor(s.count(), t.count(), tau);
            if lmr < floor.ln() - FLOOR_SLACK {
                failures += 1;
                first.get_or_insert_with(|| {
                    format!(
                        "case {case}: sizes ({}, {}), tau {tau}: \
                         log ratio {lmr} under log floor {}",
                        s.count(),
                        t.count(),
                        floor.ln()
                    )
                });
            }
        }
    }
    Ok(SuiteResult {
        name: "gaussian-split-floor",
        cases,
        failures,
        first_counterexample: first,
    })
}

/// The split-enumeration route must reproduce the direct consecutive ratio
/// for every s, model, and prior.
fn extension_identity_suite(opts: &VerifyOptions) -> Result<SuiteResult> {
    const REL_TOL: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(2));
    let mut failures = 0;
    let mut first = None;
    let mut cases = 0;
    let exact_opts = ExactOptions::default();

    let params =
        [PitmanYorParams::dirichlet(1.0)?, PitmanYorParams::new(1.0, 0.5)?];
    let priors =
        [ComponentPrior::gaussian(1.0)?, ComponentPrior::uniform(-12.0, 12.0)?];

    for n in 4..=opts.identity_n.max(4) {
        for _ in 0..opts.identity_datasets {
            let data: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            for pp in params {
                for prior in priors {
                    let model = MixtureModel::new(pp, prior)?;
                    let post = exact_posterior(&data, &model)?;
                    for s in 1..n {
                        cases += 1;
                        let direct = post.ratio(s)?;
                        let via = ratio_via_extensions(&data, &model, s, &exact_opts)?;
                        if (via - direct).abs() > REL_TOL * direct.abs() {
                            failures += 1;
                            first.get_or_insert_with(|| {
                                format!(
                                    "n {n}, s {s}, discount {}, {prior:?}: \
                                     split route {via} vs direct {direct}",
                                    pp.discount()
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(SuiteResult {
        name: "extension-identity",
        cases,
        failures,
        first_counterexample: first,
    })
}

fn draw_cluster(rng: &mut ChaCha8Rng, mut draw: impl FnMut(&mut ChaCha8Rng) -> f64) -> ClusterStats {
    let size = rng.random_range(1..=30);
    let mut s = ClusterStats::empty();
    for _ in 0..size {
        s.push(draw(rng));
    }
    s
}
