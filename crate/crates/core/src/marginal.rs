//! Cluster marginal likelihoods for unit-variance Gaussian observations,
//! and lower bounds on how much marginal mass a cluster loses when split.
//!
//! Observations inside one cluster share a location `theta` with density
//! `N(x; theta, 1)`. Integrating `theta` out against the component prior
//! gives the cluster marginal `m(x_A)`; both supported priors admit closed
//! forms. The split-ratio functions bound `m(x_S) m(x_T) / m(x_{S u T})`
//! from below, which is the quantity that controls how fast posterior mass
//! moves toward more clusters.

use crate::error::{Error, Result};
use crate::math::{ln_gaussian_mass, LN_2PI};

/// Prior on a cluster's location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComponentPrior {
    /// Uniform on the interval `[lo, hi]`.
    UniformInterval { lo: f64, hi: f64 },
    /// Centered Gaussian with variance `sigma2`.
    ZeroMeanGaussian { sigma2: f64 },
}

impl ComponentPrior {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let p = ComponentPrior::UniformInterval { lo, hi };
        p.validate()?;
        Ok(p)
    }

    pub fn gaussian(sigma2: f64) -> Result<Self> {
        let p = ComponentPrior::ZeroMeanGaussian { sigma2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ComponentPrior::UniformInterval { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return Err(Error::invalid_parameter(format!(
                        "uniform support needs finite lo < hi, got [{lo}, {hi}]"
                    )));
                }
            }
            ComponentPrior::ZeroMeanGaussian { sigma2 } => {
                if !sigma2.is_finite() || sigma2 <= 0.0 {
                    return Err(Error::invalid_parameter(format!(
                        "prior variance must be positive and finite, got {sigma2}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Sufficient statistics of one cluster: count, sum, and sum of squares,
/// plus the extremes when they are known.
///
/// `push` and `merge` keep the extremes; `remove` forgets them whenever the
/// removed point sits on the hull, because the second-smallest value is not
/// recoverable from moments. The marginal formulas never read the extremes;
/// they exist for support checks and diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterStats {
    count: usize,
    sum: f64,
    sum_sq: f64,
    min: Option<f64>,
    max: Option<f64>,
}

impl ClusterStats {
    pub fn empty() -> Self {
        ClusterStats { count: 0, sum: 0.0, sum_sq: 0.0, min: None, max: None }
    }

    pub fn from_data(xs: &[f64]) -> Self {
        let mut s = Self::empty();
        for &x in xs {
            s.push(x);
        }
        s
    }

    pub(crate) fn from_moments(count: usize, sum: f64, sum_sq: f64) -> Self {
        ClusterStats { count, sum, sum_sq, min: None, max: None }
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
        self.min = Some(self.min.map_or(x, |m| m.min(x)));
        self.max = Some(self.max.map_or(x, |m| m.max(x)));
    }

    /// Removes one previously pushed value. Panics if the cluster is empty.
    pub fn remove(&mut self, x: f64) {
        assert!(self.count > 0, "remove from empty cluster");
        self.count -= 1;
        if self.count == 0 {
            *self = Self::empty();
            return;
        }
        self.sum -= x;
        self.sum_sq -= x * x;
        // The extremes survive only if x was strictly interior.
        if self.min.is_some_and(|m| x <= m) {
            self.min = None;
        }
        if self.max.is_some_and(|m| x >= m) {
            self.max = None;
        }
    }

    pub fn merge(&self, other: &ClusterStats) -> ClusterStats {
        let join = |a: Option<f64>, b: Option<f64>, f: fn(f64, f64) -> f64| match (a, b) {
            (Some(x), Some(y)) => Some(f(x, y)),
            (None, None) => None,
            // One side unknown poisons the merged extreme unless that side is empty.
            (Some(x), None) => if other.count == 0 { Some(x) } else { None },
            (None, Some(y)) => if self.count == 0 { Some(y) } else { None },
        };
        ClusterStats {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
            min: join(self.min, other.min, f64::min),
            max: join(self.max, other.max, f64::max),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    pub fn min(&self) -> Option<f64> {
        self.min
    }

    pub fn max(&self) -> Option<f64> {
        self.max
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn mean(&self) -> f64 {
        debug_assert!(self.count > 0);
        self.sum / self.count as f64
    }
}

/// ln of the cluster marginal `m(x_A)`, the likelihood of the cluster's data
/// with the shared location integrated out.
///
/// With `n` points, mean `xb`, and raw sum of squares `ss`:
///
/// * uniform on `[lo, hi]`: the likelihood factor
///   `(2 pi)^(-n/2) exp(-(ss - n xb^2)/2)` times the Gaussian window mass
///   `sqrt(2 pi / n) (Phi(sqrt n (hi - xb)) - Phi(sqrt n (lo - xb)))`
///   divided by the interval width;
/// * zero-mean Gaussian with precision `tau = 1 / sigma2`:
///   `(2 pi)^(-n/2) exp(-ss/2) sqrt(tau / (n + tau)) exp((n xb)^2 / (2 (n + tau)))`.
///
/// Both formulas run on sums rather than centered moments, so accuracy
/// degrades once `|sum| >> sqrt(count)`; data on the scale of this crate's
/// generators stay far from that regime.
pub fn log_marginal(stats: &ClusterStats, prior: &ComponentPrior) -> Result<f64> {
    if stats.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let n = stats.count as f64;
    let shared = -0.5 * n * LN_2PI - 0.5 * stats.sum_sq;
    Ok(match *prior {
        ComponentPrior::UniformInterval { lo, hi } => {
            let xb = stats.sum / n;
            let root_n = n.sqrt();
            let mass = ln_gaussian_mass(root_n * (lo - xb), root_n * (hi - xb));
            shared + 0.5 * stats.sum * xb // adds back n xb^2 / 2
                - (hi - lo).ln()
                + 0.5 * (LN_2PI - n.ln())
                + mass
        }
        ComponentPrior::ZeroMeanGaussian { sigma2 } => {
            let tau = 1.0 / sigma2;
            shared + 0.5 * (tau / (n + tau)).ln() + stats.sum * stats.sum / (2.0 * (n + tau))
        }
    })
}

/// ln of `m(x_S) m(x_T) / m(x_{S u T})`, the marginal cost of keeping two
/// clusters apart. Symmetric in its two arguments.
pub fn log_marginal_ratio(
    s: &ClusterStats,
    t: &ClusterStats,
    prior: &ComponentPrior,
) -> Result<f64> {
    let merged = s.merge(t);
    Ok(log_marginal(s, prior)? + log_marginal(t, prior)? - log_marginal(&merged, prior)?)
}

/// Posterior location distribution of a cluster under the zero-mean Gaussian
/// prior: returns `(mean, variance)` of `theta` given the cluster data.
/// An empty cluster returns the prior itself.
pub fn posterior_params(stats: &ClusterStats, sigma2: f64) -> Result<(f64, f64)> {
    if !sigma2.is_finite() || sigma2 <= 0.0 {
        return Err(Error::invalid_parameter(format!(
            "prior variance must be positive and finite, got {sigma2}"
        )));
    }
    let n = stats.count as f64;
    let denom = n * sigma2 + 1.0;
    Ok((sigma2 * stats.sum / denom, sigma2 / denom))
}

/// Deterministic lower bound on the split ratio under the uniform prior.
///
/// If both clusters keep a margin of at least `margin` from the ends of a
/// support of length `width`, then
///
/// ```text
/// m(x_S) m(x_T) / m(x_{S u T}) >= erf(margin / sqrt 2)^2 sqrt(2 pi) / width
///                                 * sqrt((n_s + n_t) / (n_s n_t))
/// ```
///
/// The erf factor collects the truncation masses: each cluster keeps at
/// least `erf(margin / sqrt 2)` of its Gaussian window inside the support
/// (at `margin = 3` this is about 0.9973), while the merged cluster's mass
/// is at most one.
pub fn uniform_split_floor(n_s: usize, n_t: usize, margin: f64, width: f64) -> f64 {
    debug_assert!(n_s >= 1 && n_t >= 1);
    debug_assert!(margin > 0.0 && width > 0.0);
    let c1 = libm::erf(margin / std::f64::consts::SQRT_2).powi(2);
    let n_s = n_s as f64;
    let n_t = n_t as f64;
    c1 * (2.0 * std::f64::consts::PI).sqrt() / width * ((n_s + n_t) / (n_s * n_t)).sqrt()
}

/// The data-dependent exponent in the Gaussian-prior split ratio.
///
/// With cluster sums `P = sum(x_S)`, `T = sum(x_T)`:
///
/// ```text
/// F(tau) = P^2/(n_s + tau) + T^2/(n_t + tau) - (P + T)^2/(n_s + n_t + tau)
/// ```
///
/// so that `log ratio = ln sqrt(tau (n_s + n_t + tau) / ((n_s + tau)(n_t + tau)))
/// + F(tau) / 2`. At `tau = 0` it reduces to
/// `n_s n_t (mean_S - mean_T)^2 / (n_s + n_t) >= 0`.
pub fn gaussian_ratio_exponent(tau: f64, s: &ClusterStats, t: &ClusterStats) -> f64 {
    debug_assert!(tau >= 0.0);
    debug_assert!(s.count > 0 && t.count > 0);
    let (ns, nt) = (s.count as f64, t.count as f64);
    let (p, q) = (s.sum, t.sum);
    p * p / (ns + tau) + q * q / (nt + tau) - (p + q) * (p + q) / (ns + nt + tau)
}

/// Where [`gaussian_ratio_exponent`] changes sign on the positive axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExponentRoot {
    /// The exponent is identically zero; every positive precision is a root.
    AllPositive,
    /// The exponent has no root at positive precision (it stays positive).
    NoPositiveRoot,
    /// The exponent is nonnegative on `[0, r]` and negative beyond.
    At(f64),
}

/// Classifies the positive root of the exponent, following its closed form.
///
/// Cases by the cluster means: both zero means the exponent vanishes
/// identically; exactly one zero keeps it positive everywhere; otherwise
/// the root of the underlying quadratic is
///
/// ```text
/// r = (sqrt(8 n_s n_t (mean_S - mean_T)^2 / (mean_S mean_T) + Q^2) + Q) / 4
/// Q = n_t sum_T / sum_S + n_s sum_S / sum_T - 2 (n_s + n_t)
/// ```
///
/// which is reported only when it is real and nonnegative; opposite-sign
/// means push both quadratic roots below zero (or off the real line), and
/// the exponent stays positive.
pub fn gaussian_exponent_root(s: &ClusterStats, t: &ClusterStats) -> ExponentRoot {
    debug_assert!(s.count > 0 && t.count > 0);
    let (ns, nt) = (s.count as f64, t.count as f64);
    let ms = s.sum / ns;
    let mt = t.sum / nt;
    if ms == 0.0 && mt == 0.0 {
        return ExponentRoot::AllPositive;
    }
    if ms == 0.0 || mt == 0.0 {
        return ExponentRoot::NoPositiveRoot;
    }
    let q = nt * t.sum / s.sum + ns * s.sum / t.sum - 2.0 * (ns + nt);
    let d = ms - mt;
    let radicand = 8.0 * ns * nt * d * d / (ms * mt) + q * q;
    if radicand < 0.0 {
        return ExponentRoot::NoPositiveRoot;
    }
    let r = 0.25 * (radicand.sqrt() + q);
    if r < 0.0 {
        ExponentRoot::NoPositiveRoot
    } else {
        ExponentRoot::At(r)
    }
}

/// Deterministic lower bound on the Gaussian-prior split ratio whenever the
/// exponent is nonnegative at precision `tau`:
///
/// ```text
/// ratio >= sqrt(tau/(2 (1 + tau)) * (n_s + n_t)/(n_s n_t))
/// ```
///
/// It follows from the ratio's prefactor alone, via
/// `(n_s + n_t + tau) / ((n_s + tau)(n_t + tau)) > (n_s + n_t) / (2 (1 + tau) n_s n_t)`.
pub fn gaussian_split_floor(n_s: usize, n_t: usize, tau: f64) -> f64 {
    debug_assert!(n_s >= 1 && n_t >= 1);
    debug_assert!(tau > 0.0);
    let n_s = n_s as f64;
    let n_t = n_t as f64;
    (0.5 * tau / (1.0 + tau) * (n_s + n_t) / (n_s * n_t)).sqrt()
}
