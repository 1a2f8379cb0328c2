//! Collapsed Gibbs sampling over cluster assignments.
//!
//! Component locations are integrated out, so the chain's state is just the
//! assignment vector. One sweep reassigns every datum in turn: remove it,
//! score each surviving cluster by occupancy and marginal gain, score a
//! fresh cluster, and resample. Long runs estimate the posterior of the
//! cluster count `K` on data sizes far beyond exact enumeration.

use crate::eppf::seating_log_weights;
use crate::error::{Error, Result};
use crate::marginal::{log_marginal, ClusterStats, ComponentPrior};
use crate::posterior::MixtureModel;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Initial assignment of the chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GibbsInit {
    /// Draw a partition from the prior by sequential seating (default;
    /// starts near prior-typical cluster counts).
    #[default]
    SequentialSeating,
    /// Everything in one cluster.
    AllInOne,
    /// Every datum its own cluster.
    AllSingletons,
}

/// Chain schedule and seeding.
#[derive(Clone, Copy, Debug)]
pub struct GibbsConfig {
    /// Sweeps discarded before any draw is retained.
    pub burn_in: u64,
    /// Number of retained draws.
    pub samples: u64,
    /// Sweeps between consecutive retained draws.
    pub thin: u64,
    /// Seed for the ChaCha8 generator; chain `c` of a multi-chain run uses
    /// the same seed on stream `c`.
    pub seed: u64,
    pub init: GibbsInit,
    /// Visit data in a fresh random order each sweep instead of ascending
    /// index order. Off by default so runs are easier to compare.
    pub randomize_sweep_order: bool,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            burn_in: 200_000,
            samples: 10_000,
            thin: 100,
            seed: 0,
            init: GibbsInit::default(),
            randomize_sweep_order: false,
        }
    }
}

impl GibbsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid_parameter("need at least one retained draw"));
        }
        if self.thin == 0 {
            return Err(Error::invalid_parameter("thinning interval must be at least 1"));
        }
        Ok(())
    }
}

/// One collapsed chain: assignments, per-cluster statistics, and cached
/// per-cluster log marginals.
pub struct GibbsChain<'a> {
    data: &'a [f64],
    model: &'a MixtureModel,
    rng: ChaCha8Rng,
    assignments: Vec<usize>,
    clusters: Vec<ClusterStats>,
    cluster_lm: Vec<f64>,
    /// Log marginal of each datum alone; reused for new-cluster weights.
    singleton_lm: Vec<f64>,
    randomize_sweep_order: bool,
}

impl<'a> GibbsChain<'a> {
    /// Builds a chain with the given generator (already seeded and streamed).
    fn with_rng(
        data: &'a [f64],
        model: &'a MixtureModel,
        init: GibbsInit,
        randomize_sweep_order: bool,
        mut rng: ChaCha8Rng,
    ) -> Result<Self> {
        let n = data.len();
        if n == 0 {
            return Err(Error::invalid_parameter("need at least one observation"));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid_parameter("observations must be finite"));
        }
        if let ComponentPrior::UniformInterval { lo, hi } = *model.component_prior() {
            let outside = data.iter().filter(|&&x| !(lo < x && x < hi)).count();
            if outside > 0 {
                return Err(Error::OutsideSupport { lo, hi, count: outside });
            }
        }

        let assignments = match init {
            GibbsInit::AllInOne => vec![0; n],
            GibbsInit::AllSingletons => (0..n).collect(),
            GibbsInit::SequentialSeating => {
                let params = model.prior_params();
                let mut labels = Vec::with_capacity(n);
                let mut sizes: Vec<usize> = Vec::new();
                for _ in 0..n {
                    let (join, open) = seating_log_weights(&sizes, params);
                    let l = gumbel_argmax(join.iter().copied().chain([open]), &mut rng);
                    if l == sizes.len() {
                        sizes.push(1);
                    } else {
                        sizes[l] += 1;
                    }
                    labels.push(l);
                }
                labels
            }
        };

        let num_clusters = assignments.iter().max().unwrap() + 1;
        let mut clusters = vec![ClusterStats::empty(); num_clusters];
        for (i, &l) in assignments.iter().enumerate() {
            clusters[l].push(data[i]);
        }
        let prior = model.component_prior();
        let cluster_lm =
            clusters.iter().map(|c| log_marginal(c, prior)).collect::<Result<Vec<_>>>()?;
        let singleton_lm = data
            .iter()
            .map(|&x| log_marginal(&ClusterStats::from_data(&[x]), prior))
            .collect::<Result<Vec<_>>>()?;

        let chain = GibbsChain {
            data,
            model,
            rng,
            assignments,
            clusters,
            cluster_lm,
            singleton_lm,
            randomize_sweep_order,
        };
        chain.debug_validate();
        Ok(chain)
    }

    pub fn new(data: &'a [f64], model: &'a MixtureModel, config: &GibbsConfig) -> Result<Self> {
        config.validate()?;
        Self::with_rng(
            data,
            model,
            config.init,
            config.randomize_sweep_order,
            ChaCha8Rng::seed_from_u64(config.seed),
        )
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Current state as a canonical partition.
    pub fn partition(&self) -> crate::partition::Partition {
        crate::partition::Partition::from_labels(&self.assignments)
            .expect("chain state is a valid labeling")
    }

    /// One full sweep: reassigns every datum once.
    pub fn sweep(&mut self) {
        let n = self.data.len();
        let mut order: Vec<usize> = (0..n).collect();
        if self.randomize_sweep_order {
            // Fisher-Yates on the chain's own generator keeps runs seeded.
            for i in (1..n).rev() {
                let j = self.rng.random_range(0..=i);
                order.swap(i, j);
            }
        }
        for &i in &order {
            self.reassign(i);
        }
        self.debug_validate();
    }

    fn reassign(&mut self, i: usize) {
        let x = self.data[i];
        let prior = self.model.component_prior();
        let params = self.model.prior_params();

        // Pull the datum out; drop its cluster if that empties it.
        let old = self.assignments[i];
        self.clusters[old].remove(x);
        if self.clusters[old].is_empty() {
            self.clusters.swap_remove(old);
            self.cluster_lm.swap_remove(old);
            if old < self.clusters.len() {
                // The former last cluster moved into slot `old`.
                let moved = self.clusters.len();
                for a in &mut self.assignments {
                    if *a == moved {
                        *a = old;
                    }
                }
            }
        } else {
            self.cluster_lm[old] =
                log_marginal(&self.clusters[old], prior).expect("cluster is nonempty");
        }

        // Score every cluster plus a fresh one; Gumbel-max samples the
        // categorical directly on log weights.
        let k = self.clusters.len();
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for j in 0..=k {
            let w = if j < k {
                let mut grown = self.clusters[j];
                grown.push(x);
                let occupancy = (self.clusters[j].count() as f64 - params.discount()).ln();
                occupancy + log_marginal(&grown, prior).expect("cluster is nonempty")
                    - self.cluster_lm[j]
            } else {
                params.new_block_weight(k).ln() + self.singleton_lm[i]
            };
            let score = w + gumbel(&mut self.rng);
            if score > best_score {
                best_score = score;
                best = j;
            }
        }

        self.assignments[i] = best;
        if best == k {
            let mut c = ClusterStats::empty();
            c.push(x);
            self.clusters.push(c);
            self.cluster_lm.push(self.singleton_lm[i]);
        } else {
            self.clusters[best].push(x);
            self.cluster_lm[best] =
                log_marginal(&self.clusters[best], prior).expect("cluster is nonempty");
        }
    }

    /// Debug-build cross-check: incrementally maintained cluster statistics
    /// must match a from-scratch recomputation, and no cluster may be empty.
    fn debug_validate(&self) {
        #[cfg(debug_assertions)]
        {
            let mut fresh = vec![ClusterStats::empty(); self.clusters.len()];
            for (i, &l) in self.assignments.iter().enumerate() {
                assert!(l < self.clusters.len(), "assignment to dead cluster");
                fresh[l].push(self.data[i]);
            }
            for (l, (inc, scratch)) in self.clusters.iter().zip(&fresh).enumerate() {
                assert!(!inc.is_empty(), "cluster {l} is empty");
                assert_eq!(inc.count(), scratch.count(), "cluster {l} count");
                assert!((inc.sum() - scratch.sum()).abs() < 1e-8, "cluster {l} sum");
                assert!(
                    (inc.sum_sq() - scratch.sum_sq()).abs() < 1e-8,
                    "cluster {l} sum of squares"
                );
            }
        }
    }
}

fn gumbel(rng: &mut ChaCha8Rng) -> f64 {
    // Open01 keeps u away from 0 and 1, so both logs are finite.
    let u: f64 = rng.sample(rand::distr::Open01);
    -(-u.ln()).ln()
}

fn gumbel_argmax(log_weights: impl Iterator<Item = f64>, rng: &mut ChaCha8Rng) -> usize {
    let mut best = usize::MAX;
    let mut best_score = f64::NEG_INFINITY;
    for (j, w) in log_weights.enumerate() {
        let score = w + gumbel(rng);
        if score > best_score {
            best_score = score;
            best = j;
        }
    }
    best
}

/// Empirical distribution of the cluster count over retained draws.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PosteriorHistogram {
    counts: BTreeMap<usize, u64>,
    total: u64,
}

impl PosteriorHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds directly from `(s, count)` pairs.
    pub fn from_counts(pairs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut h = Self::new();
        for (s, c) in pairs {
            if c > 0 {
                *h.counts.entry(s).or_insert(0) += c;
                h.total += c;
            }
        }
        h
    }

    pub fn push(&mut self, k: usize) {
        *self.counts.entry(k).or_insert(0) += 1;
        self.total += 1;
    }

    /// Adds another histogram's counts; integer counts make the merge exact
    /// and order-independent.
    pub fn merge(&mut self, other: &PosteriorHistogram) {
        for (&s, &c) in &other.counts {
            *self.counts.entry(s).or_insert(0) += c;
        }
        self.total += other.total;
    }

    pub fn count(&self, s: usize) -> u64 {
        self.counts.get(&s).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn prob(&self, s: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(s) as f64 / self.total as f64
    }

    /// Observed cluster counts in increasing order with their frequencies.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    /// Most frequent cluster count (smallest on ties); `None` when empty.
    pub fn mode(&self) -> Option<usize> {
        let mut best: Option<(usize, u64)> = None;
        for (&s, &c) in &self.counts {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((s, c));
            }
        }
        best.map(|(s, _)| s)
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return f64::NAN;
        }
        let weighted: u128 = self.counts.iter().map(|(&s, &c)| s as u128 * c as u128).sum();
        weighted as f64 / self.total as f64
    }
}

/// Result of a sampling run: the histogram of `K` plus the raw trace of
/// retained draws (chains concatenated in chain order).
#[derive(Clone, Debug)]
pub struct GibbsRun {
    pub histogram: PosteriorHistogram,
    pub trace: Vec<usize>,
}

/// Runs one chain: `burn_in` sweeps discarded, then `samples` draws retained
/// `thin` sweeps apart (the first retained draw lands after
/// `burn_in + thin` sweeps). Deterministic given the config.
pub fn gibbs_run(data: &[f64], model: &MixtureModel, config: &GibbsConfig) -> Result<GibbsRun> {
    gibbs_run_chains(data, model, config, 1)
}

/// Runs independent chains in parallel and pools their draws.
///
/// Chain `c` seeds ChaCha8 with the config seed on stream `c`, so chains
/// never share randomness and any chain count reproduces exactly. Results
/// are assembled in chain order (and the pooled counts are integers), so
/// the output does not depend on scheduling.
pub fn gibbs_run_chains(
    data: &[f64],
    model: &MixtureModel,
    config: &GibbsConfig,
    chains: usize,
) -> Result<GibbsRun> {
    config.validate()?;
    if chains == 0 {
        return Err(Error::invalid_parameter("need at least one chain"));
    }
    let runs: Vec<Result<(PosteriorHistogram, Vec<usize>)>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(c as u64);
            let mut chain =
                GibbsChain::with_rng(data, model, config.init, config.randomize_sweep_order, rng)?;
            for _ in 0..config.burn_in {
                chain.sweep();
            }
            let mut histogram = PosteriorHistogram::new();
            let mut trace = Vec::with_capacity(config.samples as usize);
            for _ in 0..config.samples {
                for _ in 0..config.thin {
                    chain.sweep();
                }
                let k = chain.num_clusters();
                histogram.push(k);
                trace.push(k);
            }
            Ok((histogram, trace))
        })
        .collect();

    let mut histogram = PosteriorHistogram::new();
    let mut trace = Vec::new();
    for run in runs {
        let (h, t) = run?;
        histogram.merge(&h);
        trace.extend(t);
    }
    Ok(GibbsRun { histogram, trace })
}

/// Flagging threshold for the ratio table: rows whose denominator count
/// falls below this many draws carry an unstable flag.
pub const DEFAULT_SUPPORT_FLOOR: u64 = 20;

/// One row of the empirical ratio table.
#[derive(Clone, Copy, Debug)]
pub struct RatioRow {
    pub s: usize,
    pub count: u64,
    /// `count / total`.
    pub prob: f64,
    /// `F(s+1) / F(s)`; zero when `s + 1` was never drawn.
    pub ratio: f64,
    pub ratio_times_s: f64,
    pub ratio_times_s2: f64,
    /// False when `count` is below the support floor, marking the ratio
    /// estimate as too noisy to read.
    pub stable: bool,
}

/// Ratio diagnostics between consecutive histogram frequencies; one row per
/// observed cluster count (zero-count values of `s` produce no row).
pub fn histogram_ratios(h: &PosteriorHistogram, support_floor: u64) -> Vec<RatioRow> {
    h.iter()
        .map(|(s, count)| {
            let ratio = h.count(s + 1) as f64 / count as f64;
            RatioRow {
                s,
                count,
                prob: h.prob(s),
                ratio,
                ratio_times_s: ratio * s as f64,
                ratio_times_s2: ratio * (s * s) as f64,
                stable: count >= support_floor,
            }
        })
        .collect()
}
