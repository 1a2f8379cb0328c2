//! Shared oracles for the integration suites. Everything here is written
//! from scratch against the definitions, not the library internals:
//! quadrature instead of closed forms, direct products instead of log
//! tables, block recursion instead of growth strings.
#![allow(dead_code)]

use bnpmix::marginal::ComponentPrior;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::hash::Hash;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

pub fn seeded_normal(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Adaptive Simpson with Richardson correction. `tol` is absolute.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Cluster marginal by direct numerical integration of the definition:
/// prior density times the product of unit-variance Gaussian likelihoods.
/// Peak-stabilized so the result is a log value; the integrand is split at
/// breakpoints bracketing the likelihood bump so adaptivity never misses
/// a narrow peak.
pub fn log_marginal_by_quadrature(values: &[f64], prior: &ComponentPrior) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let log_like = |theta: f64| -> f64 {
        let ss: f64 = values.iter().map(|x| (x - theta) * (x - theta)).sum();
        -0.5 * n * LN_2PI - 0.5 * ss
    };

    let (log_f, center, sd, lo, hi): (Box<dyn Fn(f64) -> f64 + '_>, f64, f64, f64, f64) = match *prior
    {
        ComponentPrior::UniformInterval { lo, hi } => {
            let width = hi - lo;
            let c = mean.clamp(lo, hi);
            (
                Box::new(move |t| -width.ln() + log_like(t)),
                c,
                n.sqrt().recip(),
                lo,
                hi,
            )
        }
        ComponentPrior::ZeroMeanGaussian { sigma2 } => {
            let sum: f64 = values.iter().sum();
            let c = sigma2 * sum / (n * sigma2 + 1.0);
            let sd = (sigma2 / (n * sigma2 + 1.0)).sqrt();
            (
                Box::new(move |t| {
                    -0.5 * (LN_2PI + sigma2.ln()) - t * t / (2.0 * sigma2) + log_like(t)
                }),
                c,
                sd,
                c - 14.0 * sd,
                c + 14.0 * sd,
            )
        }
    };

    let peak = log_f(center);
    let g = |t: f64| (log_f(t) - peak).exp();

    let mut cuts = vec![lo, hi];
    for k in [-14.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 14.0] {
        let p = center + k * sd;
        if p > lo && p < hi {
            cuts.push(p);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let total: f64 = cuts
        .windows(2)
        .map(|w| adaptive_simpson(&g, w[0], w[1], 1e-13))
        .sum();
    peak + total.ln()
}

/// Every set partition of {0..n-1} as explicit blocks, built by recursing
/// on where each element goes. Independent of any string encoding.
pub fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

/// Partition prior probability as plain products, no logs, no tables.
pub fn naive_eppf(sizes: &[usize], alpha: f64, discount: f64) -> f64 {
    let n: usize = sizes.iter().sum();
    let mut num = 1.0;
    for k in 0..sizes.len() {
        num *= alpha + discount * k as f64;
    }
    for &b in sizes {
        for c in 1..b {
            num *= c as f64 - discount;
        }
    }
    let mut den = 1.0;
    for i in 0..n {
        den *= alpha + i as f64;
    }
    num / den
}

/// Total variation distance between two (sub)probability maps.
pub fn tv<K: Eq + Hash + Clone>(p: &HashMap<K, f64>, q: &HashMap<K, f64>) -> f64 {
    let mut keys: Vec<K> = p.keys().cloned().collect();
    for k in q.keys() {
        if !p.contains_key(k) {
            keys.push(k.clone());
        }
    }
    0.5 * keys
        .iter()
        .map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Log probability of reaching `target` by seating items one at a time in
/// the given order, each joining its target block. Exchangeability says
/// this must not depend on the order.
pub fn seating_log_prob(
    target: &bnpmix::partition::Partition,
    order: &[usize],
    params: &bnpmix::eppf::PitmanYorParams,
) -> f64 {
    let mut sizes: Vec<usize> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    let mut total = 0.0;
    for &item in order {
        let (joins, open) = bnpmix::eppf::seating_log_weights(&sizes, params);
        let block = target.block_of(item);
        match slot.get(&block) {
            Some(&j) => {
                total += joins[j];
                sizes[j] += 1;
            }
            None => {
                total += open;
                slot.insert(block, sizes.len());
                sizes.push(1);
            }
        }
    }
    total
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let m = xs.len();
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; m];
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let m = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / m;
    let my = ry.iter().sum::<f64>() / m;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    cov / (vx * vy).sqrt()
}
