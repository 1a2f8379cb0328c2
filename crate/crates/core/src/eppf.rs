//! Exchangeable partition priors: the Dirichlet process and its
//! two-parameter Pitman-Yor generalization.
//!
//! The probability of a partition with blocks of sizes `b_1, .., b_s` under
//! strength `alpha` and discount `xi` is
//!
//! ```text
//! alpha (alpha + xi) (alpha + 2 xi) ... (alpha + (s-1) xi)
//! ------------------------------------------------------- prod_i (1-xi)(2-xi)...(b_i-1-xi)
//!            alpha (alpha+1) ... (alpha+n-1)
//! ```
//!
//! and `xi = 0` collapses it to the familiar `alpha^s prod (b_i - 1)! /
//! alpha^(n rising)`. The same process viewed one item at a time gives the
//! seating rule: an item joins an existing block of size `b` with weight
//! `b - xi` and opens a new block with weight `alpha + xi s`.

use libm::lgamma as ln_gamma;

use crate::error::{Error, Result};
use crate::partition::Partition;

// Below this length a direct product of logs is cheaper and slightly more
// accurate than two ln-gamma evaluations.
const DIRECT_RISING_CUTOFF: usize = 64;

/// Strength and discount of a Pitman-Yor process; `discount = 0` is the
/// Dirichlet process. Validated on construction: `alpha > 0`,
/// `0 <= discount < 1`, both finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PitmanYorParams {
    alpha: f64,
    discount: f64,
}

impl PitmanYorParams {
    pub fn new(alpha: f64, discount: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::invalid_parameter(format!(
                "strength alpha must be positive and finite, got {alpha}"
            )));
        }
        if !discount.is_finite() || !(0.0..1.0).contains(&discount) {
            return Err(Error::invalid_parameter(format!(
                "discount must lie in [0, 1), got {discount}"
            )));
        }
        Ok(PitmanYorParams { alpha, discount })
    }

    /// Dirichlet process: discount zero.
    pub fn dirichlet(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Weight of opening a new block when `s` blocks exist: `alpha + xi s`.
    #[inline]
    pub fn new_block_weight(&self, s: usize) -> f64 {
        self.alpha + self.discount * s as f64
    }
}

/// ln of the rising factorial `a (a+1) ... (a+n-1)`. Empty products are 1.
///
/// Short products are evaluated directly; long ones via ln-gamma.
pub fn log_rising_factorial(a: f64, n: usize) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::invalid_parameter(format!(
            "rising factorial base must be positive and finite, got {a}"
        )));
    }
    Ok(log_rising_unchecked(a, n))
}

#[inline]
pub(crate) fn log_rising_unchecked(a: f64, n: usize) -> f64 {
    if n < DIRECT_RISING_CUTOFF {
        let mut acc = 0.0;
        for i in 0..n {
            acc += (a + i as f64).ln();
        }
        acc
    } else {
        ln_gamma(a + n as f64) - ln_gamma(a)
    }
}

/// ln of the discounted factorial `(1-xi)(2-xi)...(c-xi)`; `c = 0` gives 0.
pub fn log_discount_factorial(c: usize, discount: f64) -> Result<f64> {
    if !discount.is_finite() || !(0.0..1.0).contains(&discount) {
        return Err(Error::invalid_parameter(format!(
            "discount must lie in [0, 1), got {discount}"
        )));
    }
    Ok(log_discount_factorial_unchecked(c, discount))
}

#[inline]
pub(crate) fn log_discount_factorial_unchecked(c: usize, discount: f64) -> f64 {
    let mut acc = 0.0;
    for j in 1..=c {
        acc += (j as f64 - discount).ln();
    }
    acc
}

/// ln of the partition prior evaluated on block sizes alone; the EPPF is a
/// symmetric function of the sizes.
pub fn log_eppf_from_sizes(sizes: &[usize], params: &PitmanYorParams) -> f64 {
    debug_assert!(sizes.iter().all(|&b| b >= 1));
    let n: usize = sizes.iter().sum();
    let mut lp = -log_rising_unchecked(params.alpha, n);
    for k in 0..sizes.len() {
        lp += params.new_block_weight(k).ln();
    }
    for &b in sizes {
        lp += log_discount_factorial_unchecked(b - 1, params.discount);
    }
    lp
}

/// ln of the partition prior of `p`.
pub fn log_eppf(p: &Partition, params: &PitmanYorParams) -> f64 {
    log_eppf_from_sizes(&p.block_sizes(), params)
}

/// One step of the seating rule given current block sizes.
///
/// Returns the per-block log weights and the new-block log weight, each
/// already normalized by `alpha + n` where `n` is the number seated so far
/// (derived from the sizes, so the normalization cannot drift out of sync).
/// With nothing seated the new-block weight is `ln 1 = 0`.
pub fn seating_log_weights(sizes: &[usize], params: &PitmanYorParams) -> (Vec<f64>, f64) {
    debug_assert!(sizes.iter().all(|&b| b >= 1));
    let n: usize = sizes.iter().sum();
    let ln_denom = (params.alpha + n as f64).ln();
    let joins = sizes
        .iter()
        .map(|&b| (b as f64 - params.discount).ln() - ln_denom)
        .collect();
    let open = params.new_block_weight(sizes.len()).ln() - ln_denom;
    (joins, open)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;

    const TOL: f64 = 1e-12;

    #[test]
    fn params_are_validated() {
        assert!(PitmanYorParams::new(0.0, 0.0).is_err());
        assert!(PitmanYorParams::new(-1.0, 0.0).is_err());
        assert!(PitmanYorParams::new(f64::NAN, 0.0).is_err());
        assert!(PitmanYorParams::new(1.0, 1.0).is_err());
        assert!(PitmanYorParams::new(1.0, -0.1).is_err());
        assert!(PitmanYorParams::new(1.0, 0.999).is_ok());
    }

    #[test]
    fn rising_factorial_values() {
        assert!((log_rising_factorial(1.0, 4).unwrap() - 24.0_f64.ln()).abs() < TOL);
        assert_eq!(log_rising_factorial(2.5, 0).unwrap(), 0.0);
        // 0.5 * 1.5 = 0.75
        assert!((log_rising_factorial(0.5, 2).unwrap() - 0.75_f64.ln()).abs() < TOL);
        assert!(log_rising_factorial(0.0, 3).is_err());
        assert!(log_rising_factorial(-2.0, 3).is_err());
    }

    #[test]
    fn rising_factorial_long_products_use_lgamma_consistently() {
        // Straddle the cutoff: both paths must agree to high accuracy.
        for &a in &[0.5, 1.0, 3.0, 10.0] {
            let direct: f64 = (0..200).map(|i| (a + i as f64).ln()).sum();
            let viagamma = log_rising_factorial(a, 200).unwrap();
            assert!(
                (direct - viagamma).abs() < 1e-9 * direct.abs().max(1.0),
                "a={a}: {direct} vs {viagamma}"
            );
        }
    }

    #[test]
    fn discount_factorial_values() {
        assert_eq!(log_discount_factorial(0, 0.3).unwrap(), 0.0);
        assert!((log_discount_factorial(3, 0.0).unwrap() - 6.0_f64.ln()).abs() < TOL);
        // (1 - 0.5)(2 - 0.5) = 0.75
        assert!((log_discount_factorial(2, 0.5).unwrap() - 0.75_f64.ln()).abs() < TOL);
        assert!(log_discount_factorial(2, 1.0).is_err());
    }

    #[test]
    fn eppf_small_cases() {
        let dp = PitmanYorParams::dirichlet(1.0).unwrap();
        // n = 2: one block and two blocks split the mass evenly at alpha = 1.
        let together = Partition::from_rgs(vec![0, 0]).unwrap();
        let apart = Partition::from_rgs(vec![0, 1]).unwrap();
        assert!((log_eppf(&together, &dp).exp() - 0.5).abs() < TOL);
        assert!((log_eppf(&apart, &dp).exp() - 0.5).abs() < TOL);
        // n = 3 all singletons: alpha^3 / (alpha (alpha+1) (alpha+2)) = 1/6.
        let singles = Partition::from_rgs(vec![0, 1, 2]).unwrap();
        assert!((log_eppf(&singles, &dp).exp() - 1.0 / 6.0).abs() < TOL);

        let py = PitmanYorParams::new(1.0, 0.3).unwrap();
        assert!((log_eppf(&together, &py).exp() - 0.7 / 2.0).abs() < TOL);
        assert!((log_eppf(&apart, &py).exp() - 1.3 / 2.0).abs() < TOL);
    }

    #[test]
    fn eppf_normalizes_at_small_n() {
        for &(alpha, xi) in &[(0.5, 0.0), (1.0, 0.3), (3.0, 0.7)] {
            let params = PitmanYorParams::new(alpha, xi).unwrap();
            for n in 1..=7 {
                let total: f64 = enumerate_partitions(n, None)
                    .unwrap()
                    .map(|p| log_eppf(&p, &params).exp())
                    .sum();
                assert!(
                    (total - 1.0).abs() < 1e-11,
                    "alpha={alpha} xi={xi} n={n}: total {total}"
                );
            }
        }
    }

    #[test]
    fn dirichlet_case_matches_direct_formula() {
        let alpha = 2.3;
        let dp = PitmanYorParams::dirichlet(alpha).unwrap();
        for p in enumerate_partitions(6, None).unwrap() {
            let sizes = p.block_sizes();
            // alpha^s prod (b-1)! / rising(alpha, n), evaluated in plain arithmetic.
            let mut v = alpha.powi(sizes.len() as i32);
            for &b in &sizes {
                v *= (1..b).map(|j| j as f64).product::<f64>();
            }
            for i in 0..6 {
                v /= alpha + i as f64;
            }
            assert!((log_eppf(&p, &dp) - v.ln()).abs() < TOL, "{p:?}");
        }
    }

    #[test]
    fn seating_weights_small_cases() {
        let dp = PitmanYorParams::dirichlet(1.0).unwrap();
        let (joins, open) = seating_log_weights(&[], &dp);
        assert!(joins.is_empty());
        assert_eq!(open, 0.0); // first item always opens a block

        let (joins, open) = seating_log_weights(&[3], &dp);
        assert!((joins[0].exp() - 0.75).abs() < TOL);
        assert!((open.exp() - 0.25).abs() < TOL);

        let py = PitmanYorParams::new(2.0, 0.5).unwrap();
        let (joins, open) = seating_log_weights(&[2, 1], &py);
        assert!((joins[0].exp() - 1.5 / 5.0).abs() < TOL);
        assert!((joins[1].exp() - 0.5 / 5.0).abs() < TOL);
        assert!((open.exp() - 3.0 / 5.0).abs() < TOL);
    }

    #[test]
    fn seating_weights_normalize() {
        for &(alpha, xi) in &[(0.5, 0.0), (1.0, 0.3), (3.0, 0.7)] {
            let params = PitmanYorParams::new(alpha, xi).unwrap();
            for sizes in [vec![], vec![1], vec![4, 2, 1], vec![10, 10, 10]] {
                let (joins, open) = seating_log_weights(&sizes, &params);
                let total: f64 = joins.iter().map(|w| w.exp()).sum::<f64>() + open.exp();
                assert!((total - 1.0).abs() < TOL);
            }
        }
    }
}
