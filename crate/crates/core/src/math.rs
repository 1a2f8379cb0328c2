//! Log-domain arithmetic helpers.

use libm::{erf, erfc};

/// ln(2*pi), used by the Gaussian density and marginal formulas.
pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_3;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// ln(exp(a) + exp(b)) computed without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln(sum exp(x_i)) with a single shift by the maximum.
/// An empty slice has zero mass, so the result is negative infinity.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Streaming log-sum-exp accumulator.
///
/// Terms are folded in the order they arrive and accumulators merge in the
/// order the caller chooses, so a fixed chunking of a large sum gives
/// bit-identical results no matter how many workers evaluate the chunks.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.sum += (x - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    /// Folds `other` into `self`; the caller fixes the merge order.
    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max <= self.max {
            self.sum += other.sum * (other.max - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

/// ln of the standard normal mass on [a, b].
///
/// The same-tail cases go through the complementary error function so the
/// difference does not cancel; the straddling case uses erf directly.
pub fn ln_gaussian_mass(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    let mass = if a >= 0.0 {
        0.5 * (erfc(a / SQRT_2) - erfc(b / SQRT_2))
    } else if b <= 0.0 {
        0.5 * (erfc(-b / SQRT_2) - erfc(-a / SQRT_2))
    } else {
        0.5 * (erf(b / SQRT_2) - erf(a / SQRT_2))
    };
    if mass > 0.0 {
        mass.ln()
    } else {
        f64::NEG_INFINITY
    }
}
