//! Exact binomial tail computations for success-probability intervals.

use alloc::format;

use crate::error::{Error, Result};
use crate::math;

/// `P(X <= k)` for `X ~ Binomial(n, p)`, summed from log-space terms.
fn binomial_cdf(k: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    let ln_p = math::ln(p);
    let ln_q = math::ln(1.0 - p);
    let ln_n_fact = math::ln_gamma(n as f64 + 1.0);
    let mut total = 0.0;
    for i in 0..=k.min(n) {
        let ln_term = ln_n_fact - math::ln_gamma(i as f64 + 1.0)
            - math::ln_gamma((n - i) as f64 + 1.0)
            + i as f64 * ln_p
            + (n - i) as f64 * ln_q;
        total += math::exp(ln_term);
    }
    total.min(1.0)
}

/// Exact (Clopper-Pearson) confidence interval for a binomial proportion,
/// found by bisection on the tail equations:
/// the lower bound solves `P(X >= k | p) = (1-confidence)/2` and the upper
/// bound solves `P(X <= k | p) = (1-confidence)/2`, with the conventional
/// closed endpoints at `k = 0` and `k = n`.
pub fn clopper_pearson(successes: usize, trials: usize, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::Input("interval needs at least one trial".into()));
    }
    if successes > trials {
        return Err(Error::Input(format!(
            "{successes} successes out of {trials} trials"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Input(format!(
            "confidence must lie in (0,1), got {confidence}"
        )));
    }
    let half_alpha = (1.0 - confidence) / 2.0;
    let k = successes;
    let n = trials;

    let lower = if k == 0 {
        0.0
    } else {
        // P(X >= k | p) = 1 - cdf(k-1; n, p) is increasing in p
        bisect(|p| 1.0 - binomial_cdf(k - 1, n, p) - half_alpha)
    };
    let upper = if k == n {
        1.0
    } else {
        // P(X <= k | p) is decreasing in p
        bisect(|p| half_alpha - binomial_cdf(k, n, p))
    };
    Ok((lower, upper))
}

/// Root of an increasing function on (0, 1) by plain bisection.
fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
