//! Goodness-of-fit tools: Pearson χ² with total variation, a one-sided
//! binomial test and a Kolmogorov-Smirnov check against U(0, 1).

use std::collections::BTreeMap;

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};
use thiserror::Error;

/// Minimum number of observations accepted by [`chi2_tv`].
pub const MIN_OBSERVATIONS: u64 = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("expected probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("only {0} observations, need at least {MIN_OBSERVATIONS}")]
    TooFewObservations(u64),
    #[error("expected distribution has a negative or non-finite entry")]
    BadProbability,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chi2Tv {
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub tv: f64,
}

/// Pearson χ² over the bins whose expected count is at least 5, with the
/// remaining mass pooled into one extra bin, plus the total variation
/// distance over the union of both supports.
///
/// Observations outside the expected support make χ² infinite.
pub fn chi2_tv<K: Ord>(observed: &BTreeMap<K, u64>, expected: &BTreeMap<K, f64>) -> Result<Chi2Tv, StatsError> {
    if expected.values().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(StatsError::BadProbability);
    }
    let sum: f64 = expected.values().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(StatsError::NotNormalized(sum));
    }
    let total: u64 = observed.values().sum();
    if total < MIN_OBSERVATIONS {
        return Err(StatsError::TooFewObservations(total));
    }
    let n = total as f64;

    let mut tv = 0.0;
    let mut outside = 0u64;
    for (k, &c) in observed {
        if !expected.contains_key(k) {
            outside += c;
            tv += c as f64 / n;
        }
    }
    let (mut chi2, mut bins) = (0.0, 0usize);
    let (mut pool_obs, mut pool_exp) = (0.0, 0.0);
    for (k, &p) in expected {
        let o = observed.get(k).copied().unwrap_or(0) as f64;
        tv += (o / n - p).abs();
        let e = p * n;
        if e >= 5.0 {
            chi2 += (o - e) * (o - e) / e;
            bins += 1;
        } else {
            pool_obs += o;
            pool_exp += e;
        }
    }
    tv /= 2.0;
    if pool_exp >= 5.0 {
        chi2 += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
        bins += 1;
    } else if pool_obs > 0.0 && pool_exp == 0.0 {
        outside += pool_obs as u64;
    }
    if outside > 0 {
        return Ok(Chi2Tv { chi2: f64::INFINITY, dof: bins.saturating_sub(1), p_value: 0.0, tv: tv.min(1.0) });
    }
    let dof = bins.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map(|d| d.sf(chi2)).unwrap_or(0.0)
    };
    Ok(Chi2Tv { chi2, dof, p_value, tv: tv.min(1.0) })
}

/// One-sided test of H0: Pr[event] ≤ `bound`, having seen `hits` out of
/// `trials`. Returns Pr[Bin(trials, bound) ≥ hits]; a small value rejects.
pub fn binomial_upper_p(hits: u64, trials: u64, bound: f64) -> f64 {
    if hits == 0 {
        return 1.0;
    }
    let p = bound.clamp(0.0, 1.0);
    match Binomial::new(p, trials) {
        Ok(b) => 1.0 - b.cdf(hits - 1),
        Err(_) => 0.0,
    }
}

/// Kolmogorov-Smirnov statistic of `xs` against U(0, 1) and its
/// asymptotic p-value.
pub fn ks_uniform(xs: &[f64]) -> (f64, f64) {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let x = x.clamp(0.0, 1.0);
        d = d.max((i as f64 + 1.0) / n - x).max(x - i as f64 / n);
    }
    let sn = n.sqrt();
    (d, kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d))
}

// Pr[K > x] for the Kolmogorov distribution.
fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * x * x).exp();
        s += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}
