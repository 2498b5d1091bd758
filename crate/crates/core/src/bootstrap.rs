//! Confidence intervals for MOS values.
//!
//! Two kinds of interval live here: the nonparametric percentile bootstrap of
//! a sample MOS, and the exact (Clopper-Pearson) binomial interval used to
//! bound the widest MOS interval any rating distribution can produce.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::data::{quantile_linear, ScoreCounts, SCALE_LEN};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::inv_inc_beta;

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const MIN_RESAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub low: T,
    pub high: T,
    pub level: T,
}

impl<T: Real> Interval<T> {
    pub fn width(&self) -> T {
        self.high - self.low
    }

    pub fn contains(&self, x: T) -> bool {
        self.low <= x && x <= self.high
    }
}

fn check_level<T: Real>(level: T) -> Result<()> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::Config(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    Ok(())
}

/// Percentile bootstrap CI of the mean of `votes`.
///
/// Each of the `resamples` replicates draws `votes.len()` votes with
/// replacement; the interval is the pair of empirical `(1 - level) / 2` and
/// `(1 + level) / 2` quantiles of the replicate means.
pub fn bootstrap_ci_mos<R: Rng + ?Sized>(
    votes: &[u8],
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<Interval<f64>> {
    let counts = ScoreCounts::from_votes(votes)
        .ok_or_else(|| Error::Degenerate("vote outside the 1..=5 scale".into()))?;
    bootstrap_ci_counts(&counts, resamples, level, rng)
}

/// [`bootstrap_ci_mos`] on a vote histogram.
///
/// Resampling `n` votes with replacement from a five-category sample is a
/// multinomial draw, so a replicate is generated as a chain of binomial draws
/// over the categories instead of `n` individual picks.
pub fn bootstrap_ci_counts<R: Rng + ?Sized>(
    counts: &ScoreCounts,
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<Interval<f64>> {
    let n = counts.total();
    if n < 2 {
        return Err(Error::TooFew {
            what: "votes",
            need: 2,
            got: n as usize,
        });
    }
    if resamples < MIN_RESAMPLES {
        return Err(Error::Config(format!(
            "at least {MIN_RESAMPLES} bootstrap resamples are required, got {resamples}"
        )));
    }
    check_level(level)?;

    let cats = counts.as_array();
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut left_votes = n;
        let mut left_mass = n;
        let mut sum = 0u64;
        for (i, &c) in cats.iter().enumerate() {
            if left_votes == 0 {
                break;
            }
            let c = u64::from(c);
            let drawn = if i == SCALE_LEN - 1 || c == left_mass {
                left_votes
            } else if c == 0 {
                0
            } else {
                let p = c as f64 / left_mass as f64;
                Binomial::new(left_votes, p)
                    .expect("valid binomial")
                    .sample(rng)
            };
            sum += drawn * (i as u64 + 1);
            left_votes -= drawn;
            left_mass -= c;
        }
        means.push(sum as f64 / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = 1.0 - level;
    Ok(Interval {
        low: quantile_linear(&means, alpha / 2.0),
        high: quantile_linear(&means, 1.0 - alpha / 2.0),
        level,
    })
}

/// Exact binomial proportion interval for `successes` out of `trials`.
///
/// Bounds are beta quantiles: `p_L = B⁻¹(α/2; k, n-k+1)` and
/// `p_H = B⁻¹(1-α/2; k+1, n-k)`, with `p_L = 0` at `k = 0` and `p_H = 1` at `k = n`.
pub fn clopper_pearson<T: Real>(successes: u64, trials: u64, level: T) -> Result<Interval<T>> {
    if trials == 0 {
        return Err(Error::TooFew {
            what: "trials",
            need: 1,
            got: 0,
        });
    }
    if successes > trials {
        return Err(Error::Degenerate(format!(
            "{successes} successes exceed {trials} trials"
        )));
    }
    check_level(level)?;
    let half_alpha = (T::one() - level) / T::lit(2.0);
    let k = T::from_u64(successes).unwrap();
    let n = T::from_u64(trials).unwrap();
    let low = if successes == 0 {
        T::zero()
    } else {
        inv_inc_beta(half_alpha, k, n - k + T::one())
    };
    let high = if successes == trials {
        T::one()
    } else {
        inv_inc_beta(T::one() - half_alpha, k + T::one(), n - k)
    };
    Ok(Interval { low, high, level })
}

/// Widest possible CI of a MOS of `mos` estimated from `n` votes.
///
/// The widest spread for a given mean puts a share `p = (mos - 1) / 4` of the
/// votes on 5 and the rest on 1. The MOS interval is then four times the
/// binomial interval for `round(p * n)` successes.
pub fn max_ci_width<T: Real>(mos: T, n: u64, level: T) -> Result<T> {
    if !(mos >= T::one() && mos <= T::lit(5.0)) {
        return Err(Error::Config(format!("MOS must be in [1, 5], got {mos}")));
    }
    let p = (mos - T::one()) / T::lit(4.0);
    let k = (p * T::from_u64(n).unwrap())
        .round()
        .to_u64()
        .unwrap_or(0)
        .min(n);
    let ci = clopper_pearson(k, n, level)?;
    Ok(T::lit(4.0) * ci.width())
}
