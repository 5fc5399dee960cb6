use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Counts of observed values of `Z`, sparse so huge counts cost nothing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Histogram {
    counts: BTreeMap<u64, u64>,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: u64) {
        *self.counts.entry(z).or_insert(0) += 1;
    }

    pub fn get(&self, z: u64) -> u64 {
        self.counts.get(&z).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `(value, count)` in increasing value order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn mean(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.iter().map(|(k, c)| k as f64 * c as f64).sum::<f64>() / total as f64)
    }

    /// Standard error of the mean, from the sample variance.
    pub fn std_error(&self) -> Option<f64> {
        let total = self.total();
        if total < 2 {
            return None;
        }
        let mean = self.mean()?;
        let ss: f64 = self.iter().map(|(k, c)| c as f64 * (k as f64 - mean).powi(2)).sum();
        Some((ss / (total - 1) as f64 / total as f64).sqrt())
    }
}

impl FromIterator<u64> for Histogram {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut h = Histogram::new();
        for z in iter {
            h.add(z);
        }
        h
    }
}

/// `e^-λ λ^k / k!`, through the log-gamma function.
pub fn poisson_pmf(k: u64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParam(format!("Poisson rate {lambda} must be positive")));
    }
    let k = k as f64;
    Ok((k * lambda.ln() - lambda - ln_gamma(k + 1.0)).exp())
}

/// Wilson score interval for a binomial proportion, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidParam(format!(
            "need 0 <= successes <= trials, trials >= 1; got {successes}/{trials}"
        )));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::InvalidParam(format!("z = {z} must be non-negative")));
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    Ok((lo, hi))
}

/// Total variation distance between the empirical law of `hist` and
/// Poisson(λ). Values are summed until the Poisson tail left over is below
/// `1e-12`, and over every observed value beyond that.
pub fn tv_distance(hist: &Histogram, lambda: f64) -> Result<f64> {
    if hist.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    poisson_pmf(0, lambda)?;
    let total = hist.total() as f64;
    let mut sum = 0.0;
    let mut cdf = 0.0;
    let mut k = 0u64;
    loop {
        let pk = poisson_pmf(k, lambda)?;
        cdf += pk;
        sum += (hist.get(k) as f64 / total - pk).abs();
        if 1.0 - cdf < 1e-12 && k as f64 > lambda {
            break;
        }
        k += 1;
    }
    for (z, c) in hist.iter().filter(|&(z, _)| z > k) {
        sum += (c as f64 / total - poisson_pmf(z, lambda)?).abs();
    }
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// Rough one-standard-deviation size of the sampling noise in
/// [`tv_distance`]: `0.5 sum_k sqrt(f_k (1 - f_k) / N)` over observed values.
pub fn tv_sampling_error(hist: &Histogram) -> f64 {
    let total = hist.total() as f64;
    0.5 * hist
        .iter()
        .map(|(_, c)| {
            let f = c as f64 / total;
            (f * (1.0 - f) / total).sqrt()
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pmf_values() {
        let e = (-1.0f64).exp();
        assert!((poisson_pmf(0, 1.0).unwrap() - e).abs() < 1e-15);
        assert!((poisson_pmf(1, 1.0).unwrap() - e).abs() < 1e-15);
        assert!((poisson_pmf(3, 2.0).unwrap() - 8.0 / 6.0 * (-2.0f64).exp()).abs() < 1e-14);
        assert!(poisson_pmf(1, 0.0).is_err());
        let total: f64 = (0..60).map(|k| poisson_pmf(k, 4.0).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wilson_bounds() {
        assert_eq!(wilson_interval(0, 50, Z_99).unwrap().0, 0.0);
        assert_eq!(wilson_interval(50, 50, Z_99).unwrap().1, 1.0);
        let (lo, hi) = wilson_interval(632, 1000, 1.959963984540054).unwrap();
        // standard Wilson values for 632/1000 at 95%
        assert!((lo - 0.60166).abs() < 1e-4 && (hi - 0.66133).abs() < 1e-4, "{lo} {hi}");
        assert!(wilson_interval(3, 2, 1.0).is_err());
        assert!(wilson_interval(0, 0, 1.0).is_err());
    }

    #[test]
    fn tv_closed_forms() {
        let at_zero: Histogram = std::iter::repeat_n(0, 10).collect();
        let want = 1.0 - (-1.0f64).exp();
        assert!((tv_distance(&at_zero, 1.0).unwrap() - want).abs() < 1e-12);

        let big = 1u64 << 40;
        let mut h = Histogram::new();
        for k in 0..30u64 {
            let c = (poisson_pmf(k, 1.0).unwrap() * big as f64).round() as u64;
            h.counts.insert(k, c);
        }
        h.counts.retain(|_, c| *c > 0);
        assert!(tv_distance(&h, 1.0).unwrap() < 1e-9);

        // a far outlier counts in full
        let far: Histogram = [1u64 << 50].into_iter().collect();
        assert!((tv_distance(&far, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(tv_distance(&Histogram::new(), 1.0), Err(Error::EmptyHistogram));
    }

    #[test]
    fn histogram_moments() {
        let h: Histogram = [0, 1, 1, 2].into_iter().collect();
        assert_eq!(h.total(), 4);
        assert_eq!(h.mean(), Some(1.0));
        let se = h.std_error().unwrap();
        assert!((se - (2.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn tv_is_a_distance_in_range(values in proptest::collection::vec(0u64..12, 1..200), lambda in 0.1f64..6.0) {
            let h: Histogram = values.into_iter().collect();
            let d = tv_distance(&h, lambda).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
        }

        #[test]
        fn wilson_contains_estimate(trials in 1u64..5000, frac in 0.0f64..=1.0, z in 0.0f64..4.0) {
            let s = (frac * trials as f64).floor() as u64;
            let (lo, hi) = wilson_interval(s, trials, z).unwrap();
            let phat = s as f64 / trials as f64;
            prop_assert!(0.0 <= lo && lo <= phat + 1e-12 && phat <= hi + 1e-12 && hi <= 1.0);
        }
    }
}
