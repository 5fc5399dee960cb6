//! Stein–Chen quantities for the equilibrium count and their envelopes.
//!
//! For a fixed graph, `X_i` is the indicator that profile `i` is an
//! equilibrium, each with probability `2^-n`. With dependence sets
//! `B_i = i ^ B_0`,
//!
//! * `b1 = sum_i sum_{j in B_i} P[X_i] P[X_j] = |B_0| / 2^n`;
//! * `b2 = sum_i sum_{j in B_i, j != i} P[X_i = 1, X_j = 1]`.
//!
//! Relabelling every player's rows by `i` maps the uniform table measure to
//! itself and sends the pair `(i, i ^ j)` to `(0, j)`, so every orbit term of
//! `b2` equals the one at `i = 0` and `b2 = 2^n sum_{j in B_0 \ 0} P[X_0, X_j]`.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph for which [`stein_bounds_exact`] scans all `2^n` profiles.
pub const STEIN_MAX_VERTICES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinBounds {
    pub b1: f64,
    pub b2: f64,
    /// `2 (b1 + b2)`, the total variation bound to Poisson(1).
    pub tv_bound: f64,
    pub b0_size: u64,
}

/// `b1`, `b2` and the TV bound for `g`, by one pass over all profiles.
///
/// Player `k` is touched by `j` when some neighbour of `k` plays 1 in `j`;
/// its rows under `0` and `j` then differ. For `j` in `B_0`:
/// an untouched player that plays 1 in `j` would need both actions as best
/// reply to one row, so the term is 0; otherwise touched players contribute
/// `1/4` (independent rows) and untouched ones `1/2` (one shared row), and the
/// `2^n` orbit factor leaves `2^-touched`.
pub fn stein_bounds_exact(g: &Graph) -> Result<SteinBounds> {
    let n = g.n();
    if n > STEIN_MAX_VERTICES {
        return Err(Error::size_limit("stein_bounds_exact vertices", STEIN_MAX_VERTICES, n));
    }
    let masks: Vec<u64> = (0..n).map(|v| g.neighbor_mask(v)).collect();
    let mut b0_size = 0u64;
    // by_touched[t]: profiles in B_0 \ 0 with nonzero term and t touched players
    let mut by_touched = vec![0u64; n + 1];
    for j in 0..1u64 << n {
        let mut touched = 0u64;
        for (k, &m) in masks.iter().enumerate() {
            touched |= ((j & m != 0) as u64) << k;
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if touched == full {
            continue;
        }
        b0_size += 1;
        if j != 0 && j & !touched == 0 {
            by_touched[touched.count_ones() as usize] += 1;
        }
    }
    let b1 = b0_size as f64 / (n as f64).exp2();
    let b2 = by_touched.iter().enumerate().map(|(t, &c)| c as f64 * (-(t as f64)).exp2()).sum::<f64>();
    Ok(SteinBounds { b1, b2, tv_bound: 2.0 * (b1 + b2), b0_size })
}

fn check_np(n: usize, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParam("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// `ln((1 + x)^k - (1 - x)^k)` for `0 < x <= 1`, `k >= 1`.
///
/// Written as `k ln(1+x) + ln(1 - ((1-x)/(1+x))^k)`, which keeps full
/// relative precision when `x` is tiny and `k` large.
fn ln_power_gap(x: f64, k: f64) -> f64 {
    if x >= 1.0 {
        return k * std::f64::consts::LN_2;
    }
    let lp = x.ln_1p();
    let lm = (-x).ln_1p();
    k * lp + (-(k * (lm - lp)).exp_m1()).ln()
}

/// `S(n, p) = sum_{s=1}^n C(n,s) 2^-n [(1 + q^s)^(n-s) - (1 - q^s)^(n-s)]`
/// with `q = 1 - p`; the envelope of `E_G[b2]` over `G(n, p)`.
pub fn eval_s(n: usize, p: f64) -> Result<f64> {
    check_np(n, p)?;
    let q = 1.0 - p;
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut total = 0.0;
    for s in 1..=n {
        let k = (n - s) as f64;
        let x = q.powi(s as i32);
        if k == 0.0 || x == 0.0 {
            continue;
        }
        total += (ln_binomial(n as u64, s as u64) - ln2n + ln_power_gap(x, k)).exp();
    }
    Ok(total)
}

/// `R(n, p) = sum_{s=1}^n C(n,s) 2^-n min(1, n q^(s-1))`, the envelope of
/// `E_G[b1]`.
pub fn eval_r(n: usize, p: f64) -> Result<f64> {
    check_np(n, p)?;
    let q = 1.0 - p;
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut total = 0.0;
    for s in 1..=n {
        // powi(0) is 1, including 0^0
        let m = (n as f64 * q.powi(s as i32 - 1)).min(1.0);
        if m == 0.0 {
            continue;
        }
        total += (ln_binomial(n as u64, s as u64) - ln2n + m.ln()).exp();
    }
    Ok(total)
}

/// Probability that no edge of `G(n, c/n^2)` carries matching pennies,
/// `(1 - c/(8 n^2))^(n(n-1)/2)`; tends to `e^(-c/16)`.
pub fn predict_low_connectivity(n: usize, c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParam("n must be at least 2".into()));
    }
    let nf = n as f64;
    let rate = c / (8.0 * nf * nf);
    if !(c >= 0.0) || rate > 1.0 {
        return Err(Error::InvalidParam(format!("c/(8n^2) = {rate} outside [0, 1]")));
    }
    let pairs = nf * (nf - 1.0) / 2.0;
    Ok((pairs * (-rate).ln_1p()).exp())
}

/// `exp(-0.01 m n p (1-p)^(2n))` with `m = 0.1 n / (np + 1)`: the explicit
/// pre-asymptotic expression behind the medium-regime decay. An upper bound
/// on `P(PNE)` only up to the `exp(-Omega(n))` failure term it omits.
pub fn medium_regime_bound(n: usize, p: f64) -> Result<f64> {
    if n == 0 || !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParam(format!("need n >= 1 and p in (0, 1), got n = {n}, p = {p}")));
    }
    let nf = n as f64;
    let m = 0.1 * nf / (nf * p + 1.0);
    let exponent = 0.01 * m * nf * p * (2.0 * nf * (-p).ln_1p()).exp();
    Ok((-exponent).exp())
}
