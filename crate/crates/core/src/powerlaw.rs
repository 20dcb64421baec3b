//! Discrete power-law fitting of degree distributions.
//!
//! For every candidate lower cutoff `k_min` the scaling exponent is the
//! maximum-likelihood solution under `P(k) = k^{-α} / ζ(α, k_min)`, and the
//! cutoff kept is the one whose fitted tail is closest to the empirical tail
//! in Kolmogorov–Smirnov distance. Goodness of fit comes from a
//! semiparametric bootstrap that refits every replica from scratch.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{replica_rng, Rng as StreamRng};
use crate::zeta::{hurwitz, hurwitz_with_derivative};

/// Exponent search interval.
pub const ALPHA_MIN: f64 = 1.01;
pub const ALPHA_MAX: f64 = 6.0;
/// Candidate cutoffs must leave at least this many tail observations.
pub const MIN_TAIL: u64 = 50;
pub const DEFAULT_BOOTSTRAP: usize = 1000;
/// Score tolerance `|∂ log L / ∂α|`.
const SCORE_TOL: f64 = 1e-8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PowerLawError {
    #[error("no observations")]
    Empty,
    #[error("degree 0 cannot be fitted")]
    ZeroValue,
    #[error("all observations are equal")]
    AllEqual,
    #[error("fewer than two distinct values at or above every admissible k_min")]
    InsufficientTail,
    #[error("bootstrap count must be at least 1")]
    ZeroBootstrap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub k_min: u64,
    pub ks_distance: f64,
    pub n_tail: u64,
    pub n_total: u64,
}

impl PowerLawFit {
    /// Fitted `P(K ≤ k)` for the tail, `k ≥ k_min`.
    pub fn cdf(&self, k: u64) -> f64 {
        if k < self.k_min {
            return 0.0;
        }
        1.0 - hurwitz(self.alpha, (k + 1) as f64) / hurwitz(self.alpha, self.k_min as f64)
    }

    /// Fitted `P(K ≥ k)` for the tail, `k ≥ k_min`.
    pub fn ccdf(&self, k: u64) -> f64 {
        if k <= self.k_min {
            return 1.0;
        }
        hurwitz(self.alpha, k as f64) / hurwitz(self.alpha, self.k_min as f64)
    }
}

/// Distinct values with multiplicities plus suffix sums.
struct Histogram {
    values: Vec<u64>,
    ln_values: Vec<f64>,
    counts: Vec<u64>,
    /// Observations at or above index i.
    tail_count: Vec<u64>,
    /// Σ count·ln(value) at or above index i.
    tail_log_sum: Vec<f64>,
    n: u64,
}

impl Histogram {
    fn from_sorted(sorted: &[u64]) -> Histogram {
        let mut pairs: Vec<(u64, u64)> = Vec::new();
        for &x in sorted {
            match pairs.last_mut() {
                Some((v, c)) if *v == x => *c += 1,
                _ => pairs.push((x, 1)),
            }
        }
        Histogram::from_pairs(pairs)
    }

    /// From `(value, count)` pairs in strictly ascending value order.
    fn from_pairs(pairs: Vec<(u64, u64)>) -> Histogram {
        let (values, counts): (Vec<u64>, Vec<u64>) = pairs.into_iter().unzip();
        let m = values.len();
        let ln_values: Vec<f64> = values.iter().map(|&v| (v as f64).ln()).collect();
        let mut tail_count = vec![0u64; m + 1];
        let mut tail_log_sum = vec![0.0f64; m + 1];
        for i in (0..m).rev() {
            tail_count[i] = tail_count[i + 1] + counts[i];
            tail_log_sum[i] = tail_log_sum[i + 1] + counts[i] as f64 * ln_values[i];
        }
        Histogram {
            n: tail_count[0],
            values,
            ln_values,
            counts,
            tail_count,
            tail_log_sum,
        }
    }
}

/// Counting buffer for bootstrap replicas: dense counts for small values,
/// a sorted spill vector for the rest.
struct ReplicaCounts {
    dense: Vec<u64>,
    spill: Vec<u64>,
}

const DENSE_LIMIT: usize = 1 << 16;

impl ReplicaCounts {
    fn new() -> ReplicaCounts {
        ReplicaCounts { dense: vec![0; DENSE_LIMIT], spill: Vec::new() }
    }

    fn push(&mut self, x: u64) {
        match self.dense.get_mut(x as usize) {
            Some(c) => *c += 1,
            None => self.spill.push(x),
        }
    }

    /// Drains into a histogram, leaving the buffer empty.
    fn take(&mut self) -> Histogram {
        let mut pairs = Vec::new();
        for (v, c) in self.dense.iter_mut().enumerate() {
            if *c > 0 {
                pairs.push((v as u64, *c));
                *c = 0;
            }
        }
        self.spill.sort_unstable();
        for &x in &self.spill {
            match pairs.last_mut() {
                Some((v, c)) if *v == x => *c += 1,
                _ => pairs.push((x, 1)),
            }
        }
        self.spill.clear();
        Histogram::from_pairs(pairs)
    }
}

/// Mean-score function `E_α[ln K] - mean(ln k)`; decreasing in α.
fn mean_score(alpha: f64, k_min: f64, mean_log: f64) -> f64 {
    let (z, dz) = hurwitz_with_derivative(alpha, k_min);
    -dz / z - mean_log
}

/// Maximum-likelihood exponent for a tail with `n` observations at or above
/// `k_min` and log-sum `log_sum`, clamped to the search interval.
pub fn mle_alpha(k_min: u64, n: u64, log_sum: f64) -> f64 {
    let q = k_min as f64;
    let mean_log = log_sum / n as f64;
    let tol = SCORE_TOL / n as f64;
    let (mut lo, mut hi) = (ALPHA_MIN, ALPHA_MAX);
    let mut f_lo = mean_score(lo, q, mean_log);
    if f_lo <= 0.0 {
        return lo;
    }
    let mut f_hi = mean_score(hi, q, mean_log);
    if f_hi >= 0.0 {
        return hi;
    }
    // Illinois false position, with bisection as a fallback.
    let mut side = 0i8;
    for _ in 0..200 {
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = mean_score(x, q, mean_log);
        if fx.abs() <= tol || hi - lo < 1e-14 {
            return x;
        }
        if fx > 0.0 {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    0.5 * (lo + hi)
}

/// KS distance between the empirical tail starting at index `start` and
/// the fitted law. Gives up and returns `None` as soon as the running
/// maximum exceeds `abandon_above`.
fn tail_ks(h: &Histogram, start: usize, alpha: f64, abandon_above: f64) -> Option<f64> {
    let k_min = h.values[start];
    let z = hurwitz(alpha, k_min as f64);
    let n_tail = h.tail_count[start] as f64;
    let mut cum = 0u64;
    let mut d = 0.0f64;
    // tail_mass = ζ(α, v_j) / Z, the fitted P(K ≥ v_j).
    let mut tail_at_v = z;
    for j in start..h.values.len() {
        let v = h.values[j];
        let p_v = (-alpha * h.ln_values[j]).exp();
        let tail_after_v = tail_at_v - p_v; // ζ(α, v+1)
        cum += h.counts[j];
        let emp = cum as f64 / n_tail;
        d = d.max((emp - (1.0 - tail_after_v / z)).abs());
        if let Some(&next) = h.values.get(j + 1) {
            let gap = next - v - 1;
            let tail_at_next = if gap == 0 {
                tail_after_v
            } else if gap <= 8 {
                let mut t = tail_after_v;
                for k in v + 1..next {
                    t -= (k as f64).powf(-alpha);
                }
                t
            } else {
                hurwitz(alpha, next as f64)
            };
            if gap > 0 {
                // Fitted CDF at next-1 against the flat empirical CDF.
                d = d.max((emp - (1.0 - tail_at_next / z)).abs());
            }
            tail_at_v = tail_at_next;
        }
        if d > abandon_above {
            return None;
        }
    }
    Some(d)
}

fn fit_histogram(h: &Histogram) -> Result<PowerLawFit, PowerLawError> {
    let m = h.values.len();
    if m < 2 {
        return Err(PowerLawError::AllEqual);
    }
    let min_tail = MIN_TAIL.min(h.n);
    let mut best: Option<PowerLawFit> = None;
    for i in 0..m - 1 {
        let n_tail = h.tail_count[i];
        if n_tail < min_tail {
            break;
        }
        let k_min = h.values[i];
        let log_sum = h.tail_log_sum[i];
        let alpha = mle_alpha(k_min, n_tail, log_sum);
        let bound = best.as_ref().map_or(f64::INFINITY, |b| b.ks_distance);
        if let Some(d) = tail_ks(h, i, alpha, bound) {
            if d < bound {
                best = Some(PowerLawFit {
                    alpha,
                    k_min,
                    ks_distance: d.min(1.0),
                    n_tail,
                    n_total: h.n,
                });
            }
        }
    }
    best.ok_or(PowerLawError::InsufficientTail)
}

/// Fits a discrete power law to positive integer observations.
pub fn fit_discrete_powerlaw(values: &[u64]) -> Result<PowerLawFit, PowerLawError> {
    if values.is_empty() {
        return Err(PowerLawError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    if sorted[0] == 0 {
        return Err(PowerLawError::ZeroValue);
    }
    fit_histogram(&Histogram::from_sorted(&sorted))
}

/// Fit with the cutoff held fixed.
pub fn fit_with_kmin(values: &[u64], k_min: u64) -> Result<PowerLawFit, PowerLawError> {
    let mut tail: Vec<u64> = values.iter().copied().filter(|&v| v >= k_min && v > 0).collect();
    if tail.is_empty() {
        return Err(PowerLawError::Empty);
    }
    tail.sort_unstable();
    let h = Histogram::from_sorted(&tail);
    if h.values.len() < 2 {
        return Err(PowerLawError::InsufficientTail);
    }
    let alpha = mle_alpha(k_min, h.n, h.tail_log_sum[0]);
    let mut fit_h = h;
    // Anchor the KS walk at k_min even if k_min itself was not observed.
    if fit_h.values[0] != k_min {
        fit_h.values.insert(0, k_min);
        fit_h.ln_values.insert(0, (k_min as f64).ln());
        fit_h.counts.insert(0, 0);
        fit_h.tail_count.insert(0, fit_h.tail_count[0]);
        fit_h.tail_log_sum.insert(0, fit_h.tail_log_sum[0]);
    }
    let d = tail_ks(&fit_h, 0, alpha, f64::INFINITY).expect("no abandon bound");
    Ok(PowerLawFit {
        alpha,
        k_min,
        ks_distance: d.min(1.0),
        n_tail: fit_h.n,
        n_total: values.len() as u64,
    })
}

/// Continuous-approximation estimate `1 + n / Σ ln(k / (k_min - ½))` over
/// the observations at or above `k_min`.
pub fn approximate_alpha(values: &[u64], k_min: u64) -> Option<f64> {
    let shift = k_min as f64 - 0.5;
    let (n, s) = values
        .iter()
        .filter(|&&k| k >= k_min)
        .fold((0u64, 0.0f64), |(n, s), &k| (n + 1, s + (k as f64 / shift).ln()));
    (n > 0 && s > 0.0).then(|| 1.0 + n as f64 / s)
}

/// Exact sampler for the discrete power law on `k ≥ k_min`.
///
/// An alias table covers the head of the distribution; the remaining mass
/// (at most 1e-10, or whatever lies past the table cap) is drawn from the
/// continuous approximation and rounded.
pub struct DiscretePowerLaw {
    alpha: f64,
    k_min: u64,
    table_end: u64,
    head_mass: f64,
    prob: Vec<f64>,
    alias: Vec<u32>,
}

const TABLE_CAP: u64 = 2_000_000;

impl DiscretePowerLaw {
    pub fn new(alpha: f64, k_min: u64) -> DiscretePowerLaw {
        assert!(alpha > 1.0 && k_min >= 1);
        let z = hurwitz(alpha, k_min as f64);
        let mut pmf = Vec::new();
        let mut remaining = z;
        let mut k = k_min;
        while remaining / z > 1e-10 && (k - k_min) < TABLE_CAP {
            let p = (k as f64).powf(-alpha);
            pmf.push(p);
            remaining -= p;
            k += 1;
        }
        let table_end = k;
        // Recompute the leftover exactly rather than by subtraction.
        let tail_mass = hurwitz(alpha, table_end as f64) / z;
        let head_mass = 1.0 - tail_mass;
        let (prob, alias) = build_alias(&pmf);
        DiscretePowerLaw { alpha, k_min, table_end, head_mass, prob, alias }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        if u < self.head_mass || self.head_mass >= 1.0 {
            let n = self.prob.len();
            let x: f64 = rng.random::<f64>() * n as f64;
            let i = (x as usize).min(n - 1);
            let frac = x - i as f64;
            let j = if frac < self.prob[i] { i } else { self.alias[i] as usize };
            self.k_min + j as u64
        } else {
            // Continuous Pareto above table_end - ½, rounded to an integer.
            let v: f64 = rng.random();
            let x = (self.table_end as f64 - 0.5) * (1.0 - v).powf(-1.0 / (self.alpha - 1.0));
            (x + 0.5).floor().max(self.table_end as f64) as u64
        }
    }
}

/// Vose alias tables for a (not necessarily normalized) pmf.
fn build_alias(weights: &[f64]) -> (Vec<f64>, Vec<u32>) {
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
    let mut prob = vec![1.0; n];
    let mut alias: Vec<u32> = (0..n as u32).collect();
    let mut small: Vec<u32> = Vec::new();
    let mut large: Vec<u32> = Vec::new();
    for (i, &p) in scaled.iter().enumerate() {
        if p < 1.0 {
            small.push(i as u32);
        } else {
            large.push(i as u32);
        }
    }
    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        prob[s as usize] = scaled[s as usize];
        alias[s as usize] = l;
        scaled[l as usize] -= 1.0 - scaled[s as usize];
        if scaled[l as usize] < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    (prob, alias)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub p_value: f64,
    pub n_bootstrap: usize,
    pub seed: u64,
}

/// Semiparametric bootstrap p-value for a fit.
///
/// Each replica draws `n_total` points: with probability `n_tail/n_total`
/// from the fitted law, otherwise uniformly from the observed values below
/// `k_min`. The replica is refitted (cutoff searched afresh) and counts
/// toward `p` when its KS distance is at least the observed one.
pub fn gof_pvalue(
    fit: &PowerLawFit,
    values: &[u64],
    n_bootstrap: usize,
    seed: u64,
) -> Result<GofResult, PowerLawError> {
    if n_bootstrap == 0 {
        return Err(PowerLawError::ZeroBootstrap);
    }
    let body: Vec<u64> = values.iter().copied().filter(|&v| v < fit.k_min).collect();
    let law = DiscretePowerLaw::new(fit.alpha, fit.k_min);
    let n = fit.n_total as usize;
    let p_tail = fit.n_tail as f64 / fit.n_total as f64;
    let hits: usize = (0..n_bootstrap as u64)
        .into_par_iter()
        .map_init(ReplicaCounts::new, |buf, r| {
            let mut rng: StreamRng = replica_rng(seed, r);
            for _ in 0..n {
                let from_tail = body.is_empty() || rng.random::<f64>() < p_tail;
                buf.push(if from_tail {
                    law.sample(&mut rng)
                } else {
                    body[rng.random_range(0..body.len())]
                });
            }
            match fit_histogram(&buf.take()) {
                Ok(f) => usize::from(f.ks_distance >= fit.ks_distance),
                // A replica too degenerate to fit is at least as far from a
                // power law as the data.
                Err(_) => 1,
            }
        })
        .sum();
    Ok(GofResult {
        p_value: hits as f64 / n_bootstrap as f64,
        n_bootstrap,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_inputs() {
        assert_eq!(fit_discrete_powerlaw(&[]), Err(PowerLawError::Empty));
        assert_eq!(fit_discrete_powerlaw(&[5; 100]), Err(PowerLawError::AllEqual));
        assert_eq!(fit_discrete_powerlaw(&[0, 1, 2]), Err(PowerLawError::ZeroValue));
    }

    #[test]
    fn mle_solves_score_equation() {
        // Sample-free check: choose a log-sum, solve, verify the score is ~0.
        let (k_min, n) = (10u64, 1000u64);
        let log_sum = n as f64 * (10.0f64).ln() * 1.12;
        let a = mle_alpha(k_min, n, log_sum);
        let (z, dz) = hurwitz_with_derivative(a, k_min as f64);
        let score = -(n as f64) * dz / z - log_sum;
        assert!(score.abs() < 1e-6, "{score}");
        assert!(a > ALPHA_MIN && a < ALPHA_MAX);
    }

    #[test]
    fn alias_table_reproduces_pmf() {
        let w = [0.5, 0.25, 0.125, 0.125];
        let (prob, alias) = build_alias(&w);
        let n = w.len() as f64;
        for (target, &wt) in w.iter().enumerate() {
            let mut mass = 0.0;
            for i in 0..w.len() {
                if i == target {
                    mass += prob[i] / n;
                }
                if alias[i] as usize == target && prob[i] < 1.0 {
                    mass += (1.0 - prob[i]) / n;
                }
            }
            assert!((mass - wt).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicated_sample_keeps_alpha() {
        let law = DiscretePowerLaw::new(2.5, 3);
        let mut rng = replica_rng(5, 0);
        let xs: Vec<u64> = (0..3000).map(|_| law.sample(&mut rng)).collect();
        let once = fit_discrete_powerlaw(&xs).unwrap();
        let twice = fit_discrete_powerlaw(&[xs.clone(), xs].concat()).unwrap();
        assert_eq!(once.k_min, twice.k_min);
        assert!((once.alpha - twice.alpha).abs() < 1e-9);
    }

    #[test]
    fn cdf_reaches_one() {
        let fit = PowerLawFit { alpha: 3.5, k_min: 34, ks_distance: 0.0, n_tail: 1, n_total: 1 };
        assert_eq!(fit.cdf(33), 0.0);
        assert!(fit.cdf(34) > 0.0);
        assert!(1.0 - fit.cdf(1_000_000) < 1e-10);
        assert_eq!(fit.ccdf(34), 1.0);
    }

    #[test]
    fn bootstrap_is_reproducible() {
        let law = DiscretePowerLaw::new(3.0, 2);
        let mut rng = replica_rng(1, 0);
        let xs: Vec<u64> = (0..500).map(|_| law.sample(&mut rng)).collect();
        let fit = fit_discrete_powerlaw(&xs).unwrap();
        let a = gof_pvalue(&fit, &xs, 100, 42).unwrap();
        let b = gof_pvalue(&fit, &xs, 100, 42).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.p_value));
        assert_eq!(gof_pvalue(&fit, &xs, 0, 42), Err(PowerLawError::ZeroBootstrap));
    }
}
