//! Happiness assortativity across exact-distance node pairs, the
//! topology-preserving permutation null model, and happiness by degree.

use std::io::{self, Write};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{pairs_by_distance, GraphError, ReplyGraph, MAX_DISTANCE};
use crate::hedonometer::HappinessScore;
use crate::rng::replica_rng;
use crate::stats::{self, SymmetricPairs};

/// Default minimum of matched words for a user to be scored.
pub const DEFAULT_ALPHA: u64 = 50;
pub const DEFAULT_PERMUTATIONS: usize = 100;

#[derive(Debug, Error)]
pub enum AssortError {
    #[error("hop distance {0} not in 1..=3")]
    BadDistance(u8),
    #[error("alpha must be at least 1")]
    BadAlpha,
    #[error("permutation count must be at least 1")]
    ZeroPermutations,
    #[error("no node pair has two qualifying scores")]
    NoQualifyingPairs,
    #[error("degree bin edges must be positive and strictly increasing")]
    BadBins,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Happiness per node, `None` where the user has no score or fewer than
/// `alpha` matched words.
pub fn qualifying_values(g: &ReplyGraph, scores: &[HappinessScore], alpha: u64) -> Vec<Option<f64>> {
    let mut out = vec![None; g.n_nodes()];
    for s in scores {
        if s.labmt_word_count >= alpha {
            if let Some(node) = g.node_of(s.user_id) {
                out[node as usize] = Some(s.h);
            }
        }
    }
    out
}

/// Node pairs at one hop distance whose endpoints both qualify.
///
/// Stored as unordered pairs plus per-node scores; the ordered view
/// ([`ScoredPairSet::ordered_pairs`]) yields each pair in both orientations.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredPairSet {
    pub distance: u8,
    pub alpha: u64,
    pub n_users_qualifying: u64,
    values: Vec<f64>,
    pairs: Vec<(u32, u32)>,
}

impl ScoredPairSet {
    /// Number of ordered pairs (twice the unordered count).
    pub fn n_pairs(&self) -> u64 {
        2 * self.pairs.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Unordered node-index pairs, `u < v`.
    pub fn node_pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Score of each node (NaN where not qualifying).
    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    pub fn ordered_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pairs.iter().flat_map(move |&(u, v)| {
            let (a, b) = (self.values[u as usize], self.values[v as usize]);
            [(a, b), (b, a)]
        })
    }

    /// `h_u,h_v` CSV of the ordered pairs, for plotting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "h_u,h_v")?;
        for (a, b) in self.ordered_pairs() {
            writeln!(w, "{a},{b}")?;
        }
        Ok(())
    }
}

fn check_params(hops: &[u8], alpha: u64) -> Result<u8, AssortError> {
    if alpha == 0 {
        return Err(AssortError::BadAlpha);
    }
    let mut max = 0;
    for &d in hops {
        if !(1..=MAX_DISTANCE).contains(&d) {
            return Err(AssortError::BadDistance(d));
        }
        max = max.max(d);
    }
    Ok(max)
}

/// Scored pair sets for several distances from one BFS sweep.
pub fn scored_pairs_multi(
    g: &ReplyGraph,
    scores: &[HappinessScore],
    hops: &[u8],
    alpha: u64,
) -> Result<Vec<ScoredPairSet>, AssortError> {
    let max_d = check_params(hops, alpha)?;
    let qualifying = qualifying_values(g, scores, alpha);
    let n_users_qualifying = qualifying.iter().flatten().count() as u64;
    if max_d == 0 {
        return Ok(Vec::new());
    }
    let mut all = pairs_by_distance(g, max_d, |u| qualifying[u as usize].is_some())?;
    let values: Vec<f64> = qualifying.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    Ok(hops
        .iter()
        .map(|&d| ScoredPairSet {
            distance: d,
            alpha,
            n_users_qualifying,
            values: values.clone(),
            pairs: std::mem::take(&mut all.by_distance[usize::from(d) - 1]),
        })
        .collect())
}

pub fn scored_pairs(
    g: &ReplyGraph,
    scores: &[HappinessScore],
    d: u8,
    alpha: u64,
) -> Result<ScoredPairSet, AssortError> {
    Ok(scored_pairs_multi(g, scores, &[d], alpha)?.remove(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r_spearman: Option<f64>,
    pub r_pearson: Option<f64>,
    /// Ordered pairs.
    pub n_pairs: u64,
    /// Asymptotic two-sided p-value using the unordered pair count as the
    /// sample size.
    pub p_value_spearman: Option<f64>,
}

pub fn correlate(pairs: &ScoredPairSet) -> CorrelationResult {
    let sp = SymmetricPairs::new(pairs.values.len(), &pairs.pairs);
    let r_spearman = sp.spearman(&pairs.values);
    CorrelationResult {
        r_spearman,
        r_pearson: sp.pearson(&pairs.values),
        n_pairs: pairs.n_pairs(),
        p_value_spearman: r_spearman
            .and_then(|r| stats::correlation_p_value(r, pairs.pairs.len() as u64)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullModelResult {
    pub distance: u8,
    pub alpha: u64,
    pub n_pairs: u64,
    pub observed_r: Option<f64>,
    /// One coefficient per replica; `null` if a replica was degenerate.
    pub null_rs: Vec<Option<f64>>,
    pub null_mean: Option<f64>,
    pub null_std: Option<f64>,
    /// `(#{|r_null| >= |r_obs|} + 1) / (n_perm + 1)`.
    pub empirical_p: Option<f64>,
    /// Set when the observed coefficient is undefined (e.g. constant scores).
    pub degenerate: bool,
    pub n_perm: usize,
    pub seed: u64,
}

/// Permutation null model for several distances at once.
///
/// Each replica shuffles the scores among the qualifying users only, keeping
/// the topology and the qualifying-node set fixed, and recomputes the
/// Spearman coefficient at every distance. Replica `i` draws from stream `i`
/// of `seed`, and the same shuffled assignment is used for every distance.
pub fn null_model_multi(
    g: &ReplyGraph,
    scores: &[HappinessScore],
    hops: &[u8],
    alpha: u64,
    n_perm: usize,
    seed: u64,
) -> Result<Vec<NullModelResult>, AssortError> {
    if n_perm == 0 {
        return Err(AssortError::ZeroPermutations);
    }
    let sets = scored_pairs_multi(g, scores, hops, alpha)?;
    null_model_from_pairs(&sets, n_perm, seed)
}

/// Null model over already materialized pair sets, which must share one
/// node-value vector (as produced by [`scored_pairs_multi`]).
pub fn null_model_from_pairs(
    sets: &[ScoredPairSet],
    n_perm: usize,
    seed: u64,
) -> Result<Vec<NullModelResult>, AssortError> {
    if n_perm == 0 {
        return Err(AssortError::ZeroPermutations);
    }
    if sets.is_empty() || sets.iter().all(ScoredPairSet::is_empty) {
        return Err(AssortError::NoQualifyingPairs);
    }
    let values = &sets[0].values;
    let holders: Vec<u32> = (0..values.len() as u32)
        .filter(|&u| !values[u as usize].is_nan())
        .collect();
    let correlators: Vec<SymmetricPairs<'_>> = sets
        .iter()
        .map(|s| SymmetricPairs::new(values.len(), &s.pairs))
        .collect();
    let observed: Vec<Option<f64>> = correlators.iter().map(|c| c.spearman(values)).collect();

    let replicas: Vec<Vec<Option<f64>>> = (0..n_perm as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut pool: Vec<f64> = holders.iter().map(|&u| values[u as usize]).collect();
            pool.shuffle(&mut rng);
            let mut permuted = values.clone();
            for (&u, &h) in holders.iter().zip(&pool) {
                permuted[u as usize] = h;
            }
            correlators.iter().map(|c| c.spearman(&permuted)).collect()
        })
        .collect();

    Ok(sets
        .iter()
        .enumerate()
        .map(|(k, set)| {
            let null_rs: Vec<Option<f64>> = replicas.iter().map(|r| r[k]).collect();
            let defined: Vec<f64> = null_rs.iter().flatten().copied().collect();
            let (null_mean, null_std) = match stats::mean_std(&defined) {
                Some((m, s)) => (Some(m), Some(s)),
                None => (None, None),
            };
            let observed_r = observed[k];
            let empirical_p = observed_r.map(|obs| {
                let extreme = defined.iter().filter(|r| r.abs() >= obs.abs()).count();
                (extreme + 1) as f64 / (n_perm + 1) as f64
            });
            NullModelResult {
                distance: set.distance,
                alpha: set.alpha,
                n_pairs: set.n_pairs(),
                observed_r,
                null_rs,
                null_mean,
                null_std,
                empirical_p,
                degenerate: observed_r.is_none(),
                n_perm,
                seed,
            }
        })
        .collect())
}

pub fn null_model(
    g: &ReplyGraph,
    scores: &[HappinessScore],
    d: u8,
    alpha: u64,
    n_perm: usize,
    seed: u64,
) -> Result<NullModelResult, AssortError> {
    Ok(null_model_multi(g, scores, &[d], alpha, n_perm, seed)?.remove(0))
}

/// Logarithmic bins 1, 2, 4, ..., 2048.
pub fn default_degree_bins() -> Vec<u64> {
    (0..=11).map(|i| 1u64 << i).collect()
}

/// Scored users whose degree falls in `[lower, upper)`; the last bin is
/// open-ended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeBin {
    pub lower: u64,
    pub upper: Option<u64>,
    pub n_users: u64,
    pub mean_h: Option<f64>,
}

/// Mean happiness of scored nodes grouped by degree. Each (window, node)
/// counts once; scores for users absent from the graph are ignored, as are
/// degrees below the first edge.
pub fn happiness_by_degree(
    g: &ReplyGraph,
    scores: &[HappinessScore],
    bin_edges: &[u64],
) -> Result<Vec<DegreeBin>, AssortError> {
    if bin_edges.is_empty() || bin_edges[0] == 0 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AssortError::BadBins);
    }
    let mut sums = vec![(0.0f64, 0u64); bin_edges.len()];
    for s in scores {
        let Some(node) = g.node_of(s.user_id) else { continue };
        let k = g.degree(node) as u64;
        let i = bin_edges.partition_point(|&e| e <= k);
        if i == 0 {
            continue;
        }
        sums[i - 1].0 += s.h;
        sums[i - 1].1 += 1;
    }
    Ok(sums
        .iter()
        .enumerate()
        .map(|(i, &(sum, n))| DegreeBin {
            lower: bin_edges[i],
            upper: bin_edges.get(i + 1).copied(),
            n_users: n,
            mean_h: (n > 0).then(|| sum / n as f64),
        })
        .collect())
}
