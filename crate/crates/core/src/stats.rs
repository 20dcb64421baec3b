//! Rank and product-moment correlation.
//!
//! Pair correlations in this crate are always taken over both orderings of
//! each unordered pair `{u, v}`. With that symmetry the x and y marginals
//! coincide, so the coefficient can be computed from per-node values and
//! pair-membership counts without materializing the ordered pairs.

use std::cmp::Ordering;

/// Fractional (average) ranks, 1-based. Ties share the mean of the ranks
/// they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let r = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Product-moment correlation; `None` when either side is constant or the
/// inputs have fewer than two points.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson needs equal-length inputs");
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman correlation: Pearson on average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Correlation of `values` across unordered node pairs, each counted in both
/// orientations.
pub fn symmetric_pearson(values: &[f64], pairs: &[(u32, u32)]) -> Option<f64> {
    SymmetricPairs::new(values.len(), pairs).pearson(values)
}

/// Rank version of [`symmetric_pearson`]. Ranks are taken over the doubled
/// multiset, so a node contributes once per pair it belongs to.
pub fn symmetric_spearman(values: &[f64], pairs: &[(u32, u32)]) -> Option<f64> {
    SymmetricPairs::new(values.len(), pairs).spearman(values)
}

/// A fixed set of unordered pairs over `n` nodes, ready to correlate many
/// different node-value assignments.
pub struct SymmetricPairs<'a> {
    pairs: &'a [(u32, u32)],
    weights: Vec<u64>,
}

impl<'a> SymmetricPairs<'a> {
    pub fn new(n: usize, pairs: &'a [(u32, u32)]) -> Self {
        SymmetricPairs { pairs, weights: membership(n, pairs) }
    }

    pub fn pearson(&self, values: &[f64]) -> Option<f64> {
        symmetric_pearson_weighted(values, &self.weights, self.pairs)
    }

    pub fn spearman(&self, values: &[f64]) -> Option<f64> {
        let ranks = weighted_average_ranks(values, &self.weights);
        symmetric_pearson_weighted(&ranks, &self.weights, self.pairs)
    }
}

/// Number of pairs each node participates in. Values of nodes outside
/// every pair are never read, so they may be NaN.
pub fn membership(n: usize, pairs: &[(u32, u32)]) -> Vec<u64> {
    let mut w = vec![0u64; n];
    for &(u, v) in pairs {
        w[u as usize] += 1;
        w[v as usize] += 1;
    }
    w
}

/// Average ranks of a multiset in which node `i` carries value `values[i]`
/// with multiplicity `weights[i]`. Nodes with zero weight get rank 0.
pub fn weighted_average_ranks(values: &[f64], weights: &[u64]) -> Vec<f64> {
    let mut order: Vec<u32> = (0..values.len() as u32)
        .filter(|&i| weights[i as usize] > 0)
        .collect();
    order.sort_unstable_by(|&a, &b| {
        values[a as usize]
            .total_cmp(&values[b as usize])
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0.0; values.len()];
    let mut below = 0u64;
    let mut start = 0;
    while start < order.len() {
        let v = values[order[start] as usize];
        let mut end = start;
        let mut group = 0u64;
        while end < order.len() && values[order[end] as usize].total_cmp(&v) == Ordering::Equal {
            group += weights[order[end] as usize];
            end += 1;
        }
        // Occupies ranks below+1 ..= below+group.
        let r = below as f64 + (group as f64 + 1.0) / 2.0;
        for &i in &order[start..end] {
            ranks[i as usize] = r;
        }
        below += group;
        start = end;
    }
    ranks
}

fn symmetric_pearson_weighted(values: &[f64], weights: &[u64], pairs: &[(u32, u32)]) -> Option<f64> {
    if pairs.is_empty() {
        return None;
    }
    let total: u64 = weights.iter().sum();
    let mean = weights
        .iter()
        .zip(values)
        .filter(|(&w, _)| w > 0)
        .map(|(&w, &v)| w as f64 * v)
        .sum::<f64>()
        / total as f64;
    let var: f64 = weights
        .iter()
        .zip(values)
        .filter(|(&w, _)| w > 0)
        .map(|(&w, &v)| w as f64 * (v - mean) * (v - mean))
        .sum();
    if var <= 0.0 {
        return None;
    }
    let cov: f64 = pairs
        .iter()
        .map(|&(u, v)| (values[u as usize] - mean) * (values[v as usize] - mean))
        .sum::<f64>()
        * 2.0;
    Some((cov / var).clamp(-1.0, 1.0))
}

/// Two-sided asymptotic p-value for a correlation coefficient `r` from `n`
/// observations (Student t with n-2 degrees of freedom).
pub fn correlation_p_value(r: f64, n: u64) -> Option<f64> {
    if n < 3 || !r.is_finite() {
        return None;
    }
    if r.abs() >= 1.0 {
        return Some(0.0);
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    let x = df / (df + t * t);
    Some(statrs::function::beta::beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0))
}

/// Mean and sample standard deviation; `None` for an empty slice.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, std))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), [1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn weighted_ranks_expand_multiplicity() {
        // Multiset {1, 1, 2, 3, 3, 3}
        let r = weighted_average_ranks(&[1.0, 2.0, 3.0, 9.0], &[2, 1, 3, 0]);
        assert_eq!(r, [1.5, 3.0, 5.0, 0.0]);
    }

    #[test]
    fn known_pearson() {
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 5.0, 4.0]).unwrap();
        assert!((r - 3.5 / 23.75f64.sqrt()).abs() < 1e-12);
        assert_eq!(pearson(&[1.0, 1.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn p_value_matches_reference() {
        // r = 0.5, n = 20: t = 2.4494897, two-sided p = 0.0247696
        let p = correlation_p_value(0.5, 20).unwrap();
        assert!((p - 0.024_769_558_804_11).abs() < 1e-10, "{p}");
        assert_eq!(correlation_p_value(0.0, 100).unwrap(), 1.0);
    }

    fn naive_symmetric(values: &[f64], pairs: &[(u32, u32)], ranks: bool) -> Option<f64> {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for &(u, v) in pairs {
            x.push(values[u as usize]);
            y.push(values[v as usize]);
            x.push(values[v as usize]);
            y.push(values[u as usize]);
        }
        if ranks {
            spearman(&x, &y)
        } else {
            pearson(&x, &y)
        }
    }

    proptest! {
        #[test]
        fn symmetric_forms_match_materialized(
            values in prop::collection::vec(0u8..6, 2..30),
            raw_pairs in prop::collection::vec((0usize..1000, 0usize..1000), 1..60),
        ) {
            let n = values.len();
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            let pairs: Vec<(u32, u32)> = raw_pairs
                .into_iter()
                .map(|(a, b)| ((a % n) as u32, (b % n) as u32))
                .filter(|(a, b)| a != b)
                .collect();
            prop_assume!(!pairs.is_empty());
            let fast_p = symmetric_pearson(&values, &pairs);
            let slow_p = naive_symmetric(&values, &pairs, false);
            let fast_s = symmetric_spearman(&values, &pairs);
            let slow_s = naive_symmetric(&values, &pairs, true);
            prop_assert_eq!(fast_p.is_some(), slow_p.is_some());
            prop_assert_eq!(fast_s.is_some(), slow_s.is_some());
            if let (Some(a), Some(b)) = (fast_p, slow_p) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            if let (Some(a), Some(b)) = (fast_s, slow_s) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
