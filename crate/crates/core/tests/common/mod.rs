//! Brute-force reference implementations and synthetic data generators
//! shared by the integration and acceptance tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use hedonet::graph::NetworkStats;
use hedonet::hedonometer::HappinessScore;
use hedonet::ingest::ReplyEvent;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Reply events among `n_users` ids with a mix of one-way and answered
/// replies, repeats and self-replies.
pub fn random_events(r: &mut impl Rng, n_users: u64, n_events: usize) -> Vec<ReplyEvent> {
    let mut out = Vec::with_capacity(n_events);
    while out.len() < n_events {
        let a = 1000 + r.random_range(0..n_users) * 7;
        let b = 1000 + r.random_range(0..n_users) * 7;
        out.push(ReplyEvent { window_index: 0, from_user: a, to_user: b });
        if r.random_bool(0.4) && out.len() < n_events {
            out.push(ReplyEvent { window_index: 0, from_user: b, to_user: a });
        }
    }
    out.shuffle(r);
    out
}

/// Undirected edges (a < b) by definition: both directions observed,
/// distinct endpoints.
pub fn oracle_reciprocal(events: &[ReplyEvent]) -> BTreeSet<(u64, u64)> {
    let directed: HashSet<(u64, u64)> = events.iter().map(|e| (e.from_user, e.to_user)).collect();
    directed
        .iter()
        .filter(|&&(a, b)| a < b && directed.contains(&(b, a)))
        .copied()
        .collect()
}

/// Dense adjacency over the endpoints of `edges`, indexed in ascending id
/// order.
pub struct Dense {
    pub ids: Vec<u64>,
    pub adj: Vec<Vec<bool>>,
}

impl Dense {
    pub fn new(edges: &BTreeSet<(u64, u64)>) -> Dense {
        let ids: Vec<u64> = edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<u64, usize> = ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let n = ids.len();
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            let (i, j) = (index[&a], index[&b]);
            adj[i][j] = true;
            adj[j][i] = true;
        }
        Dense { ids, adj }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.adj[i].iter().filter(|&&x| x).count() as u64
    }

    /// All-pairs shortest path lengths (u32::MAX when disconnected).
    pub fn floyd_warshall(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let inf = u32::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for i in 0..n {
            d[i][i] = 0;
            for j in 0..n {
                if self.adj[i][j] {
                    d[i][j] = 1;
                }
            }
        }
        for k in 0..n {
            let dk = d[k].clone();
            for row in d.iter_mut() {
                let dik = row[k];
                if dik == inf {
                    continue;
                }
                for (x, &y) in row.iter_mut().zip(&dk) {
                    if dik + y < *x {
                        *x = dik + y;
                    }
                }
            }
        }
        d
    }

    /// Pairs (i < j) at shortest-path distance exactly `dist`.
    pub fn pairs_at(&self, apsp: &[Vec<u32>], dist: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if apsp[i][j] == dist {
                    out.push((i as u32, j as u32));
                }
            }
        }
        out
    }

    pub fn stats(&self) -> NetworkStats {
        let n = self.n();
        let deg: Vec<u64> = (0..n).map(|i| self.degree(i)).collect();
        let m = deg.iter().sum::<u64>() / 2;
        let mut triangles = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                if !self.adj[i][j] {
                    continue;
                }
                for k in j + 1..n {
                    if self.adj[i][k] && self.adj[j][k] {
                        triangles += 1;
                    }
                }
            }
        }
        let triples: u64 = deg.iter().map(|&k| k * k.saturating_sub(1) / 2).sum();
        let comps = self.component_sizes();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.adj[i][j] {
                    xs.push(deg[i] as f64);
                    ys.push(deg[j] as f64);
                }
            }
        }
        NetworkStats {
            n_nodes: n as u64,
            n_edges: m,
            mean_degree: (n > 0).then(|| 2.0 * m as f64 / n as f64),
            max_degree: deg.iter().copied().max().unwrap_or(0),
            global_clustering: (triples > 0).then(|| 3.0 * triangles as f64 / triples as f64),
            n_components: comps.len() as u64,
            giant_fraction: (n > 0).then(|| *comps.iter().max().unwrap() as f64 / n as f64),
            degree_assortativity_spearman: naive_pearson(&ranks(&xs), &ranks(&ys)),
            degree_assortativity_pearson: naive_pearson(&xs, &ys),
        }
    }

    fn component_sizes(&self) -> Vec<usize> {
        // Union-find.
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.adj[i][j] {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for i in 0..n {
            *sizes.entry(find(&mut parent, i)).or_default() += 1;
        }
        sizes.into_values().collect()
    }
}

/// Textbook Pearson over explicit paired samples.
pub fn naive_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

/// Mid-ranks: a value's rank is (#smaller) + (#equal + 1) / 2.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    x.iter()
        .map(|v| {
            let lo = sorted.partition_point(|s| s < v);
            let hi = sorted.partition_point(|s| s <= v);
            lo as f64 + (hi - lo + 1) as f64 / 2.0
        })
        .collect()
}

pub fn naive_spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    naive_pearson(&ranks(x), &ranks(y))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn opt_close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => rel_close(x, y, tol),
        _ => false,
    }
}

pub fn stats_match(a: &NetworkStats, b: &NetworkStats, tol: f64) -> bool {
    a.n_nodes == b.n_nodes
        && a.n_edges == b.n_edges
        && a.max_degree == b.max_degree
        && a.n_components == b.n_components
        && opt_close(a.mean_degree, b.mean_degree, tol)
        && opt_close(a.global_clustering, b.global_clustering, tol)
        && opt_close(a.giant_fraction, b.giant_fraction, tol)
        && opt_close(a.degree_assortativity_spearman, b.degree_assortativity_spearman, tol)
        && opt_close(a.degree_assortativity_pearson, b.degree_assortativity_pearson, tol)
}

/// Edge list (user ids) of an Erdős–Rényi graph on ids 1..=n.
pub fn erdos_renyi(r: &mut impl Rng, n: u64, mean_degree: f64) -> Vec<(u64, u64)> {
    let p = mean_degree / (n - 1) as f64;
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if r.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Ring lattice on ids 1..=n joining each node to its `k` nearest
/// successors, with a fraction `rewire` of extra random chords.
pub fn ring_lattice(r: &mut impl Rng, n: u64, k: u64, rewire: f64) -> Vec<(u64, u64)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for s in 1..=k {
            edges.push((a + 1, (a + s) % n + 1));
        }
    }
    let extra = (edges.len() as f64 * rewire) as usize;
    for _ in 0..extra {
        let (a, b) = (r.random_range(1..=n), r.random_range(1..=n));
        edges.push((a, b));
    }
    edges
}

/// Scores that vary smoothly along the graph: i.i.d. noise repeatedly
/// averaged over closed neighborhoods.
pub fn smoothed_scores(
    n: u64,
    edges: &[(u64, u64)],
    rounds: usize,
    r: &mut impl Rng,
) -> Vec<HappinessScore> {
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n as usize + 1];
    for &(a, b) in edges {
        if a != b {
            nbrs[a as usize].push(b as usize);
            nbrs[b as usize].push(a as usize);
        }
    }
    let mut h: Vec<f64> = (0..=n).map(|_| r.random_range(-1.0..1.0)).collect();
    for _ in 0..rounds {
        h = (0..=n as usize)
            .map(|u| (h[u] + nbrs[u].iter().map(|&v| h[v]).sum::<f64>()) / (1 + nbrs[u].len()) as f64)
            .collect();
    }
    (1..=n)
        .map(|u| score(u, 6.0 + h[u as usize], 100))
        .collect()
}

pub fn iid_scores(n: u64, r: &mut impl Rng) -> Vec<HappinessScore> {
    (1..=n).map(|u| score(u, r.random_range(3.0..8.0), 100)).collect()
}

pub fn score(user: u64, h: f64, words: u64) -> HappinessScore {
    HappinessScore { user_id: user, window_index: 0, h, labmt_word_count: words }
}

/// Inverse-CDF sampler built from an explicit survival table.
pub struct OracleSampler {
    pub k_min: u64,
    pub alpha: f64,
    /// survival[i] = P(K >= k_min + i)
    pub survival: Vec<f64>,
}

impl OracleSampler {
    pub fn new(alpha: f64, k_min: u64) -> Self {
        const HEAD: usize = 200_000;
        let end = k_min as f64 + HEAD as f64;
        // Tail beyond the table by the midpoint integral rule.
        let beyond = (end - 0.5).powf(1.0 - alpha) / (alpha - 1.0);
        let terms: Vec<f64> = (0..HEAD).map(|i| (k_min as f64 + i as f64).powf(-alpha)).collect();
        let mut survival = vec![0.0; HEAD + 1];
        survival[HEAD] = beyond;
        for i in (0..HEAD).rev() {
            survival[i] = survival[i + 1] + terms[i];
        }
        let z = survival[0];
        survival.iter_mut().for_each(|s| *s /= z);
        OracleSampler { k_min, alpha, survival }
    }

    pub fn draw(&self, rng: &mut impl Rng) -> u64 {
        let u: f64 = rng.random();
        // Largest i with survival[i] > u.
        let i = self.survival.partition_point(|&s| s > u);
        if i < self.survival.len() {
            return self.k_min + i as u64 - 1;
        }
        let last = self.survival.len() as f64 - 1.0 + self.k_min as f64 - 0.5;
        let ratio = u / self.survival[self.survival.len() - 1];
        (last * ratio.powf(-1.0 / (self.alpha - 1.0)) + 0.5) as u64
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}
