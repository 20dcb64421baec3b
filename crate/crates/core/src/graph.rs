//! Reciprocal-reply networks and their topology.
//!
//! A [`ReplyGraph`] is an undirected simple graph in compressed sparse row
//! form. Nodes are dense `u32` indices assigned in ascending user-id order;
//! adjacency lists are sorted.

use std::collections::VecDeque;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::ReplyEvent;
use crate::stats;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("input is empty")]
    EmptyInput,
    #[error("hop distance {0} not in 1..=3")]
    BadDistance(u8),
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Largest hop distance the pair enumeration supports.
pub const MAX_DISTANCE: u8 = 3;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReplyGraph {
    ids: Vec<u64>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
}

impl ReplyGraph {
    /// Builds a simple graph from user-id pairs. Self-loops are dropped and
    /// parallel edges collapse. Only users with at least one edge become
    /// nodes.
    pub fn from_edges<I>(edges: I) -> ReplyGraph
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut pairs: Vec<(u64, u64)> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();

        let mut ids: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        ids.sort_unstable();
        ids.dedup();
        let idx = |u: u64| ids.binary_search(&u).expect("endpoint present") as u32;

        let mut degree = vec![0usize; ids.len()];
        let indexed: Vec<(u32, u32)> = pairs.iter().map(|&(a, b)| (idx(a), idx(b))).collect();
        for &(a, b) in &indexed {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(ids.len() + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..ids.len()].to_vec();
        let mut adj = vec![0u32; offsets[ids.len()]];
        for &(a, b) in &indexed {
            adj[fill[a as usize]] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for u in 0..ids.len() {
            adj[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        ReplyGraph { ids, offsets, adj }
    }

    pub fn n_nodes(&self) -> usize {
        self.ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// User ids, ascending; position = node index.
    pub fn user_ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn user_id(&self, node: u32) -> u64 {
        self.ids[node as usize]
    }

    pub fn node_of(&self, user: u64) -> Option<u32> {
        self.ids.binary_search(&user).ok().map(|i| i as u32)
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        let u = node as usize;
        &self.adj[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, node: u32) -> usize {
        let u = node as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.offsets.windows(2).map(|w| (w[1] - w[0]) as u64).collect()
    }

    /// Edges as node-index pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n_nodes() as u32).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    /// Edges as user-id pairs with the smaller id first.
    pub fn user_edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.edges().map(|(u, v)| (self.user_id(u), self.user_id(v)))
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }
}

/// Links two users iff each replied to the other at least once. Self-replies
/// are ignored.
pub fn build_reciprocal<'a, I>(events: I) -> ReplyGraph
where
    I: IntoIterator<Item = &'a ReplyEvent>,
{
    let mut directed: Vec<(u64, u64)> = events
        .into_iter()
        .filter(|e| e.from_user != e.to_user)
        .map(|e| (e.from_user, e.to_user))
        .collect();
    directed.sort_unstable();
    directed.dedup();
    let reciprocal: Vec<(u64, u64)> = directed
        .iter()
        .filter(|&&(a, b)| a < b && directed.binary_search(&(b, a)).is_ok())
        .copied()
        .collect();
    ReplyGraph::from_edges(reciprocal)
}

/// Topological summary of one window's network. Undefined quantities are
/// `None` (serialized as `null`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub n_nodes: u64,
    pub n_edges: u64,
    pub mean_degree: Option<f64>,
    pub max_degree: u64,
    pub global_clustering: Option<f64>,
    pub n_components: u64,
    pub giant_fraction: Option<f64>,
    pub degree_assortativity_spearman: Option<f64>,
    pub degree_assortativity_pearson: Option<f64>,
}

/// Number of triangles, each counted once.
pub fn count_triangles(g: &ReplyGraph) -> u64 {
    (0..g.n_nodes() as u32)
        .into_par_iter()
        .map(|u| {
            let nu = g.neighbors(u);
            let above_u = &nu[nu.partition_point(|&x| x <= u)..];
            let mut t = 0u64;
            for (i, &v) in above_u.iter().enumerate() {
                let a = &above_u[i + 1..];
                let nv = g.neighbors(v);
                let b = &nv[nv.partition_point(|&x| x <= v)..];
                t += sorted_intersection_len(a, b);
            }
            t
        })
        .sum()
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Paths of length two, counted once per center node.
pub fn count_connected_triples(g: &ReplyGraph) -> u64 {
    g.degrees().iter().map(|&k| k * k.saturating_sub(1) / 2).sum()
}

/// Component label per node plus component sizes.
pub fn connected_components(g: &ReplyGraph) -> (Vec<u32>, Vec<usize>) {
    let n = g.n_nodes();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n as u32 {
        if label[s as usize] != u32::MAX {
            continue;
        }
        let c = sizes.len() as u32;
        label[s as usize] = c;
        queue.push_back(s);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if label[v as usize] == u32::MAX {
                    label[v as usize] = c;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}

pub fn compute_stats(g: &ReplyGraph) -> NetworkStats {
    let n = g.n_nodes();
    let m = g.n_edges();
    let degrees = g.degrees();
    let triples = count_connected_triples(g);
    let clustering = (triples > 0).then(|| 3.0 * count_triangles(g) as f64 / triples as f64);
    let (_, sizes) = connected_components(g);
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let deg_f: Vec<f64> = degrees.iter().map(|&k| k as f64).collect();
    NetworkStats {
        n_nodes: n as u64,
        n_edges: m as u64,
        mean_degree: (n > 0).then(|| 2.0 * m as f64 / n as f64),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        global_clustering: clustering,
        n_components: sizes.len() as u64,
        giant_fraction: (n > 0).then(|| largest as f64 / n as f64),
        degree_assortativity_spearman: stats::symmetric_spearman(&deg_f, &edges),
        degree_assortativity_pearson: stats::symmetric_pearson(&deg_f, &edges),
    }
}

/// Depth-limited BFS with reusable scratch space, O(N) memory.
pub struct DistanceScanner {
    dist: Vec<u8>,
    touched: Vec<u32>,
    frontier: Vec<u32>,
    next: Vec<u32>,
}

impl DistanceScanner {
    pub fn new(n_nodes: usize) -> Self {
        DistanceScanner {
            dist: vec![u8::MAX; n_nodes],
            touched: Vec::new(),
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    /// Calls `visit(node, distance)` for every node at distance
    /// `1..=max_d` from `source`, in BFS order.
    pub fn scan<F: FnMut(u32, u8)>(&mut self, g: &ReplyGraph, source: u32, max_d: u8, mut visit: F) {
        self.dist[source as usize] = 0;
        self.touched.push(source);
        self.frontier.clear();
        self.frontier.push(source);
        for d in 1..=max_d {
            self.next.clear();
            for &u in &self.frontier {
                for &v in g.neighbors(u) {
                    if self.dist[v as usize] == u8::MAX {
                        self.dist[v as usize] = d;
                        self.touched.push(v);
                        self.next.push(v);
                        visit(v, d);
                    }
                }
            }
            if self.next.is_empty() {
                break;
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        for &t in &self.touched {
            self.dist[t as usize] = u8::MAX;
        }
        self.touched.clear();
    }
}

/// Unordered node pairs grouped by exact shortest-path length.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairsByDistance {
    /// `by_distance[d - 1]` holds the pairs at distance `d`, each as `(u, v)`
    /// with `u < v`.
    pub by_distance: Vec<Vec<(u32, u32)>>,
}

impl PairsByDistance {
    pub fn at(&self, d: u8) -> &[(u32, u32)] {
        &self.by_distance[usize::from(d) - 1]
    }
}

const SOURCE_CHUNK: usize = 256;

/// Enumerates every unordered pair at exact distance `1..=max_d` whose two
/// endpoints satisfy `keep`. Sources are processed in parallel in fixed
/// chunks and concatenated in order, so the output does not depend on the
/// thread count.
pub fn pairs_by_distance<K>(g: &ReplyGraph, max_d: u8, keep: K) -> Result<PairsByDistance, GraphError>
where
    K: Fn(u32) -> bool + Sync,
{
    if !(1..=MAX_DISTANCE).contains(&max_d) {
        return Err(GraphError::BadDistance(max_d));
    }
    let n = g.n_nodes();
    let sources: Vec<u32> = (0..n as u32).filter(|&u| keep(u)).collect();
    let chunks: Vec<Vec<Vec<(u32, u32)>>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map_init(
            || DistanceScanner::new(n),
            |scanner, chunk| {
                let mut out = vec![Vec::new(); usize::from(max_d)];
                for &s in chunk {
                    scanner.scan(g, s, max_d, |v, d| {
                        if v > s && keep(v) {
                            out[usize::from(d) - 1].push((s, v));
                        }
                    });
                }
                out
            },
        )
        .collect();
    let mut by_distance = vec![Vec::new(); usize::from(max_d)];
    for chunk in chunks {
        for (dst, src) in by_distance.iter_mut().zip(chunk) {
            dst.extend(src);
        }
    }
    Ok(PairsByDistance { by_distance })
}

/// All unordered pairs `{u, v}` (as `u < v`) at shortest-path distance
/// exactly `d`.
pub fn exact_distance_pairs(g: &ReplyGraph, d: u8) -> Result<Vec<(u32, u32)>, GraphError> {
    let mut all = pairs_by_distance(g, d, |_| true)?;
    Ok(all.by_distance.swap_remove(usize::from(d) - 1))
}

/// Streams the pairs at distance exactly `d` from each source in turn,
/// without materializing them.
pub fn for_each_exact_distance_pair<F>(g: &ReplyGraph, d: u8, mut emit: F) -> Result<(), GraphError>
where
    F: FnMut(u32, u32),
{
    if !(1..=MAX_DISTANCE).contains(&d) {
        return Err(GraphError::BadDistance(d));
    }
    let mut scanner = DistanceScanner::new(g.n_nodes());
    for s in 0..g.n_nodes() as u32 {
        scanner.scan(g, s, d, |v, dist| {
            if dist == d && v > s {
                emit(s, v);
            }
        });
    }
    Ok(())
}

/// Empirical complementary CDF: `(k, P(K >= k))` for each distinct value.
pub fn ccdf(values: &[u64]) -> Result<Vec<(u64, f64)>, GraphError> {
    if values.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let k = sorted[i];
        out.push((k, (sorted.len() - i) as f64 / n));
        while i < sorted.len() && sorted[i] == k {
            i += 1;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    EdgeCsv,
    Gexf,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "edge_csv" | "csv" => Ok(ExportFormat::EdgeCsv),
            "gexf" => Ok(ExportFormat::Gexf),
            other => Err(format!("unknown export format `{other}`")),
        }
    }
}

pub fn export_graph<W: Write>(w: W, g: &ReplyGraph, format: ExportFormat) -> io::Result<()> {
    match format {
        ExportFormat::EdgeCsv => write_edge_csv(w, g),
        ExportFormat::Gexf => write_gexf(w, g),
    }
}

/// `source,target` header followed by one line per edge.
pub fn write_edge_csv<W: Write>(mut w: W, g: &ReplyGraph) -> io::Result<()> {
    writeln!(w, "source,target")?;
    for (a, b) in g.user_edges() {
        writeln!(w, "{a},{b}")?;
    }
    Ok(())
}

pub fn read_edge_csv<R: BufRead>(r: R) -> Result<ReplyGraph, GraphError> {
    let mut edges = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.eq_ignore_ascii_case("source,target")) {
            continue;
        }
        let parse = |s: Option<&str>| s.and_then(|s| s.trim().parse::<u64>().ok());
        let mut it = line.split(',');
        match (parse(it.next()), parse(it.next()), it.next()) {
            (Some(a), Some(b), None) => edges.push((a, b)),
            _ => {
                return Err(GraphError::Parse {
                    line: i + 1,
                    message: format!("expected `source,target`, got `{line}`"),
                })
            }
        }
    }
    Ok(ReplyGraph::from_edges(edges))
}

/// Minimal GEXF 1.2 document: nodes and undirected edges, no layout.
pub fn write_gexf<W: Write>(mut w: W, g: &ReplyGraph) -> io::Result<()> {
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(w, r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">"#)?;
    writeln!(w, r#"  <graph mode="static" defaultedgetype="undirected">"#)?;
    writeln!(w, "    <nodes>")?;
    for id in g.user_ids() {
        writeln!(w, r#"      <node id="{id}" label="{id}"/>"#)?;
    }
    writeln!(w, "    </nodes>")?;
    writeln!(w, "    <edges>")?;
    for (i, (a, b)) in g.user_edges().enumerate() {
        writeln!(w, r#"      <edge id="{i}" source="{a}" target="{b}"/>"#)?;
    }
    writeln!(w, "    </edges>")?;
    writeln!(w, "  </graph>")?;
    writeln!(w, "</gexf>")
}
