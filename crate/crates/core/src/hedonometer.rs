//! Lexicon-based happiness scoring of per-user word collections.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::ReplyGraph;
use crate::lexicon::{for_each_token, FilteredLexicon};
use crate::rng::replica_rng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HedonometerError {
    #[error("word bag is empty")]
    EmptyBag,
    #[error("no edge joins two users that both hold a word bag")]
    NoQualifyingEdges,
    #[error("permutation count must be at least 1")]
    ZeroPermutations,
}

/// Frequencies of lexicon words, keyed by the word's index in a
/// [`FilteredLexicon`] and kept sorted by index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordCounts {
    counts: Vec<(u32, u64)>,
    total: u64,
}

impl WordCounts {
    pub fn from_map(map: HashMap<u32, u64>) -> WordCounts {
        let mut counts: Vec<(u32, u64)> = map.into_iter().filter(|&(_, c)| c > 0).collect();
        counts.sort_unstable();
        let total = counts.iter().map(|&(_, c)| c).sum();
        WordCounts { counts, total }
    }

    /// Counts the lexicon words in `text`.
    pub fn from_text(text: &str, lex: &FilteredLexicon) -> WordCounts {
        let mut map = HashMap::new();
        count_into(&mut map, text, lex);
        Self::from_map(map)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, word: u32) -> u64 {
        self.counts
            .binary_search_by_key(&word, |&(w, _)| w)
            .map_or(0, |i| self.counts[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().copied()
    }

    /// Adds `other` into `self`.
    pub fn merge(&mut self, other: &WordCounts) {
        let mut out = Vec::with_capacity(self.counts.len() + other.counts.len());
        let (a, b) = (&self.counts, &other.counts);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&(wa, ca)), Some(&(wb, cb))) if wa == wb => {
                    out.push((wa, ca + cb));
                    i += 1;
                    j += 1;
                }
                (Some(&x), Some(&(wb, _))) if x.0 < wb => {
                    out.push(x);
                    i += 1;
                }
                (Some(_), Some(&y)) | (None, Some(&y)) => {
                    out.push(y);
                    j += 1;
                }
                (Some(&x), None) => {
                    out.push(x);
                    i += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        self.counts = out;
        self.total += other.total;
    }

    /// Sum of several bags.
    pub fn aggregate<'a, I: IntoIterator<Item = &'a WordCounts>>(bags: I) -> WordCounts {
        let mut map: HashMap<u32, u64> = HashMap::new();
        for b in bags {
            for (w, c) in b.iter() {
                *map.entry(w).or_default() += c;
            }
        }
        Self::from_map(map)
    }

    /// Keeps only words with `keep(word)`.
    pub fn retain<F: FnMut(u32) -> bool>(&mut self, mut keep: F) {
        self.counts.retain(|&(w, _)| keep(w));
        self.total = self.counts.iter().map(|&(_, c)| c).sum();
    }
}

fn count_into(map: &mut HashMap<u32, u64>, text: &str, lex: &FilteredLexicon) {
    for_each_token(text, |tok| {
        if let Some(i) = lex.lookup(tok) {
            *map.entry(i).or_default() += 1;
        }
    });
}

/// One user's lexicon-word frequencies within one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordBag {
    pub user_id: u64,
    pub window_index: u32,
    pub counts: WordCounts,
}

/// Builds one bag per user from every text that user authored in the
/// window. Users without a single lexicon match get no bag. Output is
/// sorted by user id.
pub fn build_word_bags<I, S>(texts: I, lex: &FilteredLexicon, window_index: u32) -> Vec<WordBag>
where
    I: IntoIterator<Item = (u64, S)>,
    S: AsRef<str>,
{
    let mut per_user: HashMap<u64, HashMap<u32, u64>> = HashMap::new();
    for (user, text) in texts {
        count_into(per_user.entry(user).or_default(), text.as_ref(), lex);
    }
    let mut bags: Vec<WordBag> = per_user
        .into_iter()
        .map(|(user_id, map)| WordBag {
            user_id,
            window_index,
            counts: WordCounts::from_map(map),
        })
        .filter(|b| !b.counts.is_empty())
        .collect();
    bags.sort_unstable_by_key(|b| b.user_id);
    bags
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HappinessScore {
    pub user_id: u64,
    pub window_index: u32,
    pub h: f64,
    pub labmt_word_count: u64,
}

/// Frequency-weighted mean word happiness, or `None` for an empty bag.
pub fn average_happiness(counts: &WordCounts, lex: &FilteredLexicon) -> Option<f64> {
    if counts.is_empty() {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut weighted = 0.0;
    for (w, f) in counts.iter() {
        let h = lex.score(w);
        lo = lo.min(h);
        hi = hi.max(h);
        weighted += h * f as f64;
    }
    if counts.len() == 1 {
        return Some(lo);
    }
    Some((weighted / counts.total() as f64).clamp(lo, hi))
}

pub fn happiness(bag: &WordBag, lex: &FilteredLexicon) -> Option<HappinessScore> {
    average_happiness(&bag.counts, lex).map(|h| HappinessScore {
        user_id: bag.user_id,
        window_index: bag.window_index,
        h,
        labmt_word_count: bag.counts.total(),
    })
}

pub fn score_bags(bags: &[WordBag], lex: &FilteredLexicon) -> Vec<HappinessScore> {
    bags.par_iter().filter_map(|b| happiness(b, lex)).collect()
}

/// `user_id<TAB>window_index<TAB>h<TAB>labmt_word_count` lines.
pub fn write_scores<W: Write>(mut w: W, scores: &[HappinessScore]) -> io::Result<()> {
    for s in scores {
        writeln!(w, "{}\t{}\t{}\t{}", s.user_id, s.window_index, s.h, s.labmt_word_count)?;
    }
    Ok(())
}

pub fn read_scores<R: BufRead>(r: R) -> io::Result<Vec<HappinessScore>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || io::Error::new(io::ErrorKind::InvalidData, format!("scores: bad line {}", i + 1));
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(bad());
        }
        out.push(HappinessScore {
            user_id: cols[0].parse().map_err(|_| bad())?,
            window_index: cols[1].parse().map_err(|_| bad())?,
            h: cols[2].parse().map_err(|_| bad())?,
            labmt_word_count: cols[3].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

/// Direction of a word's effect: whether it is happier than the reference
/// average (`pos`/`neg`) and whether it is used more in the comparison text
/// (`up`/`down`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    PosUp,
    PosDown,
    NegUp,
    NegDown,
}

impl SignClass {
    fn of(h_diff: f64, p_diff: f64) -> SignClass {
        match (h_diff > 0.0, p_diff > 0.0) {
            (true, true) => SignClass::PosUp,
            (true, false) => SignClass::PosDown,
            (false, true) => SignClass::NegUp,
            (false, false) => SignClass::NegDown,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SignClass::PosUp => "+\u{2191}",
            SignClass::PosDown => "+\u{2193}",
            SignClass::NegUp => "-\u{2191}",
            SignClass::NegDown => "-\u{2193}",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordShiftEntry {
    pub word: String,
    pub h_avg: f64,
    pub p_ref: f64,
    pub p_comp: f64,
    pub contribution: f64,
    pub sign_class: SignClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordShift {
    pub h_ref: f64,
    pub h_comp: f64,
    pub ref_total: u64,
    pub comp_total: u64,
    /// Sorted by |contribution|, largest first.
    pub entries: Vec<WordShiftEntry>,
}

/// Aggregate figures for a word-shift plot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordShiftSummary {
    pub h_ref: f64,
    pub h_comp: f64,
    pub shift: f64,
    pub ref_words: u64,
    pub comp_words: u64,
    /// Probability mass of words happier / sadder than `h_ref`.
    pub ref_positive_mass: f64,
    pub ref_negative_mass: f64,
    pub comp_positive_mass: f64,
    pub comp_negative_mass: f64,
    /// Running sum of contributions in rank order.
    pub cumulative: Vec<f64>,
}

impl WordShift {
    /// Contribution as a percentage of |h_comp - h_ref|.
    pub fn percent(&self, entry: &WordShiftEntry) -> Option<f64> {
        let d = (self.h_comp - self.h_ref).abs();
        (d > 0.0).then(|| 100.0 * entry.contribution / d)
    }

    pub fn summary(&self) -> WordShiftSummary {
        let mut s = WordShiftSummary {
            h_ref: self.h_ref,
            h_comp: self.h_comp,
            shift: self.h_comp - self.h_ref,
            ref_words: self.ref_total,
            comp_words: self.comp_total,
            ref_positive_mass: 0.0,
            ref_negative_mass: 0.0,
            comp_positive_mass: 0.0,
            comp_negative_mass: 0.0,
            cumulative: Vec::with_capacity(self.entries.len()),
        };
        let mut run = 0.0;
        for e in &self.entries {
            if e.h_avg > self.h_ref {
                s.ref_positive_mass += e.p_ref;
                s.comp_positive_mass += e.p_comp;
            } else if e.h_avg < self.h_ref {
                s.ref_negative_mass += e.p_ref;
                s.comp_negative_mass += e.p_comp;
            }
            run += e.contribution;
            s.cumulative.push(run);
        }
        s
    }
}

/// Per-word decomposition of `h(comp) - h(ref)`:
/// `(h_avg(w) - h(ref)) * (p_comp(w) - p_ref(w))`. The contributions sum to
/// the score difference.
pub fn word_shift(
    reference: &WordCounts,
    comparison: &WordCounts,
    lex: &FilteredLexicon,
) -> Result<WordShift, HedonometerError> {
    let h_ref = average_happiness(reference, lex).ok_or(HedonometerError::EmptyBag)?;
    let h_comp = average_happiness(comparison, lex).ok_or(HedonometerError::EmptyBag)?;
    let (nr, nc) = (reference.total() as f64, comparison.total() as f64);
    let mut words: Vec<u32> = reference.iter().chain(comparison.iter()).map(|(w, _)| w).collect();
    words.sort_unstable();
    words.dedup();
    let mut entries: Vec<(u32, WordShiftEntry)> = words
        .into_iter()
        .map(|w| {
            let h = lex.score(w);
            let p_ref = reference.get(w) as f64 / nr;
            let p_comp = comparison.get(w) as f64 / nc;
            let entry = WordShiftEntry {
                word: lex.word(w).to_owned(),
                h_avg: h,
                p_ref,
                p_comp,
                contribution: (h - h_ref) * (p_comp - p_ref),
                sign_class: SignClass::of(h - h_ref, p_comp - p_ref),
            };
            (w, entry)
        })
        .collect();
    entries.sort_by(|(wa, a), (wb, b)| {
        b.contribution
            .abs()
            .total_cmp(&a.contribution.abs())
            .then(wa.cmp(wb))
    });
    Ok(WordShift {
        h_ref,
        h_comp,
        ref_total: reference.total(),
        comp_total: comparison.total(),
        entries: entries.into_iter().map(|(_, e)| e).collect(),
    })
}

/// `1 - ½ Σ |p_a(w) - p_b(w)|` over the lexicon. Words absent from both
/// bags contribute nothing, so only the union of supports is visited.
pub fn bag_similarity(a: &WordCounts, b: &WordCounts) -> Result<f64, HedonometerError> {
    if a.is_empty() || b.is_empty() {
        return Err(HedonometerError::EmptyBag);
    }
    let (na, nb) = (a.total() as f64, b.total() as f64);
    let (x, y) = (&a.counts, &b.counts);
    let (mut i, mut j) = (0, 0);
    let mut l1 = 0.0;
    while i < x.len() || j < y.len() {
        match (x.get(i), y.get(j)) {
            (Some(&(wa, ca)), Some(&(wb, cb))) if wa == wb => {
                l1 += (ca as f64 / na - cb as f64 / nb).abs();
                i += 1;
                j += 1;
            }
            (Some(&(wa, ca)), Some(&(wb, _))) if wa < wb => {
                l1 += ca as f64 / na;
                i += 1;
            }
            (Some(&(_, ca)), None) => {
                l1 += ca as f64 / na;
                i += 1;
            }
            (_, Some(&(_, cb))) => {
                l1 += cb as f64 / nb;
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok((1.0 - 0.5 * l1).clamp(0.0, 1.0))
}

/// Observed mean neighbor similarity against bag-shuffled replicas.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityNull {
    pub n_edges: u64,
    pub n_users: u64,
    pub observed_mean: f64,
    pub null_means: Vec<f64>,
    pub null_mean: f64,
    pub null_std: f64,
    /// Counts of observed similarities in 20 equal bins over [0, 1].
    pub observed_histogram: Vec<u64>,
    /// Same, pooled over all replicas.
    pub null_histogram: Vec<u64>,
    pub seed: u64,
}

const SIMILARITY_BINS: usize = 20;

fn similarity_bin(d: f64) -> usize {
    ((d * SIMILARITY_BINS as f64) as usize).min(SIMILARITY_BINS - 1)
}

/// Compares word-bag similarity across network edges with the same
/// statistic after randomly reassigning bags among the bag-holding users.
/// Only edges whose endpoints both hold a bag with at least `min_words`
/// words take part; topology is never changed.
pub fn similarity_null(
    g: &ReplyGraph,
    bags: &[WordBag],
    min_words: u64,
    n_perm: usize,
    seed: u64,
) -> Result<SimilarityNull, HedonometerError> {
    if n_perm == 0 {
        return Err(HedonometerError::ZeroPermutations);
    }
    let mut slot = vec![u32::MAX; g.n_nodes()];
    let mut holders = Vec::new();
    for (i, b) in bags.iter().enumerate() {
        if b.counts.total() >= min_words.max(1) {
            if let Some(node) = g.node_of(b.user_id) {
                slot[node as usize] = i as u32;
                holders.push(node);
            }
        }
    }
    let edges: Vec<(u32, u32)> = g
        .edges()
        .filter(|&(u, v)| slot[u as usize] != u32::MAX && slot[v as usize] != u32::MAX)
        .collect();
    if edges.is_empty() {
        return Err(HedonometerError::NoQualifyingEdges);
    }

    let pass = |assign: &[u32]| -> (f64, Vec<u64>) {
        let mut hist = vec![0u64; SIMILARITY_BINS];
        let mut sum = 0.0;
        for &(u, v) in &edges {
            let a = &bags[assign[u as usize] as usize].counts;
            let b = &bags[assign[v as usize] as usize].counts;
            let d = bag_similarity(a, b).expect("qualifying bags are nonempty");
            sum += d;
            hist[similarity_bin(d)] += 1;
        }
        (sum / edges.len() as f64, hist)
    };

    let (observed_mean, observed_histogram) = pass(&slot);
    let replicas: Vec<(f64, Vec<u64>)> = (0..n_perm as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let mut pool: Vec<u32> = holders.iter().map(|&n| slot[n as usize]).collect();
            pool.shuffle(&mut rng);
            let mut assign = slot.clone();
            for (&node, &bag) in holders.iter().zip(&pool) {
                assign[node as usize] = bag;
            }
            pass(&assign)
        })
        .collect();
    let mut null_histogram = vec![0u64; SIMILARITY_BINS];
    let mut null_means = Vec::with_capacity(n_perm);
    for (m, h) in replicas {
        null_means.push(m);
        for (acc, c) in null_histogram.iter_mut().zip(h) {
            *acc += c;
        }
    }
    let (null_mean, null_std) = crate::stats::mean_std(&null_means).expect("n_perm >= 1");
    Ok(SimilarityNull {
        n_edges: edges.len() as u64,
        n_users: holders.len() as u64,
        observed_mean,
        null_means,
        null_mean,
        null_std,
        observed_histogram,
        null_histogram,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{filter_stop_words, Lexicon, LexiconEntry};

    fn lex() -> FilteredLexicon {
        let rows = [
            ("vacation", 7.92),
            ("starts", 5.96),
            ("today", 6.22),
            ("love", 8.42),
            ("sad", 2.38),
            ("you", 6.24),
            ("last", 3.74),
        ];
        let l = Lexicon::from_entries(rows.iter().map(|(w, h)| LexiconEntry {
            word: (*w).into(),
            h_avg: *h,
            h_std: None,
        }))
        .unwrap();
        filter_stop_words(&l, 1.0)
    }

    fn counts(lex: &FilteredLexicon, words: &[(&str, u64)]) -> WordCounts {
        WordCounts::from_map(words.iter().map(|(w, c)| (lex.lookup(w).unwrap(), *c)).collect())
    }

    #[test]
    fn vacation_sentence() {
        let lex = lex();
        let bags = build_word_bags([(9u64, "Vacation starts today, yeahhhhh!")], &lex, 0);
        assert_eq!(bags.len(), 1);
        assert_eq!(bags[0].counts.total(), 2);
        assert_eq!(bags[0].counts.get(lex.lookup("vacation").unwrap()), 1);
        assert_eq!(bags[0].counts.get(lex.lookup("today").unwrap()), 1);
        let s = happiness(&bags[0], &lex).unwrap();
        assert!((s.h - 7.07).abs() < 1e-12, "{}", s.h);
    }

    #[test]
    fn no_matches_no_bag() {
        let lex = lex();
        assert!(build_word_bags([(1u64, "yeahhhhh starts")], &lex, 0).is_empty());
    }

    #[test]
    fn singleton_and_weighted() {
        let lex = lex();
        assert_eq!(average_happiness(&counts(&lex, &[("love", 5)]), &lex), Some(8.42));
        let h = average_happiness(&counts(&lex, &[("love", 3), ("sad", 1)]), &lex).unwrap();
        assert!((h - (3.0 * 8.42 + 2.38) / 4.0).abs() < 1e-12);
        assert!((h - 6.91).abs() < 1e-12);
        assert_eq!(average_happiness(&WordCounts::default(), &lex), None);
    }

    #[test]
    fn messages_concatenate() {
        let lex = lex();
        let split = build_word_bags([(1u64, "love you"), (1, "sad today love")], &lex, 0);
        let joined = build_word_bags([(1u64, "love you sad today love")], &lex, 0);
        assert_eq!(split, joined);
    }

    #[test]
    fn merge_matches_aggregate() {
        let lex = lex();
        let a = counts(&lex, &[("love", 2), ("sad", 1)]);
        let b = counts(&lex, &[("sad", 4), ("you", 1)]);
        let mut m = a.clone();
        m.merge(&b);
        assert_eq!(m, WordCounts::aggregate([&a, &b]));
        assert_eq!(m.total(), 8);
    }

    #[test]
    fn identical_texts_shift_nothing() {
        let lex = lex();
        let a = counts(&lex, &[("love", 2), ("sad", 1)]);
        let ws = word_shift(&a, &a, &lex).unwrap();
        assert!(ws.entries.iter().all(|e| e.contribution == 0.0));
    }

    #[test]
    fn more_positive_word_is_pos_up() {
        let lex = lex();
        let r = counts(&lex, &[("you", 1), ("last", 3)]);
        let c = counts(&lex, &[("you", 3), ("last", 1)]);
        let ws = word_shift(&r, &c, &lex).unwrap();
        let you = ws.entries.iter().find(|e| e.word == "you").unwrap();
        assert_eq!(you.sign_class, SignClass::PosUp);
        assert!(you.contribution > 0.0);
        let last = ws.entries.iter().find(|e| e.word == "last").unwrap();
        assert_eq!(last.sign_class, SignClass::NegDown);
        assert!(last.contribution > 0.0);
        let total: f64 = ws.entries.iter().map(|e| e.contribution).sum();
        assert!((total - (ws.h_comp - ws.h_ref)).abs() < 1e-12);
        let s = ws.summary();
        assert!((s.cumulative.last().unwrap() - s.shift).abs() < 1e-12);
        assert!(word_shift(&WordCounts::default(), &c, &lex).is_err());
    }

    #[test]
    fn similarity_examples() {
        let lex = lex();
        let a = counts(&lex, &[("love", 1)]);
        let b = counts(&lex, &[("love", 1), ("sad", 1)]);
        let c = counts(&lex, &[("you", 7)]);
        assert_eq!(bag_similarity(&a, &a).unwrap(), 1.0);
        assert!((bag_similarity(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        assert!(bag_similarity(&a, &c).unwrap().abs() < 1e-15);
        assert_eq!(bag_similarity(&a, &WordCounts::default()), Err(HedonometerError::EmptyBag));
    }

    #[test]
    fn shared_bag_null_is_one() {
        let lex = lex();
        let g = ReplyGraph::from_edges([(1, 2), (2, 3), (3, 4)]);
        let bags: Vec<WordBag> = (1..=4)
            .map(|u| WordBag {
                user_id: u,
                window_index: 0,
                counts: counts(&lex, &[("love", 2), ("sad", 1)]),
            })
            .collect();
        let r = similarity_null(&g, &bags, 1, 5, 11).unwrap();
        assert_eq!(r.observed_mean, 1.0);
        assert!(r.null_means.iter().all(|&m| m == 1.0));
        assert_eq!(r.n_edges, 3);
        let again = similarity_null(&g, &bags, 1, 5, 11).unwrap();
        assert_eq!(r, again);
        assert_eq!(similarity_null(&g, &bags, 1, 0, 11), Err(HedonometerError::ZeroPermutations));
        assert_eq!(
            similarity_null(&g, &bags, 100, 1, 11),
            Err(HedonometerError::NoQualifyingEdges)
        );
    }
}
