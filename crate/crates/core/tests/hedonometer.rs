mod common;

use std::collections::HashMap;

use common::*;
use hedonet::graph::ReplyGraph;
use hedonet::hedonometer::*;
use hedonet::lexicon::{filter_stop_words, load_lexicon, FilteredLexicon};
use proptest::prelude::*;
use rand::Rng;

fn lexicon(delta_h: f64) -> FilteredLexicon {
    let raw = include_str!("data/labmt_subset.tsv");
    filter_stop_words(&load_lexicon(raw.as_bytes()).unwrap(), delta_h)
}

fn random_bag(r: &mut impl Rng, lex: &FilteredLexicon, max_words: u32) -> WordCounts {
    let mut m = HashMap::new();
    let n = r.random_range(1..=max_words);
    for _ in 0..n {
        *m.entry(r.random_range(0..lex.len() as u32)).or_insert(0u64) += r.random_range(1..5);
    }
    WordCounts::from_map(m)
}

/// Frequency-weighted mean written out directly.
fn oracle_h(bag: &WordCounts, lex: &FilteredLexicon) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (w, f) in bag.iter() {
        num += lex.score(w) * f as f64;
        den += f as f64;
    }
    num / den
}

#[test]
fn vacation_sentence() {
    let lex = lexicon(1.0);
    let bag = WordCounts::from_text("Vacation starts today, yeahhhhh!", &lex);
    assert_eq!(bag.total(), 2);
    let h = average_happiness(&bag, &lex).unwrap();
    assert!((h - 7.07).abs() < 0.005, "{h}");
}

#[test]
fn scores_match_weighted_mean() {
    let lex = lexicon(1.0);
    let mut r = rng(1);
    for _ in 0..500 {
        let bag = random_bag(&mut r, &lex, 30);
        let h = average_happiness(&bag, &lex).unwrap();
        assert!(rel_close(h, oracle_h(&bag, &lex), 1e-12));
    }
}

#[test]
fn word_shift_identity_and_signs() {
    let lex = lexicon(1.0);
    let mut r = rng(2);
    for _ in 0..300 {
        let (a, b) = (random_bag(&mut r, &lex, 40), random_bag(&mut r, &lex, 40));
        let ws = word_shift(&a, &b, &lex).unwrap();
        let sum: f64 = ws.entries.iter().map(|e| e.contribution).sum();
        let diff = oracle_h(&b, &lex) - oracle_h(&a, &lex);
        assert!((sum - diff).abs() <= 1e-10 * diff.abs().max(1e-3), "{sum} {diff}");
        for e in &ws.entries {
            let dh = e.h_avg - ws.h_ref;
            let dp = e.p_comp - e.p_ref;
            let expect = match (dh > 0.0, dp > 0.0) {
                (true, true) => SignClass::PosUp,
                (true, false) => SignClass::PosDown,
                (false, true) => SignClass::NegUp,
                (false, false) => SignClass::NegDown,
            };
            assert_eq!(e.sign_class, expect);
            assert!(rel_close(e.contribution, dh * dp, 1e-12));
        }
        let s = ws.summary();
        assert!(rel_close(*s.cumulative.last().unwrap(), sum, 1e-12));
    }
}

#[test]
fn similarity_matches_full_vector_form() {
    let lex = lexicon(1.0);
    let mut r = rng(3);
    for _ in 0..300 {
        let (a, b) = (random_bag(&mut r, &lex, 20), random_bag(&mut r, &lex, 20));
        let l1: f64 = (0..lex.len() as u32)
            .map(|w| (a.get(w) as f64 / a.total() as f64 - b.get(w) as f64 / b.total() as f64).abs())
            .sum();
        let d = bag_similarity(&a, &b).unwrap();
        assert!((d - (1.0 - 0.5 * l1)).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&d));
        assert_eq!(d, bag_similarity(&b, &a).unwrap());
    }
    let a = random_bag(&mut r, &lex, 10);
    assert!((bag_similarity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(bag_similarity(&a, &WordCounts::default()), Err(HedonometerError::EmptyBag));
}

/// Neighbours draw from a shared topic vocabulary; permuting the bags
/// breaks that alignment.
#[test]
fn similarity_exceeds_permuted_null_on_shared_vocabulary() {
    let lex = lexicon(1.0);
    let mut r = rng(4);
    let n_topics = 8u64;
    let per_topic = 30u64;
    let mut edges = Vec::new();
    let mut bags = Vec::new();
    for t in 0..n_topics {
        let vocab: Vec<u32> = (0..10).map(|_| r.random_range(0..lex.len() as u32)).collect();
        for i in 0..per_topic {
            let user = t * per_topic + i + 1;
            if i > 0 {
                edges.push((user - 1, user));
            }
            let mut m = HashMap::new();
            for _ in 0..15 {
                *m.entry(vocab[r.random_range(0..vocab.len())]).or_insert(0u64) += 1;
            }
            bags.push(WordBag { user_id: user, window_index: 0, counts: WordCounts::from_map(m) });
        }
    }
    let g = ReplyGraph::from_edges(edges);
    let res = similarity_null(&g, &bags, 1, 50, 9).unwrap();
    assert!(res.observed_mean > res.null_mean + 3.0 * res.null_std, "{res:?}");
    assert_eq!(res.observed_histogram.iter().sum::<u64>(), res.n_edges);
    assert_eq!(similarity_null(&g, &bags, 1, 50, 9).unwrap(), res);
}

#[test]
fn larger_delta_h_never_grows_bags() {
    let text = "love happy you today home not never sad die find make least ha sigh";
    let mut prev = u64::MAX;
    for dh in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let n = WordCounts::from_text(text, &lexicon(dh)).total();
        assert!(n <= prev);
        prev = n;
    }
}

proptest! {
    #[test]
    fn score_lies_within_word_range(seed in any::<u64>()) {
        let lex = lexicon(0.5);
        let mut r = rng(seed);
        let bag = random_bag(&mut r, &lex, 25);
        let h = average_happiness(&bag, &lex).unwrap();
        let lo = bag.iter().map(|(w, _)| lex.score(w)).fold(f64::INFINITY, f64::min);
        let hi = bag.iter().map(|(w, _)| lex.score(w)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= h && h <= hi);
    }

    #[test]
    fn merge_equals_aggregate(seed in any::<u64>()) {
        let lex = lexicon(1.0);
        let mut r = rng(seed);
        let (a, b) = (random_bag(&mut r, &lex, 15), random_bag(&mut r, &lex, 15));
        let mut m = a.clone();
        m.merge(&b);
        prop_assert_eq!(m, WordCounts::aggregate([&a, &b]));
    }
}
