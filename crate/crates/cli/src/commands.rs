use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use hedonet::assortativity::{
    correlate, default_degree_bins, happiness_by_degree, null_model_from_pairs, scored_pairs_multi,
    CorrelationResult, DegreeBin, NullModelResult, ScoredPairSet,
};
use hedonet::graph::{
    build_reciprocal, ccdf, compute_stats, export_graph, write_edge_csv, ExportFormat, NetworkStats,
    ReplyGraph,
};
use hedonet::hedonometer::{
    score_bags, similarity_null, word_shift, write_scores, HappinessScore, SimilarityNull, WordBag,
    WordCounts, WordShiftEntry, WordShiftSummary,
};
use hedonet::ingest::{write_replies, write_texts, InputFormat, Partitioner, WindowStore};
use hedonet::lexicon::FilteredLexicon;
use hedonet::powerlaw::{fit_discrete_powerlaw, gof_pvalue, PowerLawFit};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::SweepParam;
use crate::artifacts::{
    edges_name, load_bags, load_graph, read_manifest, replies_name, select_windows, texts_name,
    write_atomic, write_json, Manifest, WindowEntry, MANIFEST, SCHEMA_VERSION,
};
use crate::config::{check_alpha, check_delta_h, RunConfig};
use crate::error::{CliError, Result};

/// Common envelope of every JSON report.
#[derive(Serialize)]
pub struct Report<T> {
    pub schema_version: u32,
    pub command: &'static str,
    pub params: Value,
    pub windows: Vec<T>,
}

/// A window either produced a result or was skipped for a data reason.
#[derive(Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Done(T),
    Skipped { window_index: u32, skipped: String },
}

fn write_report<T: Serialize>(
    cfg: &RunConfig,
    command: &'static str,
    params: Value,
    windows: Vec<T>,
) -> Result<PathBuf> {
    let path = cfg.out.join(format!("{command}.json"));
    write_json(&path, &Report { schema_version: SCHEMA_VERSION, command, params, windows })?;
    Ok(path)
}

/// Per-window driver. With an explicit `--window-index` a data error is
/// fatal; across all windows it only skips the affected window.
fn per_window<T, F>(cfg: &RunConfig, mut f: F) -> Result<Vec<Outcome<T>>>
where
    F: FnMut(&WindowEntry) -> Result<T>,
{
    let manifest = read_manifest(&cfg.out)?;
    let mut out = Vec::new();
    for w in select_windows(&manifest, cfg.window_index)? {
        match f(&w) {
            Ok(v) => out.push(Outcome::Done(v)),
            Err(CliError::Data(msg)) if cfg.window_index.is_none() => {
                out.push(Outcome::Skipped { window_index: w.index, skipped: msg })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn scoring_params(cfg: &RunConfig, delta_h: f64) -> Value {
    json!({
        "lexicon": cfg.lexicon_label(),
        "delta_h": delta_h,
        "alpha": cfg.alpha,
        "exclude_words": cfg.exclude_words,
        "window_index": cfg.window_index,
    })
}

// ---------------------------------------------------------------- build

pub fn cmd_build(cfg: &RunConfig) -> Result<PathBuf> {
    if cfg.inputs.is_empty() {
        return Err(CliError::Usage("`build` needs at least one --input".into()));
    }
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io { path: cfg.out.clone(), source: e })?;
    let mut partitioner = Partitioner::new(cfg.spec);
    for input in &cfg.inputs {
        let format = cfg.input_format.unwrap_or_else(|| InputFormat::from_path(input));
        let res = if input.as_os_str() == "-" {
            partitioner.push_reader(io::stdin().lock(), format)
        } else {
            fs::File::open(input).and_then(|f| partitioner.push_reader(BufReader::new(f), format))
        };
        res.map_err(|e| CliError::Io { path: input.clone(), source: e })?;
    }
    let partition = partitioner.finish();
    let mut windows = Vec::with_capacity(partition.windows.len());
    for store in partition.windows {
        windows.push(persist_window(cfg, store)?);
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        window: cfg.spec.granularity,
        anchor: cfg.spec.anchor,
        inputs: cfg.inputs.iter().map(|p| p.display().to_string()).collect(),
        counters: partition.counters,
        windows,
    };
    let path = cfg.out.join(MANIFEST);
    write_json(&path, &manifest)?;
    Ok(path)
}

fn persist_window(cfg: &RunConfig, store: WindowStore) -> Result<WindowEntry> {
    let w = store.index;
    let graph = build_reciprocal(&store.replies);
    let (coverage, coverage_error) = match store.coverage() {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut directed: Vec<(u64, u64)> = store
        .replies
        .iter()
        .filter(|r| r.from_user != r.to_user)
        .map(|r| (r.from_user, r.to_user))
        .collect();
    directed.dedup();
    let entry = WindowEntry {
        index: w,
        start: cfg.spec.window_start(w),
        n_records: store.n_records(),
        n_replies: store.n_replies,
        n_non_replies: store.n_non_replies,
        n_duplicates: store.n_duplicates,
        n_reply_pairs: directed.len() as u64,
        n_nodes: graph.n_nodes() as u64,
        n_edges: graph.n_edges() as u64,
        coverage,
        coverage_error,
        edges_file: edges_name(w),
        replies_file: replies_name(w),
        texts_file: texts_name(w),
    };
    write_atomic(&cfg.out.join(&entry.edges_file), |f| write_edge_csv(f, &graph))?;
    write_atomic(&cfg.out.join(&entry.replies_file), |f| write_replies(f, &store.replies))?;
    write_atomic(&cfg.out.join(&entry.texts_file), |f| write_texts(f, &store.texts))?;
    Ok(entry)
}

// ---------------------------------------------------------------- stats

#[derive(Serialize)]
pub struct StatsRow {
    pub window_index: u32,
    pub start: chrono::NaiveDate,
    #[serde(flatten)]
    pub stats: NetworkStats,
}

pub fn cmd_stats(cfg: &RunConfig) -> Result<PathBuf> {
    let rows = per_window(cfg, |w| {
        let g = load_graph(&cfg.out, w)?;
        Ok(StatsRow { window_index: w.index, start: w.start, stats: compute_stats(&g) })
    })?;
    write_report(cfg, "stats", json!({ "window_index": cfg.window_index }), rows)
}

// ---------------------------------------------------------------- happiness

/// Graph, bags and scores of one window.
struct Scored {
    graph: ReplyGraph,
    bags: Vec<WordBag>,
    scores: Vec<HappinessScore>,
}

fn score_window(cfg: &RunConfig, w: &WindowEntry, lex: &FilteredLexicon) -> Result<Scored> {
    let graph = load_graph(&cfg.out, w)?;
    let bags = load_bags(&cfg.out, w, lex)?;
    let scores = score_bags(&bags, lex);
    Ok(Scored { graph, bags, scores })
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = xs.fold((0u64, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

#[derive(Serialize)]
pub struct HappinessRow {
    pub window_index: u32,
    pub n_scored: u64,
    pub n_qualifying: u64,
    pub mean_h: Option<f64>,
    pub mean_h_qualifying: Option<f64>,
    /// Qualifying users only.
    pub degree_bins: Vec<DegreeBin>,
    pub scores_file: String,
}

pub fn cmd_happiness(cfg: &RunConfig) -> Result<PathBuf> {
    let lex = cfg.filtered_lexicon(cfg.delta_h)?;
    let rows = per_window(cfg, |w| {
        let s = score_window(cfg, w, &lex)?;
        let scores_file = format!("scores-{}.tsv", w.index);
        write_atomic(&cfg.out.join(&scores_file), |f| write_scores(f, &s.scores))?;
        let qualifying: Vec<HappinessScore> =
            s.scores.iter().filter(|x| x.labmt_word_count >= cfg.alpha).copied().collect();
        let degree_bins = happiness_by_degree(&s.graph, &qualifying, &default_degree_bins())
            .map_err(CliError::data)?;
        Ok(HappinessRow {
            window_index: w.index,
            n_scored: s.scores.len() as u64,
            n_qualifying: qualifying.len() as u64,
            mean_h: mean(s.scores.iter().map(|x| x.h)),
            mean_h_qualifying: mean(qualifying.iter().map(|x| x.h)),
            degree_bins,
            scores_file,
        })
    })?;
    write_report(cfg, "happiness", scoring_params(cfg, cfg.delta_h), rows)
}

// ---------------------------------------------------------------- assort

#[derive(Serialize)]
pub struct HopCorrelation {
    pub distance: u8,
    #[serde(flatten)]
    pub correlation: CorrelationResult,
}

#[derive(Serialize)]
pub struct AssortRow {
    pub window_index: u32,
    pub n_users_scored: u64,
    pub n_users_qualifying: u64,
    pub hops: Vec<HopCorrelation>,
}

fn pair_sets(cfg: &RunConfig, s: &Scored, alpha: u64) -> Result<Vec<ScoredPairSet>> {
    scored_pairs_multi(&s.graph, &s.scores, &cfg.hops, alpha).map_err(CliError::data)
}

pub fn cmd_assort(cfg: &RunConfig, pairs_csv: bool) -> Result<PathBuf> {
    let lex = cfg.filtered_lexicon(cfg.delta_h)?;
    let rows = per_window(cfg, |w| {
        let s = score_window(cfg, w, &lex)?;
        let sets = pair_sets(cfg, &s, cfg.alpha)?;
        if pairs_csv {
            for set in &sets {
                let path = cfg.out.join(format!("pairs-{}-d{}.csv", w.index, set.distance));
                write_atomic(&path, |f| set.write_csv(f))?;
            }
        }
        Ok(AssortRow {
            window_index: w.index,
            n_users_scored: s.scores.len() as u64,
            n_users_qualifying: sets.first().map_or(0, |x| x.n_users_qualifying),
            hops: sets
                .iter()
                .map(|set| HopCorrelation { distance: set.distance, correlation: correlate(set) })
                .collect(),
        })
    })?;
    let mut params = scoring_params(cfg, cfg.delta_h);
    params["hops"] = json!(cfg.hops);
    write_report(cfg, "assort", params, rows)
}

// ---------------------------------------------------------------- nullmodel

#[derive(Serialize)]
pub struct NullRow {
    pub window_index: u32,
    pub hops: Vec<NullModelResult>,
}

pub fn cmd_nullmodel(cfg: &RunConfig) -> Result<PathBuf> {
    let seed = cfg.require_seed("nullmodel")?;
    let lex = cfg.filtered_lexicon(cfg.delta_h)?;
    let rows = per_window(cfg, |w| {
        let s = score_window(cfg, w, &lex)?;
        let sets = pair_sets(cfg, &s, cfg.alpha)?;
        let hops = null_model_from_pairs(&sets, cfg.permutations, seed).map_err(CliError::data)?;
        Ok(NullRow { window_index: w.index, hops })
    })?;
    let mut params = scoring_params(cfg, cfg.delta_h);
    params["hops"] = json!(cfg.hops);
    params["permutations"] = json!(cfg.permutations);
    params["seed"] = json!(seed);
    write_report(cfg, "nullmodel", params, rows)
}

// ---------------------------------------------------------------- powerlaw

#[derive(Serialize)]
pub struct PowerLawRow {
    pub window_index: u32,
    pub alpha: f64,
    pub k_min: u64,
    #[serde(rename = "D")]
    pub ks_distance: f64,
    pub n_tail: u64,
    pub n_total: u64,
    pub p_value: f64,
    pub n_bootstrap: usize,
    pub seed: u64,
    pub ccdf_file: String,
    pub warning: Option<String>,
}

const RECOMMENDED_MIN_DEGREES: usize = 50;

fn write_ccdf(path: &Path, degrees: &[u64], fit: &PowerLawFit) -> Result<()> {
    let points = ccdf(degrees).map_err(CliError::data)?;
    let tail_share = fit.n_tail as f64 / fit.n_total as f64;
    write_atomic(path, |f| {
        writeln!(f, "k,p_empirical,p_fit")?;
        for (k, p) in points {
            if k >= fit.k_min {
                writeln!(f, "{k},{p},{}", tail_share * fit.ccdf(k))?;
            } else {
                writeln!(f, "{k},{p},")?;
            }
        }
        Ok(())
    })
}

pub fn cmd_powerlaw(cfg: &RunConfig) -> Result<PathBuf> {
    let seed = cfg.require_seed("powerlaw")?;
    let rows = per_window(cfg, |w| {
        let g = load_graph(&cfg.out, w)?;
        let degrees = g.degrees();
        let fit = fit_discrete_powerlaw(&degrees).map_err(CliError::data)?;
        let gof = gof_pvalue(&fit, &degrees, cfg.bootstrap, seed).map_err(CliError::data)?;
        let ccdf_file = format!("ccdf-{}.csv", w.index);
        write_ccdf(&cfg.out.join(&ccdf_file), &degrees, &fit)?;
        Ok(PowerLawRow {
            window_index: w.index,
            alpha: fit.alpha,
            k_min: fit.k_min,
            ks_distance: fit.ks_distance,
            n_tail: fit.n_tail,
            n_total: fit.n_total,
            p_value: gof.p_value,
            n_bootstrap: gof.n_bootstrap,
            seed: gof.seed,
            ccdf_file,
            warning: (degrees.len() < RECOMMENDED_MIN_DEGREES).then(|| {
                format!("only {} observations; at least {RECOMMENDED_MIN_DEGREES} are recommended", degrees.len())
            }),
        })
    })?;
    let params = json!({ "bootstrap": cfg.bootstrap, "seed": seed, "window_index": cfg.window_index });
    write_report(cfg, "powerlaw", params, rows)
}

// ---------------------------------------------------------------- wordshift

#[derive(Serialize)]
pub struct ShiftEntryOut {
    pub rank: usize,
    #[serde(flatten)]
    pub entry: WordShiftEntry,
    pub percent: Option<f64>,
}

#[derive(Serialize)]
pub struct WordShiftRow {
    pub window_index: u32,
    pub reference: Value,
    pub comparison: Value,
    pub n_reference_users: u64,
    pub n_comparison_users: u64,
    pub summary: WordShiftSummary,
    pub entries: Vec<ShiftEntryOut>,
    pub csv_file: String,
}

pub struct ShiftOptions {
    pub degree_split: u64,
    pub reference_window: Option<u32>,
    pub percent: bool,
    pub top: usize,
}

pub fn cmd_wordshift(cfg: &RunConfig, opts: &ShiftOptions) -> Result<PathBuf> {
    if opts.degree_split == 0 {
        return Err(CliError::Param("--degree-split must be at least 1".into()));
    }
    let lex = cfg.filtered_lexicon(cfg.delta_h)?;
    let reference_bags = match opts.reference_window {
        None => None,
        Some(r) => {
            let m = read_manifest(&cfg.out)?;
            let entry = select_windows(&m, Some(r))?.remove(0);
            Some(load_bags(&cfg.out, &entry, &lex)?)
        }
    };
    let qualifies = |b: &&WordBag| b.counts.total() >= cfg.alpha;
    let rows = per_window(cfg, |w| {
        let bags = load_bags(&cfg.out, w, &lex)?;
        let (ref_group, comp_group, reference, comparison): (Vec<&WordBag>, Vec<&WordBag>, Value, Value) =
            match (&reference_bags, opts.reference_window) {
                (Some(rb), Some(r)) => (
                    rb.iter().filter(qualifies).collect(),
                    bags.iter().filter(qualifies).collect(),
                    json!({ "window_index": r }),
                    json!({ "window_index": w.index }),
                ),
                _ => {
                    let g = load_graph(&cfg.out, w)?;
                    let degree = |b: &WordBag| g.node_of(b.user_id).map(|n| g.degree(n) as u64);
                    let in_net: Vec<(&WordBag, u64)> = bags
                        .iter()
                        .filter(qualifies)
                        .filter_map(|b| degree(b).map(|k| (b, k)))
                        .collect();
                    (
                        in_net.iter().filter(|(_, k)| *k < opts.degree_split).map(|(b, _)| *b).collect(),
                        in_net.iter().filter(|(_, k)| *k >= opts.degree_split).map(|(b, _)| *b).collect(),
                        json!({ "degree_below": opts.degree_split }),
                        json!({ "degree_at_least": opts.degree_split }),
                    )
                }
            };
        let ref_counts = WordCounts::aggregate(ref_group.iter().map(|b| &b.counts));
        let comp_counts = WordCounts::aggregate(comp_group.iter().map(|b| &b.counts));
        let shift = word_shift(&ref_counts, &comp_counts, &lex)
            .map_err(|e| CliError::Data(format!("window {}: {e}", w.index)))?;
        let ranked: Vec<ShiftEntryOut> = shift
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| ShiftEntryOut {
                rank: i + 1,
                percent: if opts.percent { shift.percent(e) } else { None },
                entry: e.clone(),
            })
            .collect();
        let csv_file = format!("wordshift-{}.csv", w.index);
        write_atomic(&cfg.out.join(&csv_file), |f| {
            writeln!(f, "rank,word,h_avg,p_ref,p_comp,contribution,percent,sign_class")?;
            for r in &ranked {
                let pct = shift.percent(&r.entry).map(|p| p.to_string()).unwrap_or_default();
                let e = &r.entry;
                writeln!(
                    f,
                    "{},{},{},{},{},{},{},{}",
                    r.rank,
                    csv_field(&e.word),
                    e.h_avg,
                    e.p_ref,
                    e.p_comp,
                    e.contribution,
                    pct,
                    serde_json::to_value(e.sign_class).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
                )?;
            }
            Ok(())
        })?;
        Ok(WordShiftRow {
            window_index: w.index,
            reference,
            comparison,
            n_reference_users: ref_group.len() as u64,
            n_comparison_users: comp_group.len() as u64,
            summary: shift.summary(),
            entries: ranked.into_iter().take(opts.top).collect(),
            csv_file,
        })
    })?;
    let mut params = scoring_params(cfg, cfg.delta_h);
    params["degree_split"] = json!(opts.degree_split);
    params["reference_window"] = json!(opts.reference_window);
    params["percent"] = json!(opts.percent);
    params["top"] = json!(opts.top);
    write_report(cfg, "wordshift", params, rows)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

// ---------------------------------------------------------------- similarity

#[derive(Serialize)]
pub struct SimilarityRow {
    pub window_index: u32,
    #[serde(flatten)]
    pub result: SimilarityNull,
}

pub fn cmd_similarity(cfg: &RunConfig) -> Result<PathBuf> {
    let seed = cfg.require_seed("similarity")?;
    let lex = cfg.filtered_lexicon(cfg.delta_h)?;
    let rows = per_window(cfg, |w| {
        let g = load_graph(&cfg.out, w)?;
        let bags = load_bags(&cfg.out, w, &lex)?;
        let result = similarity_null(&g, &bags, cfg.alpha, cfg.permutations, seed)
            .map_err(|e| CliError::Data(format!("window {}: {e}", w.index)))?;
        Ok(SimilarityRow { window_index: w.index, result })
    })?;
    let mut params = scoring_params(cfg, cfg.delta_h);
    params["permutations"] = json!(cfg.permutations);
    params["seed"] = json!(seed);
    write_report(cfg, "similarity", params, rows)
}

// ---------------------------------------------------------------- coverage

#[derive(Serialize)]
pub struct CoverageRow {
    pub window_index: u32,
    pub start: chrono::NaiveDate,
    pub observed: Option<u64>,
    pub total_estimate: Option<u64>,
    pub percent: Option<f64>,
    pub error: Option<String>,
}

pub fn cmd_coverage(cfg: &RunConfig) -> Result<PathBuf> {
    let rows = per_window(cfg, |w| {
        Ok(CoverageRow {
            window_index: w.index,
            start: w.start,
            observed: w.coverage.map(|c| c.observed),
            total_estimate: w.coverage.map(|c| c.total_estimate),
            percent: w.coverage.map(|c| c.percent),
            error: w.coverage_error.clone(),
        })
    })?;
    write_report(cfg, "coverage", json!({ "window_index": cfg.window_index }), rows)
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
pub struct SweepHop {
    pub distance: u8,
    pub r_spearman: Option<f64>,
    pub r_pearson: Option<f64>,
    pub n_pairs: u64,
}

#[derive(Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub n_users_scored: u64,
    pub n_users_qualifying: u64,
    pub n_labmt_words: u64,
    pub hops: Vec<SweepHop>,
}

#[derive(Serialize)]
pub struct SweepRow {
    pub window_index: u32,
    pub points: Vec<SweepPoint>,
}

fn sweep_point(cfg: &RunConfig, s: &Scored, value: f64, alpha: u64) -> Result<SweepPoint> {
    let sets = pair_sets(cfg, s, alpha)?;
    Ok(SweepPoint {
        value,
        n_users_scored: s.scores.len() as u64,
        n_users_qualifying: sets.first().map_or(0, |x| x.n_users_qualifying),
        n_labmt_words: s.bags.iter().map(|b| b.counts.total()).sum(),
        hops: sets
            .iter()
            .map(|set| {
                let c = correlate(set);
                SweepHop {
                    distance: set.distance,
                    r_spearman: c.r_spearman,
                    r_pearson: c.r_pearson,
                    n_pairs: c.n_pairs,
                }
            })
            .collect(),
    })
}

pub fn cmd_sweep(cfg: &RunConfig, param: SweepParam, values: &[f64]) -> Result<PathBuf> {
    if values.is_empty() {
        return Err(CliError::Param("--values needs at least one value".into()));
    }
    for &v in values {
        match param {
            SweepParam::Alpha => {
                if !(v.fract() == 0.0 && v >= 1.0 && v <= u64::MAX as f64) {
                    return Err(CliError::Param(format!("alpha values must be positive integers, got {v}")));
                }
            }
            SweepParam::DeltaH => {
                check_delta_h(v)?;
            }
        }
    }
    let lexicons: Vec<FilteredLexicon> = match param {
        SweepParam::Alpha => vec![cfg.filtered_lexicon(cfg.delta_h)?],
        SweepParam::DeltaH => values.iter().map(|&v| cfg.filtered_lexicon(v)).collect::<Result<_>>()?,
    };
    let rows = per_window(cfg, |w| {
        let mut points = Vec::with_capacity(values.len());
        match param {
            SweepParam::Alpha => {
                let s = score_window(cfg, w, &lexicons[0])?;
                for &v in values {
                    points.push(sweep_point(cfg, &s, v, check_alpha(v as u64)?)?);
                }
            }
            SweepParam::DeltaH => {
                for (&v, lex) in values.iter().zip(&lexicons) {
                    let s = score_window(cfg, w, lex)?;
                    points.push(sweep_point(cfg, &s, v, cfg.alpha)?);
                }
            }
        }
        Ok(SweepRow { window_index: w.index, points })
    })?;
    let mut params = scoring_params(cfg, cfg.delta_h);
    params["hops"] = json!(cfg.hops);
    params["param"] = json!(param);
    params["values"] = json!(values);
    write_report(cfg, "sweep", params, rows)
}

// ---------------------------------------------------------------- export

#[derive(Serialize)]
pub struct ExportRow {
    pub window_index: u32,
    pub file: String,
    pub n_nodes: u64,
    pub n_edges: u64,
}

pub fn cmd_export(cfg: &RunConfig, format: ExportFormat) -> Result<PathBuf> {
    let ext = match format {
        ExportFormat::EdgeCsv => "csv",
        ExportFormat::Gexf => "gexf",
    };
    let rows = per_window(cfg, |w| {
        let g = load_graph(&cfg.out, w)?;
        let file = format!("net-{}.{ext}", w.index);
        write_atomic(&cfg.out.join(&file), |f| export_graph(f, &g, format))?;
        Ok(ExportRow {
            window_index: w.index,
            file,
            n_nodes: g.n_nodes() as u64,
            n_edges: g.n_edges() as u64,
        })
    })?;
    write_report(cfg, "export", json!({ "format": format, "window_index": cfg.window_index }), rows)
}
