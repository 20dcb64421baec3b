use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hedonet::graph::ExportFormat;
use hedonet::ingest::{Granularity, InputFormat};

#[derive(Parser, Debug)]
#[command(name = "hedonet", version, about = "Happiness assortativity on reply networks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Message stream(s), JSONL or TSV; `-` reads stdin.
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,
    /// Overrides format detection from the file extension.
    #[arg(long, global = true)]
    pub input_format: Option<InputFormat>,
    #[arg(long, global = true, default_value = "week")]
    pub window: Granularity,
    /// First day of window 0 (UTC).
    #[arg(long, global = true, default_value = "2008-09-09")]
    pub anchor: NaiveDate,
    /// labMT-style word list (TSV).
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Half-width of the excluded band around the neutral score 5.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub delta_h: f64,
    /// Minimum matched lexicon words for a user to take part.
    #[arg(long, global = true, default_value_t = 50)]
    pub alpha: u64,
    #[arg(long, global = true, value_delimiter = ',', default_value = "1,2,3")]
    pub hops: Vec<u8>,
    #[arg(long, global = true, default_value_t = 100)]
    pub permutations: usize,
    #[arg(long, global = true, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Artifact and report directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Words removed from the lexicon before scoring.
    #[arg(long, global = true, value_delimiter = ',')]
    pub exclude_words: Vec<String>,
    /// Restrict a command to one window; default is every built window.
    #[arg(long, global = true)]
    pub window_index: Option<u32>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Partition the input into windows and persist per-window networks.
    Build,
    /// Network statistics per window.
    Stats,
    /// Per-user happiness scores and happiness by degree.
    Happiness,
    /// Happiness correlation at each hop distance.
    Assort {
        /// Also write the (h_u, h_v) pairs as CSV.
        #[arg(long)]
        pairs_csv: bool,
    },
    /// Permutation null model for the hop correlations.
    Nullmodel,
    /// Discrete power-law fit of the degree distribution.
    Powerlaw,
    /// Word shift between low- and high-degree users, or between windows.
    Wordshift {
        /// Reference group is degree < split, comparison degree >= split.
        #[arg(long, default_value_t = 100)]
        degree_split: u64,
        /// Compare against all users of this window instead of splitting
        /// by degree.
        #[arg(long)]
        reference_window: Option<u32>,
        /// Report contributions as percentages of the score difference.
        #[arg(long)]
        percent: bool,
        /// Entries kept in the JSON report (the CSV has all of them).
        #[arg(long, default_value_t = 50)]
        top: usize,
    },
    /// Word-usage similarity across edges against shuffled bags.
    Similarity,
    /// Sample coverage per window from message ids.
    Coverage,
    /// Repeat the hop correlations over a range of one parameter.
    Sweep {
        #[arg(long)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Write each window's network as an edge list or GEXF.
    Export {
        #[arg(long, default_value = "edge-csv")]
        format: ExportFormat,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    DeltaH,
}
