use std::path::PathBuf;

use hedonet::graph::MAX_DISTANCE;
use hedonet::ingest::{InputFormat, WindowSpec};
use hedonet::lexicon::{filter_stop_words, load_lexicon, FilteredLexicon};

use crate::args::GlobalArgs;
use crate::artifacts::open;
use crate::error::{CliError, Result};

/// Lower bound on bootstrap replicas for a p-value worth reporting.
pub const MIN_BOOTSTRAP: usize = 100;
/// Widest meaningful stop band: the lexicon spans [1, 9].
pub const MAX_DELTA_H: f64 = 4.0;

/// Validated parameters for one invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub input_format: Option<InputFormat>,
    pub spec: WindowSpec,
    pub lexicon: Option<PathBuf>,
    pub delta_h: f64,
    pub alpha: u64,
    pub hops: Vec<u8>,
    pub permutations: usize,
    pub bootstrap: usize,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub exclude_words: Vec<String>,
    pub window_index: Option<u32>,
}

pub fn check_delta_h(v: f64) -> Result<f64> {
    if v.is_finite() && (0.0..=MAX_DELTA_H).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::Param(format!("--delta-h must lie in [0, {MAX_DELTA_H}], got {v}")))
    }
}

pub fn check_alpha(v: u64) -> Result<u64> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(CliError::Param("--alpha must be at least 1".into()))
    }
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<RunConfig> {
        let mut hops = g.hops.clone();
        if hops.is_empty() {
            return Err(CliError::Param("--hops needs at least one distance".into()));
        }
        if let Some(&d) = hops.iter().find(|&&d| !(1..=MAX_DISTANCE).contains(&d)) {
            return Err(CliError::Param(format!("--hops values must lie in 1..={MAX_DISTANCE}, got {d}")));
        }
        hops.sort_unstable();
        hops.dedup();
        if g.permutations == 0 {
            return Err(CliError::Param("--permutations must be at least 1".into()));
        }
        if g.bootstrap < MIN_BOOTSTRAP {
            return Err(CliError::Param(format!("--bootstrap must be at least {MIN_BOOTSTRAP}")));
        }
        Ok(RunConfig {
            inputs: g.input.clone(),
            input_format: g.input_format,
            spec: WindowSpec::new(g.window, g.anchor),
            lexicon: g.lexicon.clone(),
            delta_h: check_delta_h(g.delta_h)?,
            alpha: check_alpha(g.alpha)?,
            hops,
            permutations: g.permutations,
            bootstrap: g.bootstrap,
            seed: g.seed,
            out: g.out.clone(),
            exclude_words: g.exclude_words.iter().map(|w| w.trim().to_owned()).filter(|w| !w.is_empty()).collect(),
            window_index: g.window_index,
        })
    }

    /// Stochastic commands persist their output, so they need a seed.
    pub fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::Usage(format!("`{command}` is stochastic and needs --seed")))
    }

    pub fn filtered_lexicon(&self, delta_h: f64) -> Result<FilteredLexicon> {
        let path = self
            .lexicon
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs --lexicon".into()))?;
        let lex = load_lexicon(open(path)?)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let filtered = filter_stop_words(&lex, delta_h);
        Ok(if self.exclude_words.is_empty() {
            filtered
        } else {
            filtered.without_words(&self.exclude_words)
        })
    }

    pub fn lexicon_label(&self) -> Option<String> {
        self.lexicon.as_ref().map(|p| p.display().to_string())
    }
}
