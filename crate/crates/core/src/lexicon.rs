//! Word-happiness lexicon (labMT format), stop-word filtering and tokenization.

use std::collections::HashMap;
use std::io::{self, BufRead};

use thiserror::Error;

/// Neutral point of the 1..9 happiness scale.
pub const NEUTRAL: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub h_avg: f64,
    pub h_std: Option<f64>,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon read failed: {0}")]
    Io(#[from] io::Error),
    #[error("lexicon is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate word `{word}`")]
    DuplicateWord { line: usize, word: String },
    #[error("line {line}: happiness {value} outside [1, 9]")]
    OutOfRange { line: usize, value: f64 },
}

/// The full word list as loaded.
#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
}

impl Lexicon {
    /// Builds a lexicon from entries, lowercasing words and rejecting
    /// duplicates and out-of-range scores.
    pub fn from_entries<I>(entries: I) -> Result<Lexicon, LexiconError>
    where
        I: IntoIterator<Item = LexiconEntry>,
    {
        Self::from_numbered(entries.into_iter().enumerate().map(|(i, e)| (i + 1, e)))
    }

    fn from_numbered<I>(rows: I) -> Result<Lexicon, LexiconError>
    where
        I: IntoIterator<Item = (usize, LexiconEntry)>,
    {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for (line, mut e) in rows {
            e.word = e.word.to_lowercase();
            if !(1.0..=9.0).contains(&e.h_avg) {
                return Err(LexiconError::OutOfRange { line, value: e.h_avg });
            }
            if seen.insert(e.word.clone(), ()).is_some() {
                return Err(LexiconError::DuplicateWord { line, word: e.word });
            }
            out.push(e);
        }
        if out.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(Lexicon { entries: out })
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.iter().find(|e| e.word == word)
    }
}

/// Reads a labMT-style TSV.
///
/// With a header row (first column `word`) the `happiness_average` and
/// `happiness_standard_deviation` columns are located by name, falling back
/// to columns 3 and 4. Without a header each row is `word<TAB>h_avg`.
pub fn load_lexicon<R: BufRead>(reader: R) -> Result<Lexicon, LexiconError> {
    let mut rows = Vec::new();
    let mut layout: Option<(usize, Option<usize>)> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let lineno = i + 1;
        let (avg_col, std_col) = match layout {
            Some(l) => l,
            None if cols[0].eq_ignore_ascii_case("word") => {
                let find = |name: &str| cols.iter().position(|c| c.eq_ignore_ascii_case(name));
                let avg = find("happiness_average").unwrap_or(2);
                let std = find("happiness_standard_deviation").or(Some(3));
                layout = Some((avg, std));
                continue;
            }
            None => {
                let l = (1, None);
                layout = Some(l);
                l
            }
        };
        let parse_err = |message: String| LexiconError::Parse { line: lineno, message };
        let raw_avg = cols
            .get(avg_col)
            .ok_or_else(|| parse_err(format!("missing happiness column {}", avg_col + 1)))?;
        let h_avg: f64 = raw_avg
            .parse()
            .map_err(|_| parse_err(format!("unparsable happiness `{raw_avg}`")))?;
        if !h_avg.is_finite() {
            return Err(parse_err(format!("unparsable happiness `{raw_avg}`")));
        }
        let h_std = std_col
            .and_then(|c| cols.get(c))
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|s| s.is_finite() && *s >= 0.0);
        rows.push((lineno, LexiconEntry { word: cols[0].to_owned(), h_avg, h_std }));
    }
    Lexicon::from_numbered(rows)
}

/// A lexicon with the neutral band `5 - delta_h < h_avg < 5 + delta_h`
/// removed. Each retained word gets a dense index (lexicon order).
#[derive(Clone, Debug)]
pub struct FilteredLexicon {
    words: Vec<String>,
    scores: Vec<f64>,
    index: HashMap<String, u32>,
    delta_h: f64,
}

impl FilteredLexicon {
    pub fn delta_h(&self) -> f64 {
        self.delta_h
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn lookup(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn word(&self, idx: u32) -> &str {
        &self.words[idx as usize]
    }

    pub fn score(&self, idx: u32) -> f64 {
        self.scores[idx as usize]
    }

    pub fn score_of(&self, word: &str) -> Option<f64> {
        self.lookup(word).map(|i| self.score(i))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, f64)> {
        self.words.iter().map(String::as_str).zip(self.scores.iter().copied())
    }

    /// Drops the listed words (case-insensitive). Indices are reassigned.
    pub fn without_words<S: AsRef<str>>(&self, exclude: &[S]) -> FilteredLexicon {
        let drop: std::collections::HashSet<String> =
            exclude.iter().map(|w| w.as_ref().to_lowercase()).collect();
        let kept = self
            .words()
            .filter(|(w, _)| !drop.contains(*w))
            .map(|(w, h)| (w.to_owned(), h));
        Self::from_pairs(kept, self.delta_h)
    }

    fn from_pairs<I: IntoIterator<Item = (String, f64)>>(pairs: I, delta_h: f64) -> FilteredLexicon {
        let mut words = Vec::new();
        let mut scores = Vec::new();
        let mut index = HashMap::new();
        for (w, h) in pairs {
            index.insert(w.clone(), words.len() as u32);
            words.push(w);
            scores.push(h);
        }
        FilteredLexicon { words, scores, index, delta_h }
    }
}

/// Removes the stop-word band around the neutral score. Bounds are strict,
/// so with `delta_h = 1` a word scored exactly 6.00 is kept.
///
/// # Panics
/// If `delta_h` is negative or not finite.
pub fn filter_stop_words(lexicon: &Lexicon, delta_h: f64) -> FilteredLexicon {
    assert!(delta_h.is_finite() && delta_h >= 0.0, "delta_h must be >= 0");
    let lo = NEUTRAL - delta_h;
    let hi = NEUTRAL + delta_h;
    FilteredLexicon::from_pairs(
        lexicon
            .entries()
            .iter()
            .filter(|e| !(lo < e.h_avg && e.h_avg < hi))
            .map(|e| (e.word.clone(), e.h_avg)),
        delta_h,
    )
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}'
}

/// Calls `f` for every token of `text`. A token is a maximal run of
/// letters, digits and apostrophes, lowercased, with U+2019 mapped to `'`.
pub fn for_each_token<F: FnMut(&str)>(text: &str, mut f: F) {
    let mut buf = String::new();
    for c in text.chars() {
        if is_token_char(c) {
            if c == '\u{2019}' {
                buf.push('\'');
            } else if c.is_ascii() {
                buf.push(c.to_ascii_lowercase());
            } else {
                buf.extend(c.to_lowercase());
            }
        } else if !buf.is_empty() {
            f(&buf);
            buf.clear();
        }
    }
    if !buf.is_empty() {
        f(&buf);
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for_each_token(text, |t| out.push(t.to_owned()));
    out
}
