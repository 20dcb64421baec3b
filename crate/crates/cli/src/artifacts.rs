//! On-disk layout shared by the subcommands.
//!
//! `build` writes `manifest.json` plus, per window `w`, `net-<w>.edges`
//! (edge CSV), `replies-<w>.tsv` and `texts-<w>.tsv`. Every later command
//! reads those files and writes its own report next to them.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use hedonet::graph::{read_edge_csv, ReplyGraph};
use hedonet::hedonometer::{build_word_bags, WordBag};
use hedonet::ingest::{Coverage, Granularity, IngestCounters};
use hedonet::lexicon::FilteredLexicon;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub window: Granularity,
    pub anchor: NaiveDate,
    pub inputs: Vec<String>,
    pub counters: IngestCounters,
    pub windows: Vec<WindowEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowEntry {
    pub index: u32,
    pub start: NaiveDate,
    pub n_records: u64,
    pub n_replies: u64,
    pub n_non_replies: u64,
    pub n_duplicates: u64,
    pub n_reply_pairs: u64,
    pub n_nodes: u64,
    pub n_edges: u64,
    pub coverage: Option<Coverage>,
    pub coverage_error: Option<String>,
    pub edges_file: String,
    pub replies_file: String,
    pub texts_file: String,
}

pub fn edges_name(w: u32) -> String {
    format!("net-{w}.edges")
}

pub fn replies_name(w: u32) -> String {
    format!("replies-{w}.tsv")
}

pub fn texts_name(w: u32) -> String {
    format!("texts-{w}.tsv")
}

/// Writes `path` through a temporary sibling and a rename, so readers never
/// see a partial file.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        fill(&mut w)?;
        w.flush()?;
        drop(w);
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::Io { path: path.to_owned(), source: e }
    })
}

/// Pretty JSON plus a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

pub fn read_manifest(out: &Path) -> Result<Manifest> {
    let path = out.join(MANIFEST);
    let m: Manifest = serde_json::from_reader(open(&path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if m.schema_version != SCHEMA_VERSION {
        return Err(CliError::Data(format!(
            "{}: schema_version {} is not supported",
            path.display(),
            m.schema_version
        )));
    }
    Ok(m)
}

/// Windows a command should visit: the requested one, or all of them.
pub fn select_windows(m: &Manifest, only: Option<u32>) -> Result<Vec<WindowEntry>> {
    match only {
        None => Ok(m.windows.clone()),
        Some(i) => m
            .windows
            .iter()
            .find(|w| w.index == i)
            .cloned()
            .map(|w| vec![w])
            .ok_or_else(|| CliError::Param(format!("window {i} was not built"))),
    }
}

pub fn load_graph(out: &Path, w: &WindowEntry) -> Result<ReplyGraph> {
    let path = out.join(&w.edges_file);
    read_edge_csv(open(&path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Builds word bags straight from a window's text file without holding
/// the texts in memory.
pub fn load_bags(out: &Path, w: &WindowEntry, lex: &FilteredLexicon) -> Result<Vec<WordBag>> {
    let path: PathBuf = out.join(&w.texts_file);
    let mut reader = open(&path)?;
    let mut failure: Option<CliError> = None;
    let mut line = String::new();
    let mut line_no = 0usize;
    let texts = std::iter::from_fn(|| loop {
        line.clear();
        line_no += 1;
        match reader.read_line(&mut line) {
            Ok(0) => return None,
            Ok(_) => {}
            Err(e) => {
                failure = Some(CliError::Io { path: path.clone(), source: e });
                return None;
            }
        }
        let l = line.trim_end_matches(['\n', '\r']);
        if l.is_empty() {
            continue;
        }
        let parsed = l.split_once('\t').and_then(|(u, t)| Some((u.parse::<u64>().ok()?, t.to_owned())));
        match parsed {
            Some(p) => return Some(p),
            None => {
                failure = Some(CliError::Data(format!("{}: bad line {line_no}", path.display())));
                return None;
            }
        }
    });
    let bags = build_word_bags(texts, lex, w.index);
    match failure {
        Some(e) => Err(e),
        None => Ok(bags),
    }
}
