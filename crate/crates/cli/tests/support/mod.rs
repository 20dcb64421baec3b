//! Synthetic message streams for driving the CLI.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

pub fn lexicon_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/labmt_subset.tsv")
}

pub const HAPPY: (&str, f64) = ("love", 8.42);
pub const SAD: (&str, f64) = ("sad", 2.38);

/// JSONL record; `created` is seconds after 2008-09-09T00:00:00Z.
pub fn jsonl(id: u64, user: u64, reply_to: Option<u64>, created: i64, text: &str) -> String {
    let ts = chrono::DateTime::from_timestamp(1_220_918_400 + created, 0).unwrap();
    let mut v = serde_json::json!({
        "id": id,
        "user_id": user,
        "text": text,
        "created_at": ts.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
    });
    if let Some(to) = reply_to {
        v["in_reply_to_user_id"] = to.into();
        v["in_reply_to_status_id"] = (id.saturating_sub(1).max(1)).into();
    }
    v.to_string()
}

/// A week-0 stream in which every edge is a two-way reply exchange and
/// every user posts `words` lexicon words mixing `love` and `sad` so that
/// the user's score is as close to `target` as that mix allows.
pub fn planted_stream(edges: &[(u64, u64)], targets: &[(u64, f64)], words: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut id = 1u64;
    let mut t = 0i64;
    let mut next = |lines: &mut Vec<String>, user, to, text: &str| {
        lines.push(jsonl(id, user, to, t % 500_000, text));
        id += 1;
        t += 7;
    };
    for &(a, b) in edges {
        next(&mut lines, a, Some(b), "zz");
        next(&mut lines, b, Some(a), "zz");
    }
    for &(u, target) in targets {
        let share = ((target - SAD.1) / (HAPPY.1 - SAD.1)).clamp(0.0, 1.0);
        let n_happy = (share * words as f64).round() as usize;
        let mut text = String::new();
        for i in 0..words {
            let _ = write!(text, "{} ", if i < n_happy { HAPPY.0 } else { SAD.0 });
        }
        next(&mut lines, u, None, text.trim_end());
    }
    lines
}

pub fn write_lines(path: &Path, lines: &[String]) {
    let mut w = BufWriter::new(File::create(path).unwrap());
    for l in lines {
        writeln!(w, "{l}").unwrap();
    }
    w.flush().unwrap();
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_reader(File::open(path).unwrap()).unwrap()
}

pub fn run_ok(args: &[&str]) -> PathBuf {
    let mut full = vec!["hedonet"];
    full.extend_from_slice(args);
    hedonet_cli::run_args(full).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}
