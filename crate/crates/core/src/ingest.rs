//! Message-stream ingestion.
//!
//! Records arrive as JSONL or TSV lines, are validated into [`MessageRecord`]s
//! and bucketed into day, week or month windows. Each window keeps the
//! directed reply events it saw plus every authored text, keyed by author.
//! Bad lines never abort a stream; they are tallied in [`IngestCounters`].

use std::borrow::Cow;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, NaiveTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One parsed message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageRecord {
    pub message_id: u64,
    pub user_id: u64,
    pub text: String,
    pub reply_to_message_id: Option<u64>,
    pub reply_to_user_id: Option<u64>,
    pub timestamp: DateTime<Utc>,
}

impl MessageRecord {
    pub fn is_reply(&self) -> bool {
        self.reply_to_user_id.is_some()
    }

    /// Serializes the record as one TSV line (no trailing newline).
    ///
    /// Tabs and line breaks inside the text are replaced by spaces, since
    /// the TSV layout has no quoting.
    pub fn to_tsv_line(&self) -> String {
        fn opt(v: Option<u64>) -> String {
            v.map(|v| v.to_string()).unwrap_or_default()
        }
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.message_id,
            self.user_id,
            opt(self.reply_to_message_id),
            opt(self.reply_to_user_id),
            format_timestamp(&self.timestamp),
            sanitize_field(&self.text)
        )
    }

    /// Serializes the record as one JSONL object (no trailing newline).
    pub fn to_jsonl_line(&self) -> String {
        serde_json::json!({
            "id": self.message_id,
            "user_id": self.user_id,
            "text": self.text,
            "in_reply_to_status_id": self.reply_to_message_id,
            "in_reply_to_user_id": self.reply_to_user_id,
            "created_at": format_timestamp(&self.timestamp),
        })
        .to_string()
    }
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Replaces characters that would break a tab-separated line.
pub fn sanitize_field(text: &str) -> Cow<'_, str> {
    if text.contains(['\t', '\n', '\r']) {
        Cow::Owned(text.replace(['\t', '\n', '\r'], " "))
    } else {
        Cow::Borrowed(text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Jsonl,
    Tsv,
}

impl InputFormat {
    /// Guesses the format from a file name; anything not ending in `.tsv`
    /// is treated as JSONL.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") => InputFormat::Tsv,
            _ => InputFormat::Jsonl,
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(InputFormat::Jsonl),
            "tsv" => Ok(InputFormat::Tsv),
            other => Err(format!("unknown input format `{other}`")),
        }
    }
}

/// Why a line did not become a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    Malformed,
    MissingRequiredField,
    InconsistentReplyFields,
    OutOfRange,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SkipReason::Malformed => "malformed",
            SkipReason::MissingRequiredField => "missing_required_field",
            SkipReason::InconsistentReplyFields => "inconsistent_reply_fields",
            SkipReason::OutOfRange => "out_of_range",
        };
        f.write_str(s)
    }
}

#[derive(Deserialize)]
struct JsonRecord<'a> {
    id: Option<u64>,
    user_id: Option<u64>,
    #[serde(borrow)]
    text: Option<Cow<'a, str>>,
    in_reply_to_status_id: Option<u64>,
    in_reply_to_user_id: Option<u64>,
    #[serde(borrow)]
    created_at: Option<Cow<'a, str>>,
}

/// Parses one input line. Never panics on bad input.
pub fn parse_record(line: &[u8], format: InputFormat) -> Result<MessageRecord, SkipReason> {
    match format {
        InputFormat::Jsonl => parse_jsonl(line),
        InputFormat::Tsv => parse_tsv(line),
    }
}

fn parse_jsonl(line: &[u8]) -> Result<MessageRecord, SkipReason> {
    let raw: JsonRecord<'_> = serde_json::from_slice(line).map_err(|_| SkipReason::Malformed)?;
    let (Some(message_id), Some(user_id), Some(text), Some(created_at)) =
        (raw.id, raw.user_id, raw.text, raw.created_at)
    else {
        return Err(SkipReason::MissingRequiredField);
    };
    validate(
        message_id,
        user_id,
        text.into_owned(),
        raw.in_reply_to_status_id,
        raw.in_reply_to_user_id,
        &created_at,
    )
}

fn parse_tsv(line: &[u8]) -> Result<MessageRecord, SkipReason> {
    let line = std::str::from_utf8(line).map_err(|_| SkipReason::Malformed)?;
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 6 {
        return Err(SkipReason::Malformed);
    }
    let required = |s: &str| -> Result<u64, SkipReason> {
        if s.is_empty() {
            Err(SkipReason::MissingRequiredField)
        } else {
            s.parse().map_err(|_| SkipReason::Malformed)
        }
    };
    let optional = |s: &str| -> Result<Option<u64>, SkipReason> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| SkipReason::Malformed)
        }
    };
    let message_id = required(cols[0])?;
    let user_id = required(cols[1])?;
    let reply_msg = optional(cols[2])?;
    let reply_user = optional(cols[3])?;
    if cols[4].is_empty() {
        return Err(SkipReason::MissingRequiredField);
    }
    validate(message_id, user_id, cols[5].to_owned(), reply_msg, reply_user, cols[4])
}

fn validate(
    message_id: u64,
    user_id: u64,
    text: String,
    reply_to_message_id: Option<u64>,
    reply_to_user_id: Option<u64>,
    created_at: &str,
) -> Result<MessageRecord, SkipReason> {
    if message_id == 0 || user_id == 0 || reply_to_message_id == Some(0) || reply_to_user_id == Some(0)
    {
        return Err(SkipReason::Malformed);
    }
    if reply_to_message_id.is_some() != reply_to_user_id.is_some() {
        return Err(SkipReason::InconsistentReplyFields);
    }
    let timestamp = parse_timestamp(created_at).ok_or(SkipReason::Malformed)?;
    Ok(MessageRecord {
        message_id,
        user_id,
        text,
        reply_to_message_id,
        reply_to_user_id,
        timestamp,
    })
}

/// Parses an ISO-8601 instant and truncates it to whole seconds.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let ts = DateTime::parse_from_rfc3339(s.trim()).ok()?.with_timezone(&Utc);
    DateTime::from_timestamp(ts.timestamp(), 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Day,
    Week,
    Month,
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "day" => Ok(Granularity::Day),
            "week" => Ok(Granularity::Week),
            "month" => Ok(Granularity::Month),
            other => Err(format!("unknown window granularity `{other}`")),
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Day => "day",
            Granularity::Week => "week",
            Granularity::Month => "month",
        })
    }
}

/// How timestamps map onto window indices. All boundaries are UTC midnight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub granularity: Granularity,
    pub anchor: NaiveDate,
}

/// Start of the first weekly window in the original 2008-09 collection.
pub const DEFAULT_ANCHOR: (i32, u32, u32) = (2008, 9, 9);

impl Default for WindowSpec {
    fn default() -> Self {
        let (y, m, d) = DEFAULT_ANCHOR;
        WindowSpec {
            granularity: Granularity::Week,
            anchor: NaiveDate::from_ymd_opt(y, m, d).expect("valid default anchor"),
        }
    }
}

impl WindowSpec {
    pub fn new(granularity: Granularity, anchor: NaiveDate) -> Self {
        WindowSpec { granularity, anchor }
    }

    fn anchor_instant(&self) -> DateTime<Utc> {
        self.anchor.and_time(NaiveTime::MIN).and_utc()
    }

    /// Window containing `ts`, or `None` when `ts` precedes the anchor.
    pub fn window_index(&self, ts: &DateTime<Utc>) -> Option<u32> {
        let secs = ts.timestamp() - self.anchor_instant().timestamp();
        if secs < 0 {
            return None;
        }
        let idx = match self.granularity {
            Granularity::Day => secs / 86_400,
            Granularity::Week => secs / (7 * 86_400),
            Granularity::Month => {
                let months = |d: NaiveDate| i64::from(d.year()) * 12 + i64::from(d.month0());
                months(ts.date_naive()) - months(self.anchor)
            }
        };
        u32::try_from(idx).ok()
    }

    /// First calendar date covered by window `index`. For month windows the
    /// first window starts at the anchor itself.
    pub fn window_start(&self, index: u32) -> NaiveDate {
        match self.granularity {
            Granularity::Day => self.anchor + chrono::Days::new(u64::from(index)),
            Granularity::Week => self.anchor + chrono::Days::new(7 * u64::from(index)),
            Granularity::Month => {
                if index == 0 {
                    self.anchor
                } else {
                    let first = self.anchor.with_day(1).expect("day 1 exists");
                    first + chrono::Months::new(index)
                }
            }
        }
    }
}

/// A directed reply arrow observed in one window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReplyEvent {
    pub window_index: u32,
    pub from_user: u64,
    pub to_user: u64,
}

/// One authored message text kept for word-bag construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserText {
    pub user_id: u64,
    pub message_id: u64,
    pub timestamp: i64,
    pub text: String,
}

/// Everything one window collected.
#[derive(Clone, Debug, Default)]
pub struct WindowStore {
    pub index: u32,
    /// Sorted, so the contents do not depend on input order.
    pub replies: Vec<ReplyEvent>,
    /// Sorted by (user, timestamp, message id).
    pub texts: Vec<UserText>,
    pub n_replies: u64,
    pub n_non_replies: u64,
    pub n_duplicates: u64,
    pub min_message_id: Option<u64>,
    pub max_message_id: Option<u64>,
}

impl WindowStore {
    /// Unique records retained in this window.
    pub fn n_records(&self) -> u64 {
        self.n_replies + self.n_non_replies
    }

    pub fn coverage(&self) -> Result<Coverage, CoverageError> {
        match (self.min_message_id, self.max_message_id) {
            (Some(lo), Some(hi)) if self.n_records() >= 2 => {
                Coverage::from_counts(self.n_records(), hi - lo)
            }
            _ => Err(CoverageError::TooFewRecords(self.n_records())),
        }
    }

    /// Texts grouped by author in ascending user order.
    pub fn texts_by_user(&self) -> impl Iterator<Item = (u64, &[UserText])> {
        self.texts
            .chunk_by(|a, b| a.user_id == b.user_id)
            .map(|chunk| (chunk[0].user_id, chunk))
    }
}

#[derive(Default)]
struct WindowBuilder {
    store: WindowStore,
    seen: HashSet<u64>,
}

/// Tallies over a whole input stream.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestCounters {
    /// Non-blank input lines (or records pushed directly).
    pub records_in: u64,
    pub malformed: u64,
    pub missing_required_field: u64,
    pub inconsistent_reply_fields: u64,
    pub out_of_range: u64,
    pub duplicates: u64,
}

impl IngestCounters {
    pub fn skipped(&self) -> u64 {
        self.malformed + self.missing_required_field + self.inconsistent_reply_fields + self.out_of_range
    }

    fn count_skip(&mut self, reason: SkipReason) {
        match reason {
            SkipReason::Malformed => self.malformed += 1,
            SkipReason::MissingRequiredField => self.missing_required_field += 1,
            SkipReason::InconsistentReplyFields => self.inconsistent_reply_fields += 1,
            SkipReason::OutOfRange => self.out_of_range += 1,
        }
    }
}

/// The result of partitioning a stream.
#[derive(Clone, Debug)]
pub struct Partition {
    pub spec: WindowSpec,
    /// Ascending by window index; only windows that received a record.
    pub windows: Vec<WindowStore>,
    pub counters: IngestCounters,
}

impl Partition {
    pub fn window(&self, index: u32) -> Option<&WindowStore> {
        self.windows
            .binary_search_by_key(&index, |w| w.index)
            .ok()
            .map(|i| &self.windows[i])
    }
}

/// Incremental window partitioner; feed it lines or records, then call
/// [`Partitioner::finish`].
pub struct Partitioner {
    spec: WindowSpec,
    windows: BTreeMap<u32, WindowBuilder>,
    counters: IngestCounters,
}

impl Partitioner {
    pub fn new(spec: WindowSpec) -> Self {
        Partitioner {
            spec,
            windows: BTreeMap::new(),
            counters: IngestCounters::default(),
        }
    }

    /// Parses and routes one line. Blank lines are ignored without counting.
    pub fn push_line(&mut self, line: &[u8], format: InputFormat) {
        if line.iter().all(u8::is_ascii_whitespace) {
            return;
        }
        match parse_record(line, format) {
            Ok(rec) => self.push(rec),
            Err(reason) => {
                self.counters.records_in += 1;
                self.counters.count_skip(reason);
            }
        }
    }

    /// Reads every line from `reader`.
    pub fn push_reader<R: BufRead>(&mut self, mut reader: R, format: InputFormat) -> io::Result<()> {
        let mut buf = Vec::with_capacity(1024);
        loop {
            buf.clear();
            if reader.read_until(b'\n', &mut buf)? == 0 {
                return Ok(());
            }
            self.push_line(&buf, format);
        }
    }

    pub fn push(&mut self, rec: MessageRecord) {
        self.counters.records_in += 1;
        let Some(index) = self.spec.window_index(&rec.timestamp) else {
            self.counters.count_skip(SkipReason::OutOfRange);
            return;
        };
        let w = self.windows.entry(index).or_insert_with(|| WindowBuilder {
            store: WindowStore {
                index,
                ..WindowStore::default()
            },
            seen: HashSet::new(),
        });
        if !w.seen.insert(rec.message_id) {
            w.store.n_duplicates += 1;
            self.counters.duplicates += 1;
            return;
        }
        let s = &mut w.store;
        s.min_message_id = Some(s.min_message_id.map_or(rec.message_id, |m| m.min(rec.message_id)));
        s.max_message_id = Some(s.max_message_id.map_or(rec.message_id, |m| m.max(rec.message_id)));
        if let Some(to_user) = rec.reply_to_user_id {
            s.n_replies += 1;
            s.replies.push(ReplyEvent {
                window_index: index,
                from_user: rec.user_id,
                to_user,
            });
        } else {
            s.n_non_replies += 1;
        }
        s.texts.push(UserText {
            user_id: rec.user_id,
            message_id: rec.message_id,
            timestamp: rec.timestamp.timestamp(),
            text: rec.text,
        });
    }

    pub fn finish(self) -> Partition {
        let windows = self
            .windows
            .into_values()
            .map(|b| {
                let mut s = b.store;
                s.replies.sort_unstable();
                s.texts
                    .sort_unstable_by_key(|t| (t.user_id, t.timestamp, t.message_id));
                s
            })
            .collect();
        Partition {
            spec: self.spec,
            windows,
            counters: self.counters,
        }
    }
}

/// Buckets `records` into windows. Input order does not matter.
pub fn window_partition<I>(records: I, spec: WindowSpec) -> Partition
where
    I: IntoIterator<Item = MessageRecord>,
{
    let mut p = Partitioner::new(spec);
    for rec in records {
        p.push(rec);
    }
    p.finish()
}

/// Share of all messages that the sample observed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub observed: u64,
    pub total_estimate: u64,
    pub percent: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverageError {
    #[error("coverage needs at least two records, got {0}")]
    TooFewRecords(u64),
    #[error("message id range is empty")]
    EmptyIdRange,
}

impl Coverage {
    pub fn from_counts(observed: u64, total_estimate: u64) -> Result<Coverage, CoverageError> {
        if total_estimate == 0 {
            return Err(CoverageError::EmptyIdRange);
        }
        Ok(Coverage {
            observed,
            total_estimate,
            percent: 100.0 * observed as f64 / total_estimate as f64,
        })
    }
}

/// Estimates coverage from the message ids of one window. Ids are assumed
/// sequential in time, so `max - min` approximates the total message count.
pub fn estimate_coverage<I>(message_ids: I) -> Result<Coverage, CoverageError>
where
    I: IntoIterator<Item = u64>,
{
    let mut n = 0u64;
    let mut lo = u64::MAX;
    let mut hi = 0u64;
    for id in message_ids {
        n += 1;
        lo = lo.min(id);
        hi = hi.max(id);
    }
    if n < 2 {
        return Err(CoverageError::TooFewRecords(n));
    }
    Coverage::from_counts(n, hi - lo)
}

/// Writes `from_user<TAB>to_user` lines.
pub fn write_replies<W: Write>(mut w: W, replies: &[ReplyEvent]) -> io::Result<()> {
    for r in replies {
        writeln!(w, "{}\t{}", r.from_user, r.to_user)?;
    }
    Ok(())
}

pub fn read_replies<R: BufRead>(r: R, window_index: u32) -> io::Result<Vec<ReplyEvent>> {
    let mut out = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split('\t');
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad_line("replies", lineno));
        };
        let (Ok(from_user), Ok(to_user)) = (a.parse(), b.parse()) else {
            return Err(bad_line("replies", lineno));
        };
        out.push(ReplyEvent {
            window_index,
            from_user,
            to_user,
        });
    }
    Ok(out)
}

/// Writes `user_id<TAB>text` lines.
pub fn write_texts<W: Write>(mut w: W, texts: &[UserText]) -> io::Result<()> {
    for t in texts {
        writeln!(w, "{}\t{}", t.user_id, sanitize_field(&t.text))?;
    }
    Ok(())
}

pub fn read_texts<R: BufRead>(r: R) -> io::Result<Vec<(u64, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let Some((user, text)) = line.split_once('\t') else {
            return Err(bad_line("texts", lineno));
        };
        let user = user.parse().map_err(|_| bad_line("texts", lineno))?;
        out.push((user, text.to_owned()));
    }
    Ok(out)
}

fn bad_line(kind: &str, lineno: usize) -> io::Error {
    io::Error::new(
        io::ErrorKind::InvalidData,
        format!("{kind} artifact: bad line {}", lineno + 1),
    )
}
