//! Byte-pair-encoding style subword learning and application over Unicode
//! scalar values.
//!
//! Learning starts from one symbol per code point and repeatedly merges the
//! most frequent adjacent pair. Pair frequencies count every adjacent
//! position, so `aaa` holds the pair `(a, a)` twice; replacement scans left to
//! right and never overlaps, so merging `(a, a)` in `aaa` yields `[aa, a]`.
//! Ties between equally frequent pairs go to the smallest `(left, right)` in
//! code-point order.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::corpus::{Line, SchemeId, SegmentedLine, SENTINEL};
use crate::error::{Error, Result};

/// Appended to every word in [`BpeMode::Word`].
pub const END_OF_WORD: &str = "</w>";

const HEADER_PREFIX: &str = "#segcomb merges v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BpeMode {
    /// Whole sentence is one symbol sequence (scriptio continua).
    #[default]
    Line,
    /// Sentence is split at spaces, merges never cross word boundaries.
    Word,
}

impl BpeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BpeMode::Line => "line",
            BpeMode::Word => "word",
        }
    }
}

impl fmt::Display for BpeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BpeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(BpeMode::Line),
            "word" => Ok(BpeMode::Word),
            other => Err(Error::usage(format!("unknown BPE mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergePair {
    pub left: String,
    pub right: String,
    /// Position in learning order, starting at 0.
    pub rank: usize,
}

impl MergePair {
    pub fn merged(&self) -> String {
        [self.left.as_str(), self.right.as_str()].concat()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BpeConfig {
    pub merges: usize,
    pub mode: BpeMode,
    pub min_frequency: u64,
}

impl BpeConfig {
    pub fn new(merges: usize) -> Self {
        BpeConfig {
            merges,
            mode: BpeMode::Line,
            min_frequency: 2,
        }
    }

    pub fn mode(mut self, mode: BpeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn min_frequency(mut self, min_frequency: u64) -> Self {
        self.min_frequency = min_frequency;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.merges == 0 {
            return Err(Error::usage("number of merges must be positive"));
        }
        if self.min_frequency < 2 {
            return Err(Error::usage("minimum pair frequency must be at least 2"));
        }
        Ok(())
    }
}

/// Learned merges in rank order.
#[derive(Clone)]
pub struct MergeTable {
    merges: Vec<MergePair>,
    mode: BpeMode,
    n_requested: usize,
    index: ApplyIndex,
}

impl MergeTable {
    /// Builds a table from `(left, right)` pairs given in rank order.
    pub fn new(pairs: Vec<(String, String)>, mode: BpeMode, n_requested: usize) -> Result<Self> {
        if n_requested == 0 {
            return Err(Error::usage("requested merge count must be positive"));
        }
        if pairs.len() > n_requested {
            return Err(Error::data(format!(
                "{} merges exceed the requested count {n_requested}",
                pairs.len()
            )));
        }
        let mut seen = HashSet::new();
        let mut merges = Vec::with_capacity(pairs.len());
        for (rank, (left, right)) in pairs.into_iter().enumerate() {
            for side in [&left, &right] {
                if side.is_empty() || side.contains([' ', '\n', '\r']) {
                    return Err(Error::data(format!(
                        "merge {rank}: symbol {side:?} is empty or contains whitespace"
                    )));
                }
            }
            if !seen.insert((left.clone(), right.clone())) {
                return Err(Error::data(format!(
                    "merge {rank}: duplicate pair ({left}, {right})"
                )));
            }
            merges.push(MergePair { left, right, rank });
        }
        let index = ApplyIndex::build(&merges, mode);
        Ok(MergeTable {
            merges,
            mode,
            n_requested,
            index,
        })
    }

    pub fn merges(&self) -> &[MergePair] {
        &self.merges
    }

    pub fn mode(&self) -> BpeMode {
        self.mode
    }

    pub fn n_requested(&self) -> usize {
        self.n_requested
    }

    pub fn n_performed(&self) -> usize {
        self.merges.len()
    }

    pub fn scheme(&self) -> SchemeId {
        SchemeId::bpe(self.n_requested)
    }

    /// The table restricted to its first `n` merges.
    pub fn truncated(&self, n: usize) -> MergeTable {
        let pairs = self.merges[..n.min(self.merges.len())]
            .iter()
            .map(|m| (m.left.clone(), m.right.clone()))
            .collect();
        MergeTable::new(pairs, self.mode, n.max(1)).expect("prefix of a valid table is valid")
    }

    /// Segments a line by replaying the merges in rank order.
    pub fn apply(&self, line: &Line) -> SegmentedLine {
        let encoded = line.encoded();
        let tokens = match self.mode {
            BpeMode::Line => {
                let mut syms = self.index.initial(&encoded, 0, encoded.len(), false);
                self.index.merge_all(&mut syms);
                syms.iter()
                    .map(|s| encoded[s.start..s.end].to_string())
                    .collect()
            }
            BpeMode::Word => {
                let mut tokens = Vec::new();
                for (start, end, last) in word_spans(&encoded) {
                    let mut syms = self.index.initial(&encoded, start, end, true);
                    self.index.merge_all(&mut syms);
                    // the final symbol always carries the end-of-word marker;
                    // the boundary sentinel takes its place
                    if !last {
                        syms.last_mut().expect("word has a marker").end += SENTINEL.len_utf8();
                    }
                    tokens.extend(
                        syms.iter()
                            .filter(|s| s.end > s.start)
                            .map(|s| encoded[s.start..s.end].to_string()),
                    );
                }
                tokens
            }
        };
        SegmentedLine::from_parts(tokens, self.scheme())
    }

    /// The applier's symbol sequence for a line before any marker stripping:
    /// in word mode every word ends with [`END_OF_WORD`] and sentinels are
    /// dropped. Matches the learner's final sequences for training lines.
    pub fn symbols(&self, line: &Line) -> Vec<String> {
        let encoded = line.encoded();
        let render = |syms: &[Sym], out: &mut Vec<String>| {
            for s in syms {
                let mut t = encoded[s.start..s.end].to_string();
                if s.eow {
                    t.push_str(END_OF_WORD);
                }
                out.push(t);
            }
        };
        let mut out = Vec::new();
        match self.mode {
            BpeMode::Line => {
                let mut syms = self.index.initial(&encoded, 0, encoded.len(), false);
                self.index.merge_all(&mut syms);
                render(&syms, &mut out);
            }
            BpeMode::Word => {
                for (start, end, _) in word_spans(&encoded) {
                    let mut syms = self.index.initial(&encoded, start, end, true);
                    self.index.merge_all(&mut syms);
                    render(&syms, &mut out);
                }
            }
        }
        out
    }

    pub fn write(&self, writer: impl Write) -> io::Result<()> {
        let mut w = BufWriter::new(writer);
        writeln!(
            w,
            "{HEADER_PREFIX} mode={} requested={}",
            self.mode, self.n_requested
        )?;
        for m in &self.merges {
            writeln!(w, "{} {}", m.left, m.right)?;
        }
        w.flush()
    }

    pub fn read(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::data(format!("merge table is not valid UTF-8: {e}")))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::data("line 1: missing merge table header"))?;
        let (mode, n_requested) = parse_header(header)?;
        let mut pairs = Vec::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let mut parts = line.split(' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                    pairs.push((l.to_string(), r.to_string()))
                }
                _ => {
                    return Err(Error::data(format!(
                        "line {lineno}: expected `left right` separated by exactly one space"
                    )))
                }
            }
        }
        MergeTable::new(pairs, mode, n_requested)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(file).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        MergeTable::read(file).map_err(|e| match e {
            Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

impl PartialEq for MergeTable {
    fn eq(&self, other: &Self) -> bool {
        self.merges == other.merges
            && self.mode == other.mode
            && self.n_requested == other.n_requested
    }
}

impl Eq for MergeTable {}

impl fmt::Debug for MergeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MergeTable")
            .field("mode", &self.mode)
            .field("n_requested", &self.n_requested)
            .field("merges", &self.merges)
            .finish()
    }
}

fn parse_header(header: &str) -> Result<(BpeMode, usize)> {
    let bad = || Error::data(format!("line 1: malformed merge table header {header:?}"));
    let rest = header.strip_prefix(HEADER_PREFIX).ok_or_else(bad)?;
    let mut fields = rest.split(' ');
    if fields.next() != Some("") {
        return Err(bad());
    }
    let mode = fields
        .next()
        .and_then(|f| f.strip_prefix("mode="))
        .and_then(|m| m.parse().ok())
        .ok_or_else(bad)?;
    let requested = fields
        .next()
        .and_then(|f| f.strip_prefix("requested="))
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .ok_or_else(bad)?;
    if fields.next().is_some() {
        return Err(bad());
    }
    Ok((mode, requested))
}

/// `(start, end, is_last)` byte spans of the sentinel-separated words.
fn word_spans(encoded: &str) -> Vec<(usize, usize, bool)> {
    let mut spans = Vec::new();
    let mut start = 0;
    for (i, c) in encoded.char_indices() {
        if c == SENTINEL {
            spans.push((start, i, false));
            start = i + c.len_utf8();
        }
    }
    spans.push((start, encoded.len(), true));
    spans
}

const UNKNOWN: u32 = u32::MAX;

/// A symbol during application: a span of the encoded line, optionally
/// followed by the end-of-word marker.
#[derive(Debug, Clone, Copy)]
struct Sym {
    id: u32,
    start: usize,
    end: usize,
    eow: bool,
}

#[derive(Clone, Default)]
struct ApplyIndex {
    ids: FxHashMap<String, u32>,
    /// `(left, right) -> rank`
    ranks: FxHashMap<(u32, u32), usize>,
    /// `rank -> (left, right, merged)`
    by_rank: Vec<(u32, u32, u32)>,
}

impl ApplyIndex {
    fn build(merges: &[MergePair], mode: BpeMode) -> Self {
        let mut index = ApplyIndex::default();
        if mode == BpeMode::Word {
            index.intern(END_OF_WORD);
        }
        for m in merges {
            let l = index.intern(&m.left);
            let r = index.intern(&m.right);
            let merged = index.intern(&m.merged());
            index.ranks.insert((l, r), m.rank);
            index.by_rank.push((l, r, merged));
        }
        index
    }

    fn intern(&mut self, s: &str) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(s.to_string()).or_insert(next)
    }

    fn lookup(&self, s: &str) -> u32 {
        self.ids.get(s).copied().unwrap_or(UNKNOWN)
    }

    fn initial(&self, text: &str, start: usize, end: usize, with_eow: bool) -> Vec<Sym> {
        let mut buf = [0u8; 4];
        let mut syms: Vec<Sym> = text[start..end]
            .char_indices()
            .map(|(i, c)| Sym {
                id: self.lookup(c.encode_utf8(&mut buf)),
                start: start + i,
                end: start + i + c.len_utf8(),
                eow: false,
            })
            .collect();
        if with_eow {
            syms.push(Sym {
                id: self.lookup(END_OF_WORD),
                start: end,
                end,
                eow: true,
            });
        }
        syms
    }

    fn merge_all(&self, syms: &mut Vec<Sym>) {
        let mut floor: Option<usize> = None;
        loop {
            let next = syms
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].id, w[1].id)).copied())
                .filter(|&rank| floor.is_none_or(|f| rank > f))
                .min();
            let Some(rank) = next else { break };
            let (left, right, merged) = self.by_rank[rank];
            replace_syms(syms, left, right, merged);
            floor = Some(rank);
        }
    }
}

fn replace_syms(syms: &mut Vec<Sym>, left: u32, right: u32, merged: u32) {
    let mut out = Vec::with_capacity(syms.len());
    let mut i = 0;
    while i < syms.len() {
        if i + 1 < syms.len() && syms[i].id == left && syms[i + 1].id == right {
            out.push(Sym {
                id: merged,
                start: syms[i].start,
                end: syms[i + 1].end,
                eow: syms[i + 1].eow,
            });
            i += 2;
        } else {
            out.push(syms[i]);
            i += 1;
        }
    }
    *syms = out;
}

/// Replaces non-overlapping `(left, right)` occurrences left to right.
fn replace_ids(seq: &[u32], left: u32, right: u32, merged: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(seq.len());
    let mut i = 0;
    while i < seq.len() {
        if i + 1 < seq.len() && seq[i] == left && seq[i + 1] == right {
            out.push(merged);
            i += 2;
        } else {
            out.push(seq[i]);
            i += 1;
        }
    }
    out
}

#[derive(Default)]
struct Vocab {
    ids: FxHashMap<Arc<str>, u32>,
    strs: Vec<Arc<str>>,
}

impl Vocab {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.strs.len() as u32;
        let s: Arc<str> = Arc::from(s);
        self.strs.push(s.clone());
        self.ids.insert(s, id);
        id
    }
}

/// Heap entry: highest count first, then smallest `(left, right)`.
struct Candidate {
    count: u64,
    left: Arc<str>,
    right: Arc<str>,
    pair: (u32, u32),
}

impl Candidate {
    fn key(&self) -> (u64, Reverse<(&str, &str)>) {
        (self.count, Reverse((&self.left, &self.right)))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Distinct symbol sequences with their corpus frequency.
struct Learner {
    vocab: Vocab,
    seqs: Vec<Vec<u32>>,
    weights: Vec<u64>,
    counts: FxHashMap<(u32, u32), u64>,
    occurrences: FxHashMap<(u32, u32), FxHashSet<usize>>,
    heap: BinaryHeap<Candidate>,
}

impl Learner {
    fn new(units: Vec<(String, u64)>, mode: BpeMode) -> Self {
        let mut vocab = Vocab::default();
        let eow = (mode == BpeMode::Word).then(|| vocab.intern(END_OF_WORD));
        let mut buf = [0u8; 4];
        let mut seqs = Vec::with_capacity(units.len());
        let mut weights = Vec::with_capacity(units.len());
        for (text, weight) in units {
            let mut seq: Vec<u32> = text
                .chars()
                .map(|c| vocab.intern(c.encode_utf8(&mut buf)))
                .collect();
            seq.extend(eow);
            seqs.push(seq);
            weights.push(weight);
        }
        let mut learner = Learner {
            vocab,
            seqs,
            weights,
            counts: FxHashMap::default(),
            occurrences: FxHashMap::default(),
            heap: BinaryHeap::new(),
        };
        for (idx, seq) in learner.seqs.iter().enumerate() {
            for w in seq.windows(2) {
                let p = (w[0], w[1]);
                *learner.counts.entry(p).or_default() += learner.weights[idx];
                learner.occurrences.entry(p).or_default().insert(idx);
            }
        }
        let pairs: Vec<_> = learner.counts.iter().map(|(&p, &c)| (p, c)).collect();
        for (p, c) in pairs {
            learner.push(p, c);
        }
        learner
    }

    fn push(&mut self, pair: (u32, u32), count: u64) {
        self.heap.push(Candidate {
            count,
            left: self.vocab.strs[pair.0 as usize].clone(),
            right: self.vocab.strs[pair.1 as usize].clone(),
            pair,
        });
    }

    /// Pops the current best pair, discarding or refreshing stale entries.
    fn best(&mut self) -> Option<((u32, u32), u64)> {
        while let Some(top) = self.heap.pop() {
            let current = self.counts.get(&top.pair).copied().unwrap_or(0);
            if current == top.count {
                return Some((top.pair, current));
            }
            if current > 0 && current < top.count {
                self.push(top.pair, current);
            }
        }
        None
    }

    fn merge(&mut self, pair: (u32, u32)) {
        let left = self.vocab.strs[pair.0 as usize].clone();
        let right = self.vocab.strs[pair.1 as usize].clone();
        let merged = self.vocab.intern(&[&*left, &*right].concat());
        let mut affected: Vec<usize> = self
            .occurrences
            .remove(&pair)
            .unwrap_or_default()
            .into_iter()
            .collect();
        affected.sort_unstable();

        let mut delta: FxHashMap<(u32, u32), i64> = FxHashMap::default();
        for idx in affected {
            let weight = self.weights[idx] as i64;
            let old = &self.seqs[idx];
            for w in old.windows(2) {
                *delta.entry((w[0], w[1])).or_default() -= weight;
            }
            let new = replace_ids(old, pair.0, pair.1, merged);
            for w in new.windows(2) {
                let p = (w[0], w[1]);
                *delta.entry(p).or_default() += weight;
                self.occurrences.entry(p).or_default().insert(idx);
            }
            self.seqs[idx] = new;
        }

        let mut raised = Vec::new();
        for (p, d) in delta {
            if d == 0 {
                continue;
            }
            let count = self.counts.entry(p).or_default();
            *count = (*count as i64 + d) as u64;
            if *count == 0 {
                self.counts.remove(&p);
                self.occurrences.remove(&p);
            } else if d > 0 {
                raised.push((p, *count));
            }
        }
        debug_assert!(!self.counts.contains_key(&pair));
        for (p, c) in raised {
            self.push(p, c);
        }
    }

    fn render(&self, seq: usize) -> Vec<String> {
        self.seqs[seq]
            .iter()
            .map(|&id| self.vocab.strs[id as usize].to_string())
            .collect()
    }
}

/// Learns up to `config.merges` merges from the corpus.
pub fn learn_bpe(corpus: &[Line], config: &BpeConfig) -> Result<MergeTable> {
    learn_bpe_traced(corpus, config).map(|(table, _)| table)
}

/// Like [`learn_bpe`] but also returns, for every input line, the learner's
/// final symbol sequence (word mode: words concatenated, each ending with
/// [`END_OF_WORD`]).
pub fn learn_bpe_traced(
    corpus: &[Line],
    config: &BpeConfig,
) -> Result<(MergeTable, Vec<Vec<String>>)> {
    config.validate()?;

    let encoded: Vec<String> = corpus.iter().map(Line::encoded).collect();
    let mut freq: FxHashMap<&str, u64> = FxHashMap::default();
    for text in &encoded {
        match config.mode {
            BpeMode::Line => *freq.entry(text).or_default() += 1,
            BpeMode::Word => {
                for (s, e, _) in word_spans(text) {
                    *freq.entry(&text[s..e]).or_default() += 1;
                }
            }
        }
    }
    let mut units: Vec<(String, u64)> = freq.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    units.sort_unstable();
    let positions: HashMap<String, usize> = units
        .iter()
        .enumerate()
        .map(|(i, (k, _))| (k.clone(), i))
        .collect();

    let mut learner = Learner::new(units, config.mode);
    let mut pairs = Vec::new();
    while pairs.len() < config.merges {
        let Some((pair, count)) = learner.best() else {
            break;
        };
        if count < config.min_frequency {
            break;
        }
        pairs.push((
            learner.vocab.strs[pair.0 as usize].to_string(),
            learner.vocab.strs[pair.1 as usize].to_string(),
        ));
        learner.merge(pair);
    }

    let finals = encoded
        .iter()
        .map(|text| match config.mode {
            BpeMode::Line => learner.render(positions[text.as_str()]),
            BpeMode::Word => word_spans(text)
                .into_iter()
                .flat_map(|(s, e, _)| learner.render(positions[&text[s..e]]))
                .collect(),
        })
        .collect();
    let table = MergeTable::new(pairs, config.mode, config.merges)?;
    Ok((table, finals))
}

/// Segments a line with a merge table.
pub fn apply_bpe(line: &Line, table: &MergeTable) -> SegmentedLine {
    table.apply(line)
}
