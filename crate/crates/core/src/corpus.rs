//! Corpus types shared by every segmenter, plus the line-oriented file format.
//!
//! Raw text may contain U+0020. Before segmentation every space is replaced by
//! the sentinel U+2581 so that a segmented line can be written with plain
//! spaces as token separators and still be decoded back to the original text.

use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Stands in for U+0020 inside tokens.
pub const SENTINEL: char = '\u{2581}';

/// One sentence of raw (not sentinel-encoded) text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line(String);

impl Line {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if let Some(c) = text.chars().find(|&c| c == '\n' || c == '\r') {
            return Err(Error::data(format!(
                "line contains a line terminator U+{:04X}",
                c as u32
            )));
        }
        if text.contains(SENTINEL) {
            return Err(Error::data("line contains the reserved character U+2581"));
        }
        Ok(Line(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The text with every space replaced by [`SENTINEL`].
    pub fn encoded(&self) -> String {
        self.0.replace(' ', "\u{2581}")
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<&str> for Line {
    type Error = Error;

    fn try_from(s: &str) -> Result<Self> {
        Line::new(s)
    }
}

/// Replaces every U+0020 with [`SENTINEL`]. Input already containing the
/// sentinel is rejected.
pub fn sentinel_encode(text: &str) -> Result<String> {
    if text.contains(SENTINEL) {
        return Err(Error::data("text contains the reserved character U+2581"));
    }
    Ok(text.replace(' ', "\u{2581}"))
}

pub fn sentinel_decode(text: &str) -> String {
    text.replace(SENTINEL, " ")
}

/// Family of a segmentation scheme.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Character,
    Bpe { merges: usize },
    LongestMatch,
    MaximalMatch,
    Word,
    External(String),
}

/// Identifies the strategy that produced a segmentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SchemeId {
    pub kind: SchemeKind,
    pub label: String,
}

impl SchemeId {
    pub fn new(kind: SchemeKind) -> Self {
        let label = match &kind {
            SchemeKind::Character => "character".to_string(),
            SchemeKind::Bpe { merges } => format!("bpe{merges}"),
            SchemeKind::LongestMatch => "longest".to_string(),
            SchemeKind::MaximalMatch => "maximal".to_string(),
            SchemeKind::Word => "word".to_string(),
            SchemeKind::External(name) => name.clone(),
        };
        SchemeId { kind, label }
    }

    pub fn character() -> Self {
        Self::new(SchemeKind::Character)
    }

    pub fn bpe(merges: usize) -> Self {
        Self::new(SchemeKind::Bpe { merges })
    }

    pub fn longest_match() -> Self {
        Self::new(SchemeKind::LongestMatch)
    }

    pub fn maximal_match() -> Self {
        Self::new(SchemeKind::MaximalMatch)
    }

    pub fn word() -> Self {
        Self::new(SchemeKind::Word)
    }

    pub fn external(name: impl Into<String>) -> Self {
        Self::new(SchemeKind::External(name.into()))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Recovers a scheme from a label such as `bpe5000` or `character`.
    /// Unrecognized labels become external schemes of that name.
    pub fn from_label(label: &str) -> Self {
        let kind = match label {
            "character" | "char" => SchemeKind::Character,
            "longest" => SchemeKind::LongestMatch,
            "maximal" => SchemeKind::MaximalMatch,
            "word" => SchemeKind::Word,
            _ => match label.strip_prefix("bpe").and_then(|n| n.parse().ok()) {
                Some(merges) if merges > 0 => SchemeKind::Bpe { merges },
                _ => SchemeKind::External(label.to_string()),
            },
        };
        SchemeId {
            kind,
            label: label.to_string(),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// A sentence split into non-empty tokens, spaces sentinel-encoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedLine {
    tokens: Vec<String>,
    scheme: SchemeId,
}

impl SegmentedLine {
    /// Checks that no token is empty or contains a space.
    pub fn new(tokens: Vec<String>, scheme: SchemeId) -> Result<Self> {
        for (i, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(Error::data(format!("token {i} is empty")));
            }
            if tok.contains([' ', '\n', '\r']) {
                return Err(Error::data(format!(
                    "token {i} contains a space or line terminator"
                )));
            }
        }
        Ok(SegmentedLine { tokens, scheme })
    }

    /// Callers guarantee the token invariants.
    pub(crate) fn from_parts(tokens: Vec<String>, scheme: SchemeId) -> Self {
        debug_assert!(tokens.iter().all(|t| !t.is_empty() && !t.contains(' ')));
        SegmentedLine { tokens, scheme }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn scheme(&self) -> &SchemeId {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }

    /// Tokens joined by single spaces, as written to segmented files.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Concatenates the tokens and decodes the sentinel back to spaces.
pub fn detokenize(seg: &SegmentedLine) -> String {
    sentinel_decode(&seg.tokens.concat())
}

/// Aligned source/target segmented sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    pairs: Vec<(SegmentedLine, SegmentedLine)>,
}

impl ParallelCorpus {
    pub fn new(source: Vec<SegmentedLine>, target: Vec<SegmentedLine>) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::data(format!(
                "source has {} lines but target has {}",
                source.len(),
                target.len()
            )));
        }
        Ok(ParallelCorpus {
            pairs: source.into_iter().zip(target).collect(),
        })
    }

    pub fn pairs(&self) -> &[(SegmentedLine, SegmentedLine)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &SegmentedLine> {
        self.pairs.iter().map(|(s, _)| s)
    }

    pub fn targets(&self) -> impl Iterator<Item = &SegmentedLine> {
        self.pairs.iter().map(|(_, t)| t)
    }

    pub(crate) fn extend(
        &mut self,
        pairs: impl IntoIterator<Item = (SegmentedLine, SegmentedLine)>,
    ) {
        self.pairs.extend(pairs);
    }

    /// Writes both sides to their own files; line i of each file is pair i.
    pub fn save(&self, source_path: &Path, target_path: &Path) -> Result<()> {
        save_segmented(self.sources(), source_path)?;
        save_segmented(self.targets(), target_path)
    }
}

/// Splits a byte buffer into lines, validating UTF-8 and the [`Line`]
/// invariants. Line numbers in errors are 1-based.
fn split_lines(bytes: &[u8]) -> Result<Vec<&str>> {
    if bytes.is_empty() {
        return Ok(Vec::new());
    }
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    body.split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, raw)| {
            std::str::from_utf8(raw)
                .map_err(|e| Error::data(format!("line {}: invalid UTF-8: {e}", i + 1)))
        })
        .collect()
}

/// Parses raw text lines from a reader.
pub fn read_corpus(mut reader: impl Read) -> Result<Vec<Line>> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<stream>", e))?;
    split_lines(&bytes)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            Line::new(s).map_err(|e| Error::data(format!("line {}: {}", i + 1, strip_kind(&e))))
        })
        .collect()
}

/// Reads UTF-8 lines without the [`Line`] checks, e.g. translation output.
pub fn read_text_lines(mut reader: impl Read) -> Result<Vec<String>> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<stream>", e))?;
    Ok(split_lines(&bytes)?.into_iter().map(String::from).collect())
}

pub fn load_corpus(path: &Path) -> Result<Vec<Line>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file).map_err(|e| with_path(e, path))
}

/// Parses a segmented file: tokens separated by exactly one space.
pub fn read_segmented(mut reader: impl Read, scheme: &SchemeId) -> Result<Vec<SegmentedLine>> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<stream>", e))?;
    split_lines(&bytes)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let tokens = if s.is_empty() {
                Vec::new()
            } else {
                s.split(' ').map(str::to_string).collect()
            };
            SegmentedLine::new(tokens, scheme.clone())
                .map_err(|e| Error::data(format!("line {}: {}", i + 1, strip_kind(&e))))
        })
        .collect()
}

pub fn load_segmented(path: &Path, scheme: &SchemeId) -> Result<Vec<SegmentedLine>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_segmented(file, scheme).map_err(|e| with_path(e, path))
}

/// Writes one line per sentence, tokens joined by a single space. The last
/// line is always newline-terminated.
pub fn write_segmented<'a>(
    lines: impl IntoIterator<Item = &'a SegmentedLine>,
    writer: impl Write,
) -> io::Result<()> {
    let mut w = BufWriter::new(writer);
    for line in lines {
        for (i, tok) in line.tokens.iter().enumerate() {
            if i > 0 {
                w.write_all(b" ")?;
            }
            w.write_all(tok.as_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn save_segmented<'a>(
    lines: impl IntoIterator<Item = &'a SegmentedLine>,
    path: &Path,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_segmented(lines, file).map_err(|e| Error::io(path, e))
}

fn strip_kind(e: &Error) -> String {
    match e {
        Error::Data(m) | Error::Usage(m) => m.clone(),
        other => other.to_string(),
    }
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}
