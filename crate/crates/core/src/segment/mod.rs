//! Segmentation strategies other than BPE.

mod dict;
mod external;
mod matching;

use std::str::FromStr;

use unicode_segmentation::UnicodeSegmentation;

use crate::corpus::{Line, SchemeId, SegmentedLine};
use crate::error::Error;

pub use dict::TrieDictionary;
pub use external::{external_segment, ExternalCommand};
pub use matching::{
    longest_match_segment, longest_match_tokens, maximal_match_segment, maximal_match_tokens,
    SegmentToken,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Granularity {
    #[default]
    Codepoint,
    /// Extended grapheme clusters (UAX #29).
    Grapheme,
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "codepoint" => Ok(Granularity::Codepoint),
            "grapheme" => Ok(Granularity::Grapheme),
            other => Err(Error::usage(format!("unknown granularity `{other}`"))),
        }
    }
}

/// One token per code point or per grapheme cluster.
pub fn char_segment(line: &Line, granularity: Granularity) -> SegmentedLine {
    let encoded = line.encoded();
    let tokens = match granularity {
        Granularity::Codepoint => encoded.chars().map(String::from).collect(),
        Granularity::Grapheme => encoded.graphemes(true).map(String::from).collect(),
    };
    SegmentedLine::from_parts(tokens, SchemeId::character())
}

/// Whitespace tokenizer for the English side.
///
/// Splits on runs of spaces, optionally lowercases, and detaches leading and
/// trailing ASCII punctuation one character per token. Unlike the other
/// segmenters this one normalizes its input and is not reversible.
pub fn word_segment(line: &Line, lowercase: bool) -> SegmentedLine {
    let text = if lowercase {
        line.as_str().to_lowercase()
    } else {
        line.as_str().to_string()
    };
    let mut tokens = Vec::new();
    for chunk in text.split(' ').filter(|c| !c.is_empty()) {
        let core = chunk.trim_matches(|c: char| c.is_ascii_punctuation());
        if core.is_empty() {
            tokens.extend(chunk.chars().map(String::from));
            continue;
        }
        let lead = chunk.len()
            - chunk
                .trim_start_matches(|c: char| c.is_ascii_punctuation())
                .len();
        let trail_start = lead + core.len();
        tokens.extend(chunk[..lead].chars().map(String::from));
        tokens.push(core.to_string());
        tokens.extend(chunk[trail_start..].chars().map(String::from));
    }
    SegmentedLine::from_parts(tokens, SchemeId::word())
}
