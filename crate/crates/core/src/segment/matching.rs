//! Dictionary-driven segmentation: greedy longest matching and
//! minimum-token (maximal) matching.

use crate::corpus::{Line, SchemeId, SegmentedLine};
use crate::segment::dict::TrieDictionary;

/// A token produced by dictionary matching. Unknown tokens are single code
/// points that no dictionary entry covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentToken {
    pub text: String,
    pub unknown: bool,
}

fn to_segmented(tokens: Vec<SegmentToken>, scheme: SchemeId) -> SegmentedLine {
    SegmentedLine::from_parts(tokens.into_iter().map(|t| t.text).collect(), scheme)
}

/// Greedy left-to-right longest matching over sentinel-encoded text.
pub fn longest_match_tokens(encoded: &str, dict: &TrieDictionary) -> Vec<SegmentToken> {
    let chars: Vec<char> = encoded.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let (len, unknown) = match dict.longest_prefix(&chars[pos..]) {
            Some(len) => (len, false),
            None => (1, true),
        };
        out.push(SegmentToken {
            text: chars[pos..pos + len].iter().collect(),
            unknown,
        });
        pos += len;
    }
    out
}

pub fn longest_match_segment(line: &Line, dict: &TrieDictionary) -> SegmentedLine {
    to_segmented(
        longest_match_tokens(&line.encoded(), dict),
        SchemeId::longest_match(),
    )
}

#[derive(Debug, Clone, Copy)]
struct Best {
    tokens: usize,
    unknowns: usize,
    step: usize,
}

/// Segmentation with the fewest tokens; ties go to fewer unknown tokens, then
/// to the longest token at the leftmost point where candidates differ.
pub fn maximal_match_tokens(encoded: &str, dict: &TrieDictionary) -> Vec<SegmentToken> {
    let chars: Vec<char> = encoded.chars().collect();
    let n = chars.len();
    // best[i] describes the optimal segmentation of chars[i..]
    let mut best = vec![
        Best {
            tokens: 0,
            unknowns: 0,
            step: 0,
        };
        n + 1
    ];
    for i in (0..n).rev() {
        let lengths = dict.prefix_lengths(&chars[i..]);
        let mut choice: Option<Best> = None;
        let mut consider = |step: usize, unknown: bool| {
            let rest = best[i + step];
            let cand = Best {
                tokens: rest.tokens + 1,
                unknowns: rest.unknowns + usize::from(unknown),
                step,
            };
            let better = match choice {
                None => true,
                Some(cur) => {
                    (cand.tokens, cand.unknowns, std::cmp::Reverse(cand.step))
                        < (cur.tokens, cur.unknowns, std::cmp::Reverse(cur.step))
                }
            };
            if better {
                choice = Some(cand);
            }
        };
        if lengths.first() != Some(&1) {
            consider(1, true);
        }
        for &len in &lengths {
            consider(len, false);
        }
        best[i] = choice.expect("at least one candidate");
    }

    let mut out = Vec::with_capacity(best[0].tokens);
    let mut pos = 0;
    while pos < n {
        let step = best[pos].step;
        let unknown = best[pos].unknowns > best[pos + step].unknowns;
        out.push(SegmentToken {
            text: chars[pos..pos + step].iter().collect(),
            unknown,
        });
        pos += step;
    }
    out
}

pub fn maximal_match_segment(line: &Line, dict: &TrieDictionary) -> SegmentedLine {
    to_segmented(
        maximal_match_tokens(&line.encoded(), dict),
        SchemeId::maximal_match(),
    )
}
