//! Combining one source side with several target-side segmentations.
//!
//! Every variant contributes one block of pairs in which the source side is
//! repeated unchanged; blocks are appended in the order given, never shuffled.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};

use crate::corpus::{ParallelCorpus, SchemeId, SegmentedLine};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub scheme: SchemeId,
    pub pair_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedCorpus {
    source: Vec<SegmentedLine>,
    pairs: ParallelCorpus,
    manifest: Vec<ManifestEntry>,
}

impl CombinedCorpus {
    /// An empty combination over `source`; add blocks with [`append`](Self::append).
    pub fn new(source: Vec<SegmentedLine>) -> Self {
        CombinedCorpus {
            source,
            pairs: ParallelCorpus::default(),
            manifest: Vec::new(),
        }
    }

    /// Appends one block pairing every source line with `target`.
    pub fn append(&mut self, scheme: SchemeId, target: &[SegmentedLine]) -> Result<()> {
        if target.len() != self.source.len() {
            return Err(Error::data(format!(
                "target variant `{scheme}` has {} lines but the source has {}",
                target.len(),
                self.source.len()
            )));
        }
        self.pairs
            .extend(self.source.iter().cloned().zip(target.iter().cloned()));
        self.manifest.push(ManifestEntry {
            scheme,
            pair_count: target.len(),
        });
        Ok(())
    }

    pub fn pairs(&self) -> &ParallelCorpus {
        &self.pairs
    }

    pub fn manifest(&self) -> &[ManifestEntry] {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn source_stats(&self) -> CorpusStats {
        CorpusStats::compute(self.pairs.sources(), self.pairs.sources())
    }

    /// Target-side statistics; duplication is measured against the source.
    pub fn target_stats(&self) -> CorpusStats {
        CorpusStats::compute(self.pairs.targets(), self.pairs.sources())
    }

    /// One `label<TAB>count` record per block.
    pub fn write_manifest(&self, writer: impl Write) -> io::Result<()> {
        let mut w = io::BufWriter::new(writer);
        for entry in &self.manifest {
            writeln!(w, "{}\t{}", entry.scheme.label, entry.pair_count)?;
        }
        w.flush()
    }
}

/// Pairs `source` with each target variant in turn.
pub fn combine(
    source: &[SegmentedLine],
    variants: &[(SchemeId, Vec<SegmentedLine>)],
) -> Result<CombinedCorpus> {
    if variants.is_empty() {
        return Err(Error::usage("at least one target variant is required"));
    }
    let mut combined = CombinedCorpus::new(source.to_vec());
    for (scheme, target) in variants {
        combined.append(scheme.clone(), target)?;
    }
    Ok(combined)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorpusStats {
    pub sentence_count: usize,
    pub token_count: usize,
    pub distinct_type_count: usize,
    pub mean_tokens_per_sentence: f64,
    /// Sentences per unique source sentence.
    pub duplication_factor: f64,
}

impl CorpusStats {
    fn compute<'a>(
        lines: impl Iterator<Item = &'a SegmentedLine>,
        sources: impl Iterator<Item = &'a SegmentedLine>,
    ) -> Self {
        let mut sentence_count = 0;
        let mut token_count = 0;
        let mut types: HashSet<&str> = HashSet::new();
        for line in lines {
            sentence_count += 1;
            token_count += line.len();
            types.extend(line.tokens().iter().map(String::as_str));
        }
        let unique_sources: HashSet<&[String]> = sources.map(SegmentedLine::tokens).collect();
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        CorpusStats {
            sentence_count,
            token_count,
            distinct_type_count: types.len(),
            mean_tokens_per_sentence: ratio(token_count, sentence_count),
            duplication_factor: ratio(sentence_count, unique_sources.len()),
        }
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentences\t{}", self.sentence_count)?;
        writeln!(f, "tokens\t{}", self.token_count)?;
        writeln!(f, "types\t{}", self.distinct_type_count)?;
        writeln!(f, "mean_tokens\t{:.4}", self.mean_tokens_per_sentence)?;
        writeln!(f, "duplication\t{:.4}", self.duplication_factor)
    }
}

/// Statistics of a single side; duplication counts repeated identical lines.
pub fn stats<'a>(lines: impl IntoIterator<Item = &'a SegmentedLine>) -> CorpusStats {
    let lines: Vec<&SegmentedLine> = lines.into_iter().collect();
    CorpusStats::compute(lines.iter().copied(), lines.iter().copied())
}
