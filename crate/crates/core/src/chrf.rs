//! Character n-gram F-score.
//!
//! For each order n the clipped n-gram matches between hypothesis and
//! reference give a precision and a recall. Orders where both sides have no
//! n-grams are skipped; the remaining precisions and recalls are averaged and
//! combined with recall weighted by `beta`. Corpus scores sum the per-order
//! counts over all segments before computing anything.

use std::collections::HashMap;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Whitespace {
    /// Remove every U+0020 before extracting n-grams.
    #[default]
    Strip,
    Keep,
}

impl FromStr for Whitespace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strip" => Ok(Whitespace::Strip),
            "keep" => Ok(Whitespace::Keep),
            other => Err(Error::usage(format!("unknown whitespace policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChrfConfig {
    pub beta: f64,
    pub max_order: usize,
    pub whitespace: Whitespace,
}

impl Default for ChrfConfig {
    fn default() -> Self {
        ChrfConfig {
            beta: 3.0,
            max_order: 6,
            whitespace: Whitespace::Strip,
        }
    }
}

impl ChrfConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::usage(format!(
                "beta must be a positive number, got {}",
                self.beta
            )));
        }
        if self.max_order == 0 {
            return Err(Error::usage("n-gram order must be at least 1"));
        }
        Ok(())
    }

    fn prepare(&self, text: &str) -> Vec<char> {
        match self.whitespace {
            Whitespace::Strip => text.chars().filter(|&c| c != ' ').collect(),
            Whitespace::Keep => text.chars().collect(),
        }
    }
}

/// Code-point n-gram counts for orders `1..=max_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramProfile {
    orders: Vec<HashMap<String, usize>>,
}

impl NgramProfile {
    pub fn new(text: &str, max_order: usize) -> Self {
        let chars: Vec<char> = text.chars().collect();
        Self::from_chars(&chars, max_order)
    }

    fn from_chars(chars: &[char], max_order: usize) -> Self {
        let orders = (1..=max_order)
            .map(|n| {
                let mut counts = HashMap::new();
                for gram in chars.windows(n) {
                    *counts.entry(gram.iter().collect::<String>()).or_insert(0) += 1;
                }
                counts
            })
            .collect();
        NgramProfile { orders }
    }

    pub fn max_order(&self) -> usize {
        self.orders.len()
    }

    /// Counts for order `n` (1-based).
    pub fn order(&self, n: usize) -> &HashMap<String, usize> {
        &self.orders[n - 1]
    }

    /// Total n-gram occurrences of order `n`.
    pub fn total(&self, n: usize) -> usize {
        self.orders[n - 1].values().sum()
    }
}

pub fn ngram_profile(text: &str, max_order: usize) -> NgramProfile {
    NgramProfile::new(text, max_order)
}

/// Sufficient statistics for one n-gram order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OrderStats {
    pub matches: usize,
    pub hyp: usize,
    pub reference: usize,
}

impl std::ops::AddAssign for OrderStats {
    fn add_assign(&mut self, rhs: Self) {
        self.matches += rhs.matches;
        self.hyp += rhs.hyp;
        self.reference += rhs.reference;
    }
}

fn order_stats(hyp: &NgramProfile, reference: &NgramProfile) -> Vec<OrderStats> {
    (1..=hyp.max_order())
        .map(|n| {
            let (h, r) = (hyp.order(n), reference.order(n));
            let matches = h
                .iter()
                .map(|(gram, &c)| c.min(r.get(gram).copied().unwrap_or(0)))
                .sum();
            OrderStats {
                matches,
                hyp: hyp.total(n),
                reference: reference.total(n),
            }
        })
        .collect()
}

/// Average precision and recall over the orders that have any n-grams;
/// `None` when every order is empty on both sides.
pub fn precision_recall(stats: &[OrderStats]) -> Option<(f64, f64)> {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let active: Vec<&OrderStats> = stats
        .iter()
        .filter(|s| s.hyp > 0 || s.reference > 0)
        .collect();
    if active.is_empty() {
        return None;
    }
    let k = active.len() as f64;
    let p = active.iter().map(|s| ratio(s.matches, s.hyp)).sum::<f64>() / k;
    let r = active
        .iter()
        .map(|s| ratio(s.matches, s.reference))
        .sum::<f64>()
        / k;
    Some((p, r))
}

/// F-score in `[0, 100]` from per-order statistics.
pub fn f_score(stats: &[OrderStats], beta: f64) -> f64 {
    let Some((p, r)) = precision_recall(stats) else {
        return 100.0;
    };
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        return 0.0;
    }
    (100.0 * (1.0 + b2) * p * r / denom).clamp(0.0, 100.0)
}

fn segment_stats(hyp: &str, reference: &str, config: &ChrfConfig) -> Vec<OrderStats> {
    let h = NgramProfile::from_chars(&config.prepare(hyp), config.max_order);
    let r = NgramProfile::from_chars(&config.prepare(reference), config.max_order);
    order_stats(&h, &r)
}

pub fn chrf_score(hyp: &str, reference: &str, config: &ChrfConfig) -> Result<f64> {
    config.validate()?;
    Ok(f_score(&segment_stats(hyp, reference, config), config.beta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChrfReport {
    pub beta: f64,
    pub max_order: usize,
    pub segment_scores: Vec<f64>,
    pub corpus_score: f64,
    /// Per-order statistics summed over all segments.
    pub totals: Vec<OrderStats>,
}

impl ChrfReport {
    /// `chrf3 = 47.90` style summary line.
    pub fn summary(&self) -> String {
        format!("chrf{} = {:.2}", self.beta, self.corpus_score)
    }

    /// `index<TAB>score` per segment, 1-based.
    pub fn segments_tsv(&self) -> String {
        self.segment_scores
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{}\t{s:.4}\n", i + 1))
            .collect()
    }
}

pub fn corpus_chrf<H, R>(hyps: &[H], refs: &[R], config: &ChrfConfig) -> Result<ChrfReport>
where
    H: AsRef<str>,
    R: AsRef<str>,
{
    config.validate()?;
    if hyps.len() != refs.len() {
        return Err(Error::data(format!(
            "{} hypothesis lines but {} reference lines",
            hyps.len(),
            refs.len()
        )));
    }
    let mut totals = vec![OrderStats::default(); config.max_order];
    let mut segment_scores = Vec::with_capacity(hyps.len());
    for (h, r) in hyps.iter().zip(refs) {
        let stats = segment_stats(h.as_ref(), r.as_ref(), config);
        segment_scores.push(f_score(&stats, config.beta));
        for (t, s) in totals.iter_mut().zip(stats) {
            *t += s;
        }
    }
    Ok(ChrfReport {
        beta: config.beta,
        max_order: config.max_order,
        segment_scores,
        corpus_score: f_score(&totals, config.beta),
        totals,
    })
}
