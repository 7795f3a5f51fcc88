//! Slow reference implementations used to check the real ones. Nothing here
//! calls into the library's algorithms.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use rand::Rng;

pub const SENTINEL: char = '\u{2581}';
pub const EOW: &str = "</w>";

fn encode(text: &str) -> String {
    text.replace(' ', "\u{2581}")
}

fn initial_sequences(text: &str, word_mode: bool) -> Vec<Vec<String>> {
    let encoded = encode(text);
    if word_mode {
        encoded
            .split(SENTINEL)
            .map(|w| {
                let mut seq: Vec<String> = w.chars().map(String::from).collect();
                seq.push(EOW.to_string());
                seq
            })
            .collect()
    } else {
        vec![encoded.chars().map(String::from).collect()]
    }
}

fn replace(seq: &[String], left: &str, right: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < seq.len() {
        if i + 1 < seq.len() && seq[i] == left && seq[i + 1] == right {
            out.push(format!("{left}{right}"));
            i += 2;
        } else {
            out.push(seq[i].clone());
            i += 1;
        }
    }
    out
}

/// Recounts every adjacent pair from scratch at each iteration.
pub fn learn_bpe(
    lines: &[String],
    merges: usize,
    word_mode: bool,
    min_freq: usize,
) -> Vec<(String, String)> {
    let mut seqs: Vec<Vec<String>> = lines
        .iter()
        .flat_map(|l| initial_sequences(l, word_mode))
        .collect();
    let mut learned = Vec::new();
    for _ in 0..merges {
        let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
        for seq in &seqs {
            for w in seq.windows(2) {
                *counts.entry((w[0].clone(), w[1].clone())).or_default() += 1;
            }
        }
        // ascending key order, so a strictly greater count is needed to win
        let mut best: Option<(&(String, String), usize)> = None;
        for (pair, &count) in &counts {
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((pair, count));
            }
        }
        let Some(((l, r), count)) = best else { break };
        if count < min_freq {
            break;
        }
        let (l, r) = (l.clone(), r.clone());
        seqs = seqs.iter().map(|s| replace(s, &l, &r)).collect();
        learned.push((l, r));
    }
    learned
}

/// Applies every merge in rank order over the whole symbol list. Word mode
/// keeps the end-of-word marker and drops boundaries, one list per line.
pub fn apply_bpe(text: &str, merges: &[(String, String)], word_mode: bool) -> Vec<String> {
    initial_sequences(text, word_mode)
        .into_iter()
        .flat_map(|mut seq| {
            for (l, r) in merges {
                seq = replace(&seq, l, r);
            }
            seq
        })
        .collect()
}

/// Number of non-overlapping left-to-right replacements `(l, r)` makes.
pub fn replacement_count(seq: &[String], l: &str, r: &str) -> usize {
    seq.len() - replace(seq, l, r).len()
}

/// Every way to split `chars` into dictionary words and single code points.
/// Each token is `(text, unknown)`.
pub fn all_segmentations(chars: &[char], dict: &HashSet<String>) -> Vec<Vec<(String, bool)>> {
    if chars.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for len in 1..=chars.len() {
        let head: String = chars[..len].iter().collect();
        let known = dict.contains(&head);
        if !known && len > 1 {
            continue;
        }
        for mut rest in all_segmentations(&chars[len..], dict) {
            rest.insert(0, (head.clone(), !known));
            out.push(rest);
        }
    }
    out
}

/// Minimum-token segmentation, ties to fewer unknowns then to the
/// lexicographically greatest sequence of token lengths.
pub fn best_segmentation(chars: &[char], dict: &HashSet<String>) -> Vec<(String, bool)> {
    all_segmentations(chars, dict)
        .into_iter()
        .min_by(|a, b| {
            let key = |s: &Vec<(String, bool)>| (s.len(), s.iter().filter(|t| t.1).count());
            key(a).cmp(&key(b)).then_with(|| {
                let lens = |s: &Vec<(String, bool)>| {
                    s.iter().map(|t| t.0.chars().count()).collect::<Vec<_>>()
                };
                lens(b).cmp(&lens(a))
            })
        })
        .expect("at least the all-single-character segmentation")
}

/// Greedy longest match written as a plain scan over candidate lengths.
pub fn longest_match(chars: &[char], dict: &HashSet<String>) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let hit = (1..=chars.len() - i)
            .rev()
            .map(|len| chars[i..i + len].iter().collect::<String>())
            .find(|w| dict.contains(w));
        match hit {
            Some(w) => {
                i += w.chars().count();
                out.push((w, false));
            }
            None => {
                out.push((chars[i].to_string(), true));
                i += 1;
            }
        }
    }
    out
}

fn grams(chars: &[char], n: usize) -> Vec<Vec<char>> {
    if chars.len() < n {
        return Vec::new();
    }
    (0..=chars.len() - n)
        .map(|i| chars[i..i + n].to_vec())
        .collect()
}

/// Clipped match count by repeatedly striking matched reference grams.
fn matches(hyp: &[Vec<char>], reference: &[Vec<char>]) -> usize {
    let mut pool: Vec<Option<&Vec<char>>> = reference.iter().map(Some).collect();
    let mut count = 0;
    for g in hyp {
        if let Some(slot) = pool.iter_mut().find(|s| s.is_some_and(|r| r == g)) {
            *slot = None;
            count += 1;
        }
    }
    count
}

/// Per-order (matches, hyp_count, ref_count).
pub fn chrf_counts(
    hyp: &str,
    reference: &str,
    max_order: usize,
    strip: bool,
) -> Vec<(usize, usize, usize)> {
    let prep = |s: &str| -> Vec<char> { s.chars().filter(|&c| !(strip && c == ' ')).collect() };
    let (h, r) = (prep(hyp), prep(reference));
    (1..=max_order)
        .map(|n| {
            let (hg, rg) = (grams(&h, n), grams(&r, n));
            (matches(&hg, &rg), hg.len(), rg.len())
        })
        .collect()
}

pub fn chrf_from_counts(counts: &[(usize, usize, usize)], beta: f64) -> f64 {
    let mut p_sum = 0.0;
    let mut r_sum = 0.0;
    let mut k = 0;
    for &(m, h, r) in counts {
        if h == 0 && r == 0 {
            continue;
        }
        k += 1;
        if h > 0 {
            p_sum += m as f64 / h as f64;
        }
        if r > 0 {
            r_sum += m as f64 / r as f64;
        }
    }
    if k == 0 {
        return 100.0;
    }
    let (p, r) = (p_sum / k as f64, r_sum / k as f64);
    let b2 = beta * beta;
    if b2 * p + r == 0.0 {
        0.0
    } else {
        100.0 * (1.0 + b2) * p * r / (b2 * p + r)
    }
}

pub fn chrf(hyp: &str, reference: &str, beta: f64, max_order: usize, strip: bool) -> f64 {
    chrf_from_counts(&chrf_counts(hyp, reference, max_order, strip), beta)
}

pub fn corpus_chrf(
    hyps: &[String],
    refs: &[String],
    beta: f64,
    max_order: usize,
    strip: bool,
) -> f64 {
    let mut totals = vec![(0, 0, 0); max_order];
    for (h, r) in hyps.iter().zip(refs) {
        for (t, c) in totals.iter_mut().zip(chrf_counts(h, r, max_order, strip)) {
            t.0 += c.0;
            t.1 += c.1;
            t.2 += c.2;
        }
    }
    chrf_from_counts(&totals, beta)
}

/// A random character from a mix of Thai, Latin, space, combining marks and
/// assorted other planes; never the sentinel or a line terminator.
pub fn random_char(rng: &mut impl Rng) -> char {
    loop {
        let c = match rng.random_range(0..10) {
            0..=3 => char::from_u32(rng.random_range(0x0E00..=0x0E7F)),
            4 | 5 => char::from_u32(rng.random_range(0x61..=0x7A)),
            6 => Some(' '),
            7 => char::from_u32(rng.random_range(0x0300..=0x036F)),
            8 => char::from_u32(rng.random_range(0x21..=0x2F)),
            _ => char::from_u32(rng.random_range(0x80..=0x1F9FF)),
        };
        match c {
            Some(c) if c != SENTINEL && c != '\n' && c != '\r' => return c,
            _ => continue,
        }
    }
}

pub fn random_text(rng: &mut impl Rng, max_len: usize) -> String {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| random_char(rng)).collect()
}

/// A random string over a small alphabet.
pub fn random_over(rng: &mut impl Rng, alphabet: &[char], max_len: usize) -> String {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

/// A random small corpus: up to 50 lines over an alphabet of up to 10 symbols.
pub fn random_corpus(rng: &mut impl Rng, with_spaces: bool) -> Vec<String> {
    const POOL: [char; 12] = ['a', 'b', 'c', 'd', 'e', 'ก', 'ข', 'า', '่', 'ั', 'x', 'y'];
    let size = rng.random_range(1..=10);
    let mut alphabet: Vec<char> = POOL.iter().copied().take(size).collect();
    if with_spaces && alphabet.len() > 1 {
        let last = alphabet.len() - 1;
        alphabet[last] = ' ';
    }
    let lines = rng.random_range(0..=50);
    (0..lines)
        .map(|_| random_over(rng, &alphabet, 16))
        .collect()
}
