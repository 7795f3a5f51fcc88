use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::corpus::SENTINEL;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
struct Node {
    children: BTreeMap<char, usize>,
    terminal: bool,
}

/// A word list indexed by prefix.
///
/// Words are stored in sentinel-encoded form so they can be matched directly
/// against encoded lines; a dictionary entry `ice cream` matches `ice▁cream`.
#[derive(Debug, Clone)]
pub struct TrieDictionary {
    nodes: Vec<Node>,
    len: usize,
    max_word_len: usize,
}

impl Default for TrieDictionary {
    fn default() -> Self {
        TrieDictionary {
            nodes: vec![Node::default()],
            len: 0,
            max_word_len: 0,
        }
    }
}

impl TrieDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a word; returns false for duplicates. Empty words are rejected.
    pub fn insert(&mut self, word: &str) -> Result<bool> {
        if word.is_empty() {
            return Err(Error::data("dictionary words must be non-empty"));
        }
        let mut node = 0;
        let mut chars = 0;
        for c in word.chars() {
            let c = if c == ' ' { SENTINEL } else { c };
            chars += 1;
            node = match self.nodes[node].children.get(&c) {
                Some(&next) => next,
                None => {
                    self.nodes.push(Node::default());
                    let next = self.nodes.len() - 1;
                    self.nodes[node].children.insert(c, next);
                    next
                }
            };
        }
        if self.nodes[node].terminal {
            return Ok(false);
        }
        self.nodes[node].terminal = true;
        self.len += 1;
        self.max_word_len = self.max_word_len.max(chars);
        Ok(true)
    }

    pub fn contains(&self, word: &str) -> bool {
        let mut node = 0;
        for c in word.chars() {
            let c = if c == ' ' { SENTINEL } else { c };
            match self.nodes[node].children.get(&c) {
                Some(&next) => node = next,
                None => return false,
            }
        }
        node != 0 && self.nodes[node].terminal
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Length in code points of the longest entry.
    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    /// Lengths (in code points) of every entry that is a prefix of `chars`,
    /// shortest first.
    pub fn prefix_lengths(&self, chars: &[char]) -> Vec<usize> {
        let mut out = Vec::new();
        self.walk(chars, |len| out.push(len));
        out
    }

    /// Length of the longest entry that is a prefix of `chars`.
    pub fn longest_prefix(&self, chars: &[char]) -> Option<usize> {
        let mut best = None;
        self.walk(chars, |len| best = Some(len));
        best
    }

    fn walk(&self, chars: &[char], mut on_match: impl FnMut(usize)) {
        let mut node = 0;
        for (i, c) in chars.iter().take(self.max_word_len).enumerate() {
            match self.nodes[node].children.get(c) {
                Some(&next) => node = next,
                None => return,
            }
            if self.nodes[node].terminal {
                on_match(i + 1);
            }
        }
    }

    /// One word per line; duplicates ignored, empty lines skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dict = TrieDictionary::new();
        for word in text.lines() {
            let word = word.strip_suffix('\r').unwrap_or(word);
            if word.is_empty() {
                continue;
            }
            dict.insert(word)?;
        }
        Ok(dict)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::data(format!("{}: invalid UTF-8: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl<'a> FromIterator<&'a str> for TrieDictionary {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        let mut dict = TrieDictionary::new();
        for w in iter {
            if !w.is_empty() {
                dict.insert(w).expect("non-empty word");
            }
        }
        dict
    }
}
