//! Token normalization shared by every similarity computation.
//!
//! Text is split on whitespace and punctuation. A word that keeps its inner
//! dots (`java.io.IOException`) or camel-case humps (`StringBuffer`) yields
//! its punctuation-stripped composite (`javaioioexception`) followed by its
//! finest parts (`java`, `io`, `io`, `exception`). Everything is lowercased
//! and tokens shorter than [`MIN_TOKEN_LEN`] characters are dropped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Tokens with fewer characters than this are discarded.
pub const MIN_TOKEN_LEN: usize = 2;

/// Multiset of normalized tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenBag {
    counts: BTreeMap<String, u32>,
}

impl TokenBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut bag = Self::new();
        for t in tokens {
            bag.add(t);
        }
        bag
    }

    pub fn add(&mut self, token: impl Into<String>) {
        self.add_n(token, 1);
    }

    pub fn add_n(&mut self, token: impl Into<String>, n: u32) {
        if n == 0 {
            return;
        }
        *self.counts.entry(token.into()).or_insert(0) += n;
    }

    pub fn merge(&mut self, other: &TokenBag) {
        for (t, &n) in &other.counts {
            self.add_n(t.clone(), n);
        }
    }

    pub fn get(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.counts.contains_key(token)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all frequencies.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&n| u64::from(n)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(t, &n)| (t.as_str(), n))
    }

    /// Distinct tokens in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenBag {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self::from_tokens(iter)
    }
}

/// Bag of normalized tokens for `text`.
pub fn tokenize_text(text: &str) -> TokenBag {
    token_sequence(text).into_iter().collect()
}

/// Same normalization as [`tokenize_text`] but keeps order and duplicates.
pub fn token_sequence(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in words(text) {
        push_word_tokens(word, &mut out);
    }
    out
}

/// Cosine similarity of two bags over raw frequencies; 0 if either is empty.
pub fn cosine(a: &TokenBag, b: &TokenBag) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().map(|(t, n)| f64::from(n) * f64::from(large.get(t))).sum();
    if dot == 0.0 {
        return 0.0;
    }
    let norm = |bag: &TokenBag| bag.iter().map(|(_, n)| f64::from(n) * f64::from(n)).sum::<f64>().sqrt();
    (dot / (norm(a) * norm(b))).clamp(0.0, 1.0)
}

/// Length of the longest common subsequence of two token lists.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if inner.len() <= 64 {
        lcs_bit_parallel(outer, inner)
    } else {
        lcs_dp(outer, inner)
    }
}

/// Bit-vector LCS for `inner.len() <= 64`: one word of state per row.
fn lcs_bit_parallel<T: PartialEq>(outer: &[T], inner: &[T]) -> usize {
    let n = inner.len();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut v = u64::MAX;
    let mut step = |m: u64| {
        let u = v & m;
        v = v.wrapping_add(u) | (v & !m);
    };

    // Plain values compare cheaply, so masks are rebuilt per row. Owned
    // values such as strings get one mask per distinct inner element.
    if !std::mem::needs_drop::<T>() && std::mem::size_of::<T>() <= 8 {
        for x in outer {
            let mut m = 0u64;
            for (j, y) in inner.iter().enumerate() {
                m |= u64::from(x == y) << j;
            }
            step(m);
        }
    } else {
        let mut reps = [(0usize, 0u64); 64];
        let mut distinct = 0;
        for (j, y) in inner.iter().enumerate() {
            match reps[..distinct].iter_mut().find(|(k, _)| inner[*k] == *y) {
                Some((_, mask)) => *mask |= 1 << j,
                None => {
                    reps[distinct] = (j, 1 << j);
                    distinct += 1;
                }
            }
        }
        for x in outer {
            step(
                reps[..distinct]
                    .iter()
                    .find(|(k, _)| inner[*k] == *x)
                    .map_or(0, |&(_, mask)| mask),
            );
        }
    }
    (!v & all).count_ones() as usize
}

fn lcs_dp<T: PartialEq>(outer: &[T], inner: &[T]) -> usize {
    let mut row = vec![0usize; inner.len() + 1];
    for x in outer {
        let mut diag = 0;
        for (j, y) in inner.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { row[j].max(up) };
            diag = up;
        }
    }
    row[inner.len()]
}

/// Raw words: runs of alphanumerics and dots, with edge dots trimmed.
fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '.'))
        .map(|w| w.trim_matches('.'))
        .filter(|w| !w.is_empty())
}

fn push_word_tokens(word: &str, out: &mut Vec<String>) {
    let parts: Vec<&str> = word
        .split('.')
        .filter(|s| !s.is_empty())
        .flat_map(camel_parts)
        .collect();
    if parts.len() > 1 {
        let composite: String = word
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        push_token(composite, out);
    }
    for p in parts {
        push_token(p.to_lowercase(), out);
    }
}

fn push_token(token: String, out: &mut Vec<String>) {
    if token.chars().count() >= MIN_TOKEN_LEN {
        out.push(token);
    }
}

/// Splits an identifier at camel-case humps: `readInt` -> `read`, `Int`;
/// `EOFException` -> `EOF`, `Exception`. Digits never start a new part.
fn camel_parts(segment: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = segment.char_indices().collect();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let (pos, c) = chars[i];
        let prev = chars[i - 1].1;
        let boundary = if c.is_uppercase() {
            // lower/digit -> Upper, or the last capital of an acronym run
            // that begins a capitalized word (`EOFE|xception` splits before `E`).
            !prev.is_uppercase() || chars.get(i + 1).is_some_and(|&(_, next)| next.is_lowercase())
        } else {
            false
        };
        if boundary {
            parts.push(&segment[start..pos]);
            start = pos;
        }
    }
    parts.push(&segment[start..]);
    parts
}
