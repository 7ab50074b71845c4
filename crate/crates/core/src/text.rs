//! Pairwise string and vector similarity primitives.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TextMetricError {
    #[error("{0}: token sequence is empty")]
    EmptySequence(&'static str),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cosine is undefined for a zero-norm vector")]
    ZeroNorm,
    #[error("embedding vector must be non-empty and finite")]
    InvalidVector,
}

/// Whitespace-delimited words of a canonical variable name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    /// Tokenizes by whitespace. Input is expected to be canonical already,
    /// but case and spacing are normalized again so raw text is safe too.
    pub fn from_name(name: &str) -> Self {
        TokenSequence(name.split_whitespace().map(str::to_lowercase).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A fixed-dimension real vector for one phrase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, TextMetricError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(TextMetricError::InvalidVector);
        }
        Ok(EmbeddingVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    fn check_dims(&self, other: &Self) -> Result<(), TextMetricError> {
        if self.dim() != other.dim() {
            return Err(TextMetricError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// Unit-cost character edit distance (insert, delete, substitute).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let up = row[j + 1];
            let cost = usize::from(ca != cb);
            row[j + 1] = (up + 1).min(row[j] + 1).min(diag + cost);
            diag = up;
        }
    }
    row[b.len()]
}

/// `1 - levenshtein / max(len)`, over characters; 1 for two empty strings.
pub fn fuzzy_ratio(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Sentence-level BLEU of `candidate` against a single `reference`.
///
/// Uses n-gram orders `1..=min(4, |candidate|)` with uniform weights and the
/// standard brevity penalty. Orders above one with no matches are smoothed by
/// adding one to numerator and denominator. Zero unigram matches give 0.
pub fn bleu(candidate: &TokenSequence, reference: &TokenSequence) -> Result<f64, TextMetricError> {
    if candidate.is_empty() {
        return Err(TextMetricError::EmptySequence("candidate"));
    }
    if reference.is_empty() {
        return Err(TextMetricError::EmptySequence("reference"));
    }
    let cand = candidate.tokens();
    let refr = reference.tokens();
    let max_order = cand.len().min(4);
    let mut log_sum = 0.0;
    for n in 1..=max_order {
        let ref_counts = ngram_counts(refr, n);
        let matches: usize = ngram_counts(cand, n)
            .into_iter()
            .map(|(gram, count)| count.min(ref_counts.get(gram).copied().unwrap_or(0)))
            .sum();
        let total = cand.len() + 1 - n;
        let (num, den) = match (matches, n) {
            (0, 1) => return Ok(0.0),
            (0, _) => (1.0, total as f64 + 1.0),
            _ => (matches as f64, total as f64),
        };
        log_sum += (num / den).ln();
    }
    let penalty = if cand.len() < refr.len() {
        (1.0 - refr.len() as f64 / cand.len() as f64).exp()
    } else {
        1.0
    };
    Ok(((log_sum / max_order as f64).exp() * penalty).clamp(0.0, 1.0))
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Cosine of the angle between two vectors, clamped to `[-1, 1]`.
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, TextMetricError> {
    u.check_dims(v)?;
    let uu = dot(&u.0, &u.0);
    let vv = dot(&v.0, &v.0);
    if uu == 0.0 || vv == 0.0 {
        return Err(TextMetricError::ZeroNorm);
    }
    Ok((dot(&u.0, &v.0) / (uu * vv).sqrt()).clamp(-1.0, 1.0))
}

/// Negated Euclidean distance; 0 for equal vectors, negative otherwise.
pub fn neg_euclidean(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, TextMetricError> {
    u.check_dims(v)?;
    let sq: f64 = u.0.iter().zip(&v.0).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(0.0 - sq.sqrt())
}
