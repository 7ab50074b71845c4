//! Graph-level semantic similarity (M1–M4) between the variable names of two
//! causal graphs.
//!
//! Each metric first fills a reference × comparison matrix of pairwise name
//! scores, then an aggregation [`Strategy`] lifts the matrix to one number.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embed::{EmbedError, EmbeddingProvider};
use crate::graph::CausalGraph;
use crate::text::{
    bleu, cosine, fuzzy_ratio, neg_euclidean, EmbeddingVector, TextMetricError, TokenSequence,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticError {
    #[error("{0} graph has no variables")]
    EmptyGraph(&'static str),
    #[error("{0} needs an embedding provider")]
    MissingProvider(SemanticMetric),
    #[error("{0} is a string metric and takes no embedding provider")]
    UnexpectedProvider(SemanticMetric),
    #[error("cannot aggregate an empty matrix")]
    EmptyMatrix,
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Text(#[from] TextMetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SemanticMetric {
    #[serde(rename = "m1")]
    Bleu,
    #[serde(rename = "m2")]
    Fuzzy,
    #[serde(rename = "m3")]
    Cosine,
    #[serde(rename = "m4")]
    NegEuclidean,
}

impl SemanticMetric {
    pub const ALL: [SemanticMetric; 4] = [
        SemanticMetric::Bleu,
        SemanticMetric::Fuzzy,
        SemanticMetric::Cosine,
        SemanticMetric::NegEuclidean,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SemanticMetric::Bleu => "m1",
            SemanticMetric::Fuzzy => "m2",
            SemanticMetric::Cosine => "m3",
            SemanticMetric::NegEuclidean => "m4",
        }
    }

    pub fn needs_embeddings(self) -> bool {
        matches!(self, SemanticMetric::Cosine | SemanticMetric::NegEuclidean)
    }

    /// Best attainable score: 1 for M1–M3, 0 for M4.
    pub fn maximum(self) -> f64 {
        match self {
            SemanticMetric::NegEuclidean => 0.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for SemanticMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id().to_uppercase())
    }
}

/// How a pairwise matrix becomes one graph-level score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Mean over reference names of their best match in the comparison graph.
    #[default]
    RefBestMatch,
    /// Average of the best-match means taken in both directions.
    SymmetricBestMatch,
    /// Best one-to-one assignment, divided by the larger name count; unmatched
    /// names contribute the metric floor.
    OptimalAssignmentPenalized,
}

impl Strategy {
    pub fn id(self) -> &'static str {
        match self {
            Strategy::RefBestMatch => "ref_best_match",
            Strategy::SymmetricBestMatch => "symmetric_best_match",
            Strategy::OptimalAssignmentPenalized => "optimal_assignment_penalized",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Strategy::RefBestMatch,
            Strategy::SymmetricBestMatch,
            Strategy::OptimalAssignmentPenalized,
        ]
        .into_iter()
        .find(|st| st.id() == s)
        .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

/// Pairwise scores for one metric; entry `(i, j)` compares reference name `i`
/// with comparison name `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseMatrix {
    pub metric: SemanticMetric,
    pub ref_names: Vec<String>,
    pub cmp_names: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

impl PairwiseMatrix {
    pub fn rows(&self) -> usize {
        self.scores.len()
    }

    pub fn cols(&self) -> usize {
        self.scores.first().map_or(0, Vec::len)
    }

    /// Bare matrix without name lists, mainly for aggregation experiments.
    pub fn from_scores(metric: SemanticMetric, scores: Vec<Vec<f64>>) -> Self {
        let rows = scores.len();
        let cols = scores.first().map_or(0, Vec::len);
        PairwiseMatrix {
            metric,
            ref_names: (0..rows).map(|i| format!("r{i}")).collect(),
            cmp_names: (0..cols).map(|j| format!("c{j}")).collect(),
            scores,
        }
    }
}

/// Graph-level M1–M4 scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticScores {
    pub m1_bleu: f64,
    pub m2_fuzzy: f64,
    pub m3_cosine: f64,
    pub m4_neg_euclid: f64,
    pub strategy: Strategy,
}

impl SemanticScores {
    pub fn get(&self, metric: SemanticMetric) -> f64 {
        match metric {
            SemanticMetric::Bleu => self.m1_bleu,
            SemanticMetric::Fuzzy => self.m2_fuzzy,
            SemanticMetric::Cosine => self.m3_cosine,
            SemanticMetric::NegEuclidean => self.m4_neg_euclid,
        }
    }
}

fn check_non_empty(r: &CausalGraph, c: &CausalGraph) -> Result<(), SemanticError> {
    if r.is_empty() {
        return Err(SemanticError::EmptyGraph("reference"));
    }
    if c.is_empty() {
        return Err(SemanticError::EmptyGraph("comparison"));
    }
    Ok(())
}

fn string_matrix(
    metric: SemanticMetric,
    ref_names: &[String],
    cmp_names: &[String],
) -> Result<Vec<Vec<f64>>, SemanticError> {
    match metric {
        SemanticMetric::Bleu => {
            let cmp_tokens: Vec<_> = cmp_names.iter().map(|n| TokenSequence::from_name(n)).collect();
            ref_names
                .iter()
                .map(|r| {
                    let reference = TokenSequence::from_name(r);
                    cmp_tokens
                        .iter()
                        .map(|candidate| Ok(bleu(candidate, &reference)?))
                        .collect()
                })
                .collect()
        }
        SemanticMetric::Fuzzy => Ok(ref_names
            .iter()
            .map(|r| cmp_names.iter().map(|c| fuzzy_ratio(r, c)).collect())
            .collect()),
        other => Err(SemanticError::MissingProvider(other)),
    }
}

fn vector_matrix(
    metric: SemanticMetric,
    ref_vecs: &[EmbeddingVector],
    cmp_vecs: &[EmbeddingVector],
) -> Result<Vec<Vec<f64>>, SemanticError> {
    let f = match metric {
        SemanticMetric::Cosine => cosine,
        SemanticMetric::NegEuclidean => neg_euclidean,
        other => return Err(SemanticError::UnexpectedProvider(other)),
    };
    ref_vecs
        .iter()
        .map(|r| cmp_vecs.iter().map(|c| Ok(f(r, c)?)).collect())
        .collect()
}

/// Fills the reference × comparison matrix for one metric. M1 treats the
/// comparison name as the BLEU candidate.
pub fn pairwise_matrix(
    metric: SemanticMetric,
    reference: &CausalGraph,
    comparison: &CausalGraph,
    provider: Option<&dyn EmbeddingProvider>,
) -> Result<PairwiseMatrix, SemanticError> {
    check_non_empty(reference, comparison)?;
    let ref_names = reference.names();
    let cmp_names = comparison.names();
    let scores = match (metric.needs_embeddings(), provider) {
        (true, Some(p)) => {
            let ref_vecs = p.embed(&ref_names)?;
            let cmp_vecs = p.embed(&cmp_names)?;
            vector_matrix(metric, &ref_vecs, &cmp_vecs)?
        }
        (true, None) => return Err(SemanticError::MissingProvider(metric)),
        (false, Some(_)) => return Err(SemanticError::UnexpectedProvider(metric)),
        (false, None) => string_matrix(metric, &ref_names, &cmp_names)?,
    };
    Ok(PairwiseMatrix {
        metric,
        ref_names,
        cmp_names,
        scores,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn row_best(scores: &[Vec<f64>]) -> f64 {
    mean(
        scores
            .iter()
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    )
}

fn col_best(scores: &[Vec<f64>]) -> f64 {
    let cols = scores[0].len();
    mean((0..cols).map(|j| {
        scores
            .iter()
            .map(|row| row[j])
            .fold(f64::NEG_INFINITY, f64::max)
    }))
}

/// Maximum-weight assignment of every row of a `rows <= cols` matrix to a
/// distinct column (Hungarian method with potentials). Returns the column
/// assigned to each row.
fn max_weight_assignment(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    let m = weights[0].len();
    debug_assert!(n <= m);
    // 1-based arrays; column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cost = -weights[i0 - 1][j - 1];
                let cur = cost - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

fn optimal_assignment_penalized(metric: SemanticMetric, scores: &[Vec<f64>]) -> f64 {
    let rows = scores.len();
    let cols = scores[0].len();
    let transposed;
    let weights: &[Vec<f64>] = if rows <= cols {
        scores
    } else {
        transposed = (0..cols)
            .map(|j| scores.iter().map(|row| row[j]).collect())
            .collect::<Vec<Vec<f64>>>();
        &transposed
    };
    let assignment = max_weight_assignment(weights);
    let matched: f64 = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| weights[i][j])
        .sum();
    let floor = match metric {
        SemanticMetric::NegEuclidean => scores
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min),
        _ => 0.0,
    };
    let larger = rows.max(cols);
    let unmatched = (larger - rows.min(cols)) as f64;
    (matched + unmatched * floor) / larger as f64
}

/// Lifts a pairwise matrix to a graph-level score.
pub fn aggregate(matrix: &PairwiseMatrix, strategy: Strategy) -> Result<f64, SemanticError> {
    if matrix.rows() == 0 || matrix.cols() == 0 {
        return Err(SemanticError::EmptyMatrix);
    }
    let s = &matrix.scores;
    Ok(match strategy {
        Strategy::RefBestMatch => row_best(s),
        Strategy::SymmetricBestMatch => (row_best(s) + col_best(s)) / 2.0,
        Strategy::OptimalAssignmentPenalized => optimal_assignment_penalized(matrix.metric, s),
    })
}

/// Scores the requested metrics, embedding each graph's names at most once.
pub fn score_metrics(
    reference: &CausalGraph,
    comparison: &CausalGraph,
    provider: Option<&dyn EmbeddingProvider>,
    strategy: Strategy,
    metrics: &[SemanticMetric],
) -> Result<Vec<(SemanticMetric, f64)>, SemanticError> {
    check_non_empty(reference, comparison)?;
    let ref_names = reference.names();
    let cmp_names = comparison.names();
    let vectors = match metrics.iter().find(|m| m.needs_embeddings()) {
        None => None,
        Some(&m) => {
            let p = provider.ok_or(SemanticError::MissingProvider(m))?;
            Some((p.embed(&ref_names)?, p.embed(&cmp_names)?))
        }
    };
    metrics
        .iter()
        .map(|&metric| {
            let scores = match &vectors {
                Some((r, c)) if metric.needs_embeddings() => vector_matrix(metric, r, c)?,
                _ => string_matrix(metric, &ref_names, &cmp_names)?,
            };
            let matrix = PairwiseMatrix {
                metric,
                ref_names: ref_names.clone(),
                cmp_names: cmp_names.clone(),
                scores,
            };
            Ok((metric, aggregate(&matrix, strategy)?))
        })
        .collect()
}

/// All four semantic scores with one provider call per graph.
pub fn semantic_scores(
    reference: &CausalGraph,
    comparison: &CausalGraph,
    provider: &dyn EmbeddingProvider,
    strategy: Strategy,
) -> Result<SemanticScores, SemanticError> {
    let s = score_metrics(
        reference,
        comparison,
        Some(provider),
        strategy,
        &SemanticMetric::ALL,
    )?;
    Ok(SemanticScores {
        m1_bleu: s[0].1,
        m2_fuzzy: s[1].1,
        m3_cosine: s[2].1,
        m4_neg_euclid: s[3].1,
        strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::DeterministicProvider;

    fn names(ns: &[&str]) -> CausalGraph {
        let mut b = CausalGraph::builder();
        for (i, n) in ns.iter().enumerate() {
            b = b.node(&format!("n{i}"), n);
        }
        b.build().unwrap()
    }

    fn brute_force_assignment(s: &[Vec<f64>]) -> f64 {
        // all injective maps from the smaller side into the larger one
        fn go(s: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == s.len() {
                return 0.0;
            }
            let mut best = f64::NEG_INFINITY;
            for j in 0..s[0].len() {
                if !used[j] {
                    used[j] = true;
                    best = best.max(s[row][j] + go(s, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        let t: Vec<Vec<f64>>;
        let s = if s.len() <= s[0].len() {
            s
        } else {
            t = (0..s[0].len())
                .map(|j| s.iter().map(|r| r[j]).collect())
                .collect();
            &t
        };
        go(s, 0, &mut vec![false; s[0].len()])
    }

    #[test]
    fn pairwise_examples() {
        let a = names(&["a"]);
        let m = pairwise_matrix(SemanticMetric::Fuzzy, &a, &a, None).unwrap();
        assert_eq!(m.scores, vec![vec![1.0]]);

        let ab = names(&["a", "b"]);
        let m = pairwise_matrix(SemanticMetric::Fuzzy, &ab, &a, None).unwrap();
        // fuzzy("b","a") = 1 - 1/1 = 0 by the DP table
        assert_eq!(m.scores, vec![vec![1.0], vec![0.0]]);

        assert_eq!(
            pairwise_matrix(SemanticMetric::Cosine, &a, &a, None),
            Err(SemanticError::MissingProvider(SemanticMetric::Cosine))
        );
        let det = DeterministicProvider::new(1, 4).unwrap();
        assert_eq!(
            pairwise_matrix(SemanticMetric::Bleu, &a, &a, Some(&det)),
            Err(SemanticError::UnexpectedProvider(SemanticMetric::Bleu))
        );
        assert_eq!(
            pairwise_matrix(SemanticMetric::Fuzzy, &CausalGraph::empty(), &a, None),
            Err(SemanticError::EmptyGraph("reference"))
        );
    }

    #[test]
    fn aggregate_examples() {
        let ones = PairwiseMatrix::from_scores(SemanticMetric::Fuzzy, vec![vec![1.0; 3]; 3]);
        for st in [
            Strategy::RefBestMatch,
            Strategy::SymmetricBestMatch,
            Strategy::OptimalAssignmentPenalized,
        ] {
            assert_eq!(aggregate(&ones, st).unwrap(), 1.0);
        }
        let tall = PairwiseMatrix::from_scores(SemanticMetric::Fuzzy, vec![vec![1.0], vec![0.5]]);
        assert_eq!(aggregate(&tall, Strategy::RefBestMatch).unwrap(), 0.75);
        let diag = PairwiseMatrix::from_scores(
            SemanticMetric::Fuzzy,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        );
        assert_eq!(brute_force_assignment(&diag.scores), 2.0);
        assert_eq!(
            aggregate(&diag, Strategy::OptimalAssignmentPenalized).unwrap(),
            1.0
        );
        let empty = PairwiseMatrix::from_scores(SemanticMetric::Fuzzy, vec![]);
        assert_eq!(
            aggregate(&empty, Strategy::RefBestMatch),
            Err(SemanticError::EmptyMatrix)
        );
    }

    #[test]
    fn penalized_assignment_uses_metric_floor() {
        // 1 x 2: one unmatched column
        let row = vec![vec![0.8, 0.6]];
        let fuzzy = PairwiseMatrix::from_scores(SemanticMetric::Fuzzy, row.clone());
        assert!((aggregate(&fuzzy, Strategy::OptimalAssignmentPenalized).unwrap() - 0.4).abs() < 1e-15);
        let dist = PairwiseMatrix::from_scores(SemanticMetric::NegEuclidean, vec![vec![-0.2, -0.6]]);
        // matched -0.2, unmatched contributes the matrix minimum -0.6
        assert!((aggregate(&dist, Strategy::OptimalAssignmentPenalized).unwrap() + 0.4).abs() < 1e-15);
    }

    #[test]
    fn hungarian_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let rows = rng.random_range(1..=5);
            let cols = rng.random_range(1..=5);
            let s: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let expected = brute_force_assignment(&s);
            let m = PairwiseMatrix::from_scores(SemanticMetric::Cosine, s);
            let got = aggregate(&m, Strategy::OptimalAssignmentPenalized).unwrap();
            assert!((got - expected / rows.max(cols) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_graphs_score_maximum() {
        let g = names(&["population", "net increase", "carrying capacity"]);
        let det = DeterministicProvider::new(5, 16).unwrap();
        for st in [
            Strategy::RefBestMatch,
            Strategy::SymmetricBestMatch,
            Strategy::OptimalAssignmentPenalized,
        ] {
            let s = semantic_scores(&g, &g, &det, st).unwrap();
            assert_eq!(
                (s.m1_bleu, s.m2_fuzzy, s.m3_cosine, s.m4_neg_euclid),
                (1.0, 1.0, 1.0, 0.0)
            );
        }
    }

    #[test]
    fn strategy_ids_round_trip() {
        for st in [
            Strategy::RefBestMatch,
            Strategy::SymmetricBestMatch,
            Strategy::OptimalAssignmentPenalized,
        ] {
            assert_eq!(st.id().parse::<Strategy>().unwrap(), st);
        }
        assert!("best".parse::<Strategy>().is_err());
    }
}
