use serde::{Deserialize, Serialize};

use super::{MetricId, PipelineError};

pub const BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `BINS + 1` bin boundaries.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Order statistics and a fixed 20-bin histogram of one metric over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub metric: MetricId,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Lower middle element for even counts.
    pub median: f64,
    pub histogram: Histogram,
}

/// Histogram range for a metric: its nominal scale, except M4 which spans
/// the observed `[min, 0]` (or `[-1, 0]` when every value is 0).
fn bin_range(metric: MetricId, observed_min: f64) -> (f64, f64) {
    match metric.scale() {
        (Some(lo), hi) => (lo, hi),
        (None, hi) => {
            let lo = observed_min.min(hi);
            if lo < hi {
                (lo, hi)
            } else {
                (hi - 1.0, hi)
            }
        }
    }
}

pub fn summarize(values: &[f64], metric: MetricId) -> Result<DistributionSummary, PipelineError> {
    if values.is_empty() {
        return Err(PipelineError::EmptySummary(metric));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = sorted.len();
    let (min, max) = (sorted[0], sorted[count - 1]);
    let mean = sorted.iter().sum::<f64>() / count as f64;
    let median = sorted[(count - 1) / 2];

    let (lo, hi) = bin_range(metric, min);
    let width = hi - lo;
    let edges = (0..=BINS)
        .map(|i| if i == BINS { hi } else { lo + width * i as f64 / BINS as f64 })
        .collect();
    let mut counts = vec![0u64; BINS];
    for &v in &sorted {
        let pos = ((v - lo) / width * BINS as f64).floor();
        let bin = if pos < 0.0 { 0 } else { (pos as usize).min(BINS - 1) };
        counts[bin] += 1;
    }
    Ok(DistributionSummary {
        metric,
        count,
        min,
        max,
        mean,
        median,
        histogram: Histogram { edges, counts },
    })
}
