//! Per-segment recovery statistics of an aggregate reward curve.

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentStats {
    pub index: usize,
    pub peak: f64,
    /// Offset into the segment of the first value reaching the threshold;
    /// `None` if it is never reached.
    pub steps_to_threshold: Option<usize>,
}

/// Splits `curve` into segments of `period` steps. Every segment reports its
/// peak and the first offset where it reaches `threshold_fraction` times the
/// first segment's peak. A first segment that never rises above zero gives no
/// reachable threshold.
pub fn segment_recovery_stats(curve: &[f64], period: usize, threshold_fraction: f64) -> Result<Vec<SegmentStats>> {
    if period == 0 || curve.is_empty() || !curve.len().is_multiple_of(period) {
        return Err(HarnessError::Spec(format!(
            "curve of {} steps does not split into segments of {period}",
            curve.len()
        )));
    }
    let peak = |seg: &[f64]| seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first_peak = peak(&curve[..period]);
    let threshold = (first_peak > 0.0).then_some(threshold_fraction * first_peak);
    Ok(curve
        .chunks(period)
        .enumerate()
        .map(|(index, seg)| SegmentStats {
            index,
            peak: peak(seg),
            steps_to_threshold: threshold.and_then(|th| seg.iter().position(|&v| v >= th)),
        })
        .collect())
}

/// Mean steps-to-threshold over segments `first..`, counting a segment that
/// never reaches the threshold as `censor` steps.
pub fn mean_steps_to_threshold(stats: &[SegmentStats], first: usize, censor: usize) -> Option<f64> {
    let tail = stats.get(first..).filter(|t| !t.is_empty())?;
    let total: usize = tail.iter().map(|s| s.steps_to_threshold.unwrap_or(censor)).sum();
    Some(total as f64 / tail.len() as f64)
}
