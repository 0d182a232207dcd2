//! Ranking metrics for binary scorers.

use alloc::vec::Vec;

/// Area under the ROC curve by the rank statistic (Mann-Whitney with
/// average ranks for ties).
pub fn auc_rank(positive_scores: &[f64], negative_scores: &[f64]) -> f64 {
    let p = positive_scores.len();
    let n = negative_scores.len();
    if p == 0 || n == 0 {
        return 0.5;
    }
    let mut all: Vec<(f64, bool)> = positive_scores
        .iter()
        .map(|&s| (s, true))
        .chain(negative_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite scores"));
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0usize;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // average rank of the tie group (1-based ranks i+1 ..= j)
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for item in &all[i..j] {
            if item.1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let u = rank_sum_pos - (p * (p + 1)) as f64 / 2.0;
    u / (p as f64 * n as f64)
}

/// Average precision: mean over positives of the precision at each
/// positive's rank, scores sorted descending (ties broken by original
/// order, positives first within equal scores would bias, so the sort is
/// stable on the interleaved input order).
pub fn average_precision(positive_scores: &[f64], negative_scores: &[f64]) -> f64 {
    let p = positive_scores.len();
    if p == 0 {
        return 0.0;
    }
    let mut all: Vec<(f64, bool)> = positive_scores
        .iter()
        .map(|&s| (s, true))
        .chain(negative_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores"));
    let mut hits = 0usize;
    let mut sum = 0.0f64;
    for (rank0, &(_, is_pos)) in all.iter().enumerate() {
        if is_pos {
            hits += 1;
            sum += hits as f64 / (rank0 + 1) as f64;
        }
    }
    sum / p as f64
}

/// ROC curve points (fpr, tpr), one per distinct score threshold, from
/// (0, 0) to (1, 1).
pub fn roc_points(positive_scores: &[f64], negative_scores: &[f64]) -> Vec<(f64, f64)> {
    let p = positive_scores.len();
    let n = negative_scores.len();
    let mut all: Vec<(f64, bool)> = positive_scores
        .iter()
        .map(|&s| (s, true))
        .chain(negative_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores"));
    let mut points = Vec::with_capacity(all.len() + 1);
    points.push((0.0, 0.0));
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0usize;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            if all[j].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        points.push((
            if n == 0 { 0.0 } else { fp as f64 / n as f64 },
            if p == 0 { 0.0 } else { tp as f64 / p as f64 },
        ));
        i = j;
    }
    points
}
