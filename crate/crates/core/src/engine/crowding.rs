use crate::dominance::ObjectiveVector;

/// Largest crowding value over the interior members of an archive.
///
/// Each objective is sorted independently (stable, so ties keep insertion
/// order). The first and last member of an objective's order are its
/// boundary members; every other member accumulates the gap between its two
/// neighbours in that order. A member counts as interior only if it is not a
/// boundary in any objective. Archives with fewer than three members, or
/// with no interior member, give 0.
pub fn crowding_gamma(objectives: &[ObjectiveVector]) -> f64 {
    let n = objectives.len();
    if n < 3 {
        return 0.0;
    }
    let q = objectives[0].len();
    let mut crowding = vec![0.0; n];
    let mut boundary = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    for j in 0..q {
        order.sort_by(|&a, &b| objectives[a][j].total_cmp(&objectives[b][j]));
        boundary[order[0]] = true;
        boundary[order[n - 1]] = true;
        for w in order.windows(3) {
            crowding[w[1]] += objectives[w[2]][j] - objectives[w[0]][j];
        }
        order.sort_unstable();
    }
    (0..n)
        .filter(|&i| !boundary[i])
        .map(|i| crowding[i])
        .fold(0.0, f64::max)
}

/// Root-mean-square deviation of the last `window` values from their mean.
pub fn window_deviation(history: &[f64], window: usize) -> Option<f64> {
    if window == 0 || history.len() < window {
        return None;
    }
    let tail = &history[history.len() - window..];
    let mean = tail.iter().sum::<f64>() / window as f64;
    let var = tail.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / window as f64;
    Some(var.sqrt())
}

/// True when the crowding history over the last `window` iterations deviates
/// from its window mean by at most `gamma` (RMS).
pub fn stationarity_met(history: &[f64], window: usize, gamma: f64) -> bool {
    window_deviation(history, window).is_some_and(|d| d <= gamma)
}
