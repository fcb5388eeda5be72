use crate::dominance::ObjectiveVector;
use crate::error::{Error, Result};

/// Default sample count of the DTLZ1 reference front for two objectives.
pub const FRONT_POINTS_Q2: usize = 10_000;
/// Default sample budget of the DTLZ1 reference lattice for three objectives
/// (200 subdivisions).
pub const FRONT_POINTS_Q3: usize = 20_301;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Uniform simplex lattice on `sum(f) = 0.5, f >= 0`.
///
/// Uses the finest lattice whose point count does not exceed `n`; for two
/// objectives that is exactly `n` evenly spaced points.
pub fn dtlz1_true_front(q: usize, n: usize) -> Result<Vec<ObjectiveVector>> {
    if n < 2 {
        return Err(Error::config("front.n", format!("must be >= 2, got {n}")));
    }
    if q < 2 {
        return Err(Error::config("front.q", format!("must be >= 2, got {q}")));
    }
    let mut divisions = 1;
    while binomial(divisions + 1 + q - 1, q - 1) <= n {
        divisions += 1;
    }
    let mut lattice = Vec::with_capacity(binomial(divisions + q - 1, q - 1));
    compositions(divisions, q, &mut Vec::with_capacity(q), &mut lattice);
    lattice
        .into_iter()
        .map(|c| {
            ObjectiveVector::new(
                c.iter()
                    .map(|&i| 0.5 * i as f64 / divisions as f64)
                    .collect(),
            )
        })
        .collect()
}

/// Mean distance from each archive point to its nearest reference-front sample.
pub fn error_index(archive: &[ObjectiveVector], front: &[ObjectiveVector]) -> Result<f64> {
    if archive.is_empty() {
        return Err(Error::Empty("archive"));
    }
    if front.is_empty() {
        return Err(Error::Empty("reference front"));
    }
    let total: f64 = archive
        .iter()
        .map(|a| {
            front
                .iter()
                .map(|f| {
                    a.as_slice()
                        .iter()
                        .zip(f.as_slice())
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .sum();
    Ok(total / archive.len() as f64)
}
