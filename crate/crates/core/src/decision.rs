//! Best-compromise selection by minimum Manhattan distance.

use serde::Serialize;

use crate::dominance::{EvaluatedSolution, ObjectiveVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmdReport {
    /// Index of the chosen member in the input order.
    pub index: usize,
    #[serde(skip)]
    pub chosen: Option<EvaluatedSolution>,
    pub normalized_costs: Vec<Vec<f64>>,
    pub ideal: Vec<f64>,
    pub l1_distances: Vec<f64>,
}

/// Chooses the objective vector closest, in the l1 norm, to the ideal point
/// after dividing every objective by its range over the set.
///
/// An objective with zero range is normalized to 0 for all members. Ties go to
/// the lowest index.
pub fn mmd_select_objectives(objectives: &[ObjectiveVector]) -> Result<MmdReport> {
    let first = objectives.first().ok_or(Error::Empty("archive"))?;
    let q = first.len();
    if let Some(o) = objectives.iter().find(|o| o.len() != q) {
        return Err(Error::DimensionMismatch {
            expected: q,
            found: o.len(),
        });
    }
    let ranges: Vec<f64> = (0..q)
        .map(|j| {
            let (lo, hi) = objectives
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| {
                    (lo.min(o[j]), hi.max(o[j]))
                });
            hi - lo
        })
        .collect();
    let normalized_costs: Vec<Vec<f64>> = objectives
        .iter()
        .map(|o| {
            (0..q)
                .map(|j| if ranges[j] > 0.0 { o[j] / ranges[j] } else { 0.0 })
                .collect()
        })
        .collect();
    let ideal: Vec<f64> = (0..q)
        .map(|j| {
            normalized_costs
                .iter()
                .map(|c| c[j])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let l1_distances: Vec<f64> = normalized_costs
        .iter()
        .map(|c| c.iter().zip(&ideal).map(|(v, i)| (v - i).abs()).sum())
        .collect();
    let index = l1_distances
        .iter()
        .enumerate()
        .fold(0, |best, (i, d)| if *d < l1_distances[best] { i } else { best });
    Ok(MmdReport {
        index,
        chosen: None,
        normalized_costs,
        ideal,
        l1_distances,
    })
}

/// [`mmd_select_objectives`] over archive members, keeping the chosen solution.
pub fn mmd_select(members: &[EvaluatedSolution]) -> Result<MmdReport> {
    let objectives: Vec<ObjectiveVector> = members.iter().map(|m| m.phi().clone()).collect();
    let mut report = mmd_select_objectives(&objectives)?;
    report.chosen = Some(members[report.index].clone());
    Ok(report)
}
