//! Domain types and dominance relations.
//!
//! Three relations are provided: standard Pareto dominance, box-quantized
//! epsilon-dominance, and the provenance-aware dominance used to compare
//! simulated solutions against surrogate predictions with confidence bounds.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box constraints of the design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Empty("bounds"));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidDesign(format!(
                    "bound {k} must satisfy lb < ub, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit hypercube `[0, 1]^k`.
    pub fn unit(k: usize) -> Self {
        Self {
            lower: vec![0.0; k],
            upper: vec![1.0; k],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.dim()
            && values
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn clamp(&self, k: usize, v: f64) -> f64 {
        v.clamp(self.lower[k], self.upper[k])
    }

    /// Maps a point affinely onto `[0, 1]^k`.
    pub fn normalize(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(k, v)| (v - self.lower[k]) / self.width(k))
            .collect()
    }
}

/// A point of the box-constrained search space.
#[derive(Debug, Clone)]
pub struct DesignVector {
    values: Vec<f64>,
    bounds: Arc<Bounds>,
}

impl DesignVector {
    pub fn new(values: Vec<f64>, bounds: Arc<Bounds>) -> Result<Self> {
        if values.len() != bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: bounds.dim(),
                found: values.len(),
            });
        }
        if !bounds.contains(&values) {
            return Err(Error::InvalidDesign(format!(
                "{values:?} lies outside its bounds"
            )));
        }
        Ok(Self { values, bounds })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> &Arc<Bounds> {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

impl PartialEq for DesignVector {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && *self.bounds == *other.bounds
    }
}

/// Cost values of one design; lower is better in every entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(phi: Vec<f64>) -> Result<Self> {
        if phi.len() < 2 {
            return Err(Error::InvalidObjectives(format!(
                "at least two objectives required, got {}",
                phi.len()
            )));
        }
        if let Some(v) = phi.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidObjectives(format!("non-finite entry {v}")));
        }
        Ok(Self(phi))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, q: usize) -> &f64 {
        &self.0[q]
    }
}

/// Per-objective box widths of the epsilon grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EpsilonConfig(Vec<f64>);

impl EpsilonConfig {
    pub fn new(eps: Vec<f64>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::config("eps", "must list one value per objective"));
        }
        if let Some(e) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::config("eps", format!("entries must be > 0, got {e}")));
        }
        Ok(Self(eps))
    }

    pub fn uniform(eps: f64, q: usize) -> Result<Self> {
        Self::new(vec![eps; q])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Where an objective vector came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    /// Computed exactly by the evaluator.
    Simulated,
    /// Surrogate prediction with per-objective confidence radius.
    Predicted { delta: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessRecord {
    pub phi: ObjectiveVector,
    pub provenance: Provenance,
}

impl FitnessRecord {
    pub fn simulated(phi: ObjectiveVector) -> Self {
        Self {
            phi,
            provenance: Provenance::Simulated,
        }
    }

    pub fn predicted(phi: ObjectiveVector, delta: Vec<f64>) -> Result<Self> {
        if delta.len() != phi.len() {
            return Err(Error::DimensionMismatch {
                expected: phi.len(),
                found: delta.len(),
            });
        }
        if let Some(d) = delta.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::InvalidObjectives(format!(
                "confidence radius must be finite and >= 0, got {d}"
            )));
        }
        Ok(Self {
            phi,
            provenance: Provenance::Predicted { delta },
        })
    }

    pub fn is_simulated(&self) -> bool {
        matches!(self.provenance, Provenance::Simulated)
    }

    fn delta(&self, q: usize) -> f64 {
        match &self.provenance {
            Provenance::Simulated => 0.0,
            Provenance::Predicted { delta } => delta[q],
        }
    }

    /// Lower confidence bound `phi_q - delta_q`.
    pub fn lower(&self, q: usize) -> f64 {
        self.phi[q] - self.delta(q)
    }

    /// Upper confidence bound `phi_q + delta_q`.
    pub fn upper(&self, q: usize) -> f64 {
        self.phi[q] + self.delta(q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSolution {
    pub design: DesignVector,
    pub fitness: FitnessRecord,
}

impl EvaluatedSolution {
    pub fn new(design: DesignVector, fitness: FitnessRecord) -> Self {
        Self { design, fitness }
    }

    pub fn phi(&self) -> &ObjectiveVector {
        &self.fitness.phi
    }
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
fn weakly_better_somewhere_strict(q: usize, a: impl Fn(usize) -> f64, b: impl Fn(usize) -> f64) -> bool {
    let mut strict = false;
    for i in 0..q {
        let (x, y) = (a(i), b(i));
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Standard Pareto dominance.
///
/// Panics if the vectors have different lengths.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors differ in length");
    weakly_better_somewhere_strict(a.len(), |q| a[q], |q| b[q])
}

/// Box indices `floor(phi_q / eps_q)` and the box corner they denote.
pub fn eps_quantize(phi: &ObjectiveVector, eps: &EpsilonConfig) -> (Vec<i64>, Vec<f64>) {
    assert_eq!(phi.len(), eps.len(), "epsilon config differs in length");
    phi.as_slice()
        .iter()
        .zip(eps.as_slice())
        .map(|(p, e)| {
            let b = (p / e).floor();
            (b as i64, b * e)
        })
        .unzip()
}

/// Euclidean distance between `phi` and its box corner.
pub fn eps_distance(phi: &ObjectiveVector, eps: &EpsilonConfig) -> f64 {
    let (_, corner) = eps_quantize(phi, eps);
    phi.as_slice()
        .iter()
        .zip(&corner)
        .map(|(p, c)| (p - c) * (p - c))
        .sum::<f64>()
        .sqrt()
}

/// Epsilon-dominance: box dominance, or equal boxes and a strictly smaller
/// distance to the box corner.
pub fn eps_dominates(a: &ObjectiveVector, b: &ObjectiveVector, eps: &EpsilonConfig) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors differ in length");
    let (box_a, _) = eps_quantize(a, eps);
    let (box_b, _) = eps_quantize(b, eps);
    if box_a == box_b {
        eps_distance(a, eps) < eps_distance(b, eps)
    } else {
        weakly_better_somewhere_strict(a.len(), |q| box_a[q] as f64, |q| box_b[q] as f64)
    }
}

/// Provenance-aware dominance between simulated and predicted solutions.
///
/// Predicted pairs compare lower confidence bounds; a simulated solution is
/// compared against the upper bound of a predicted one, and a predicted one
/// must dominate a simulated one even at its own upper bound.
pub fn sbd_dominates(a: &EvaluatedSolution, b: &EvaluatedSolution) -> bool {
    let (fa, fb) = (&a.fitness, &b.fitness);
    assert_eq!(fa.phi.len(), fb.phi.len(), "objective vectors differ in length");
    let q = fa.phi.len();
    match (fa.is_simulated(), fb.is_simulated()) {
        (false, false) => weakly_better_somewhere_strict(q, |i| fa.lower(i), |i| fb.lower(i)),
        (true, false) => weakly_better_somewhere_strict(q, |i| fa.phi[i], |i| fb.upper(i)),
        (false, true) => weakly_better_somewhere_strict(q, |i| fa.upper(i), |i| fb.phi[i]),
        (true, true) => dominates(&fa.phi, &fb.phi),
    }
}

/// Members not dominated by any other member, in input order.
pub fn nondominated_subset(g: &[EvaluatedSolution]) -> Result<Vec<EvaluatedSolution>> {
    if g.is_empty() {
        return Err(Error::Empty("solution set"));
    }
    Ok(nondominated_indices(g)
        .into_iter()
        .map(|i| g[i].clone())
        .collect())
}

pub(crate) fn nondominated_indices(g: &[EvaluatedSolution]) -> Vec<usize> {
    (0..g.len())
        .filter(|&i| !g.iter().any(|other| dominates(other.phi(), g[i].phi())))
        .collect()
}

/// Members not epsilon-dominated by any other member, in input order.
pub fn non_eps_dominated_subset(
    g: &[EvaluatedSolution],
    eps: &EpsilonConfig,
) -> Result<Vec<EvaluatedSolution>> {
    if g.is_empty() {
        return Err(Error::Empty("solution set"));
    }
    Ok(g.iter()
        .filter(|s| !g.iter().any(|other| eps_dominates(other.phi(), s.phi(), eps)))
        .cloned()
        .collect())
}

/// Variable-size set of simulated, mutually non-epsilon-dominated solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoArchive {
    members: Vec<EvaluatedSolution>,
    eps: EpsilonConfig,
}

impl ParetoArchive {
    pub fn new(eps: EpsilonConfig) -> Self {
        Self {
            members: Vec::new(),
            eps,
        }
    }

    /// Builds the archive from a set of simulated solutions, keeping input order.
    pub fn from_solutions(
        solutions: impl IntoIterator<Item = EvaluatedSolution>,
        eps: EpsilonConfig,
    ) -> Result<Self> {
        let mut archive = Self::new(eps);
        for s in solutions {
            archive.insert(s)?;
        }
        Ok(archive)
    }

    pub fn members(&self) -> &[EvaluatedSolution] {
        &self.members
    }

    pub fn eps(&self) -> &EpsilonConfig {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.members.iter().map(|m| m.phi().clone()).collect()
    }

    /// True when some member epsilon-dominates `phi`.
    pub fn eps_dominated(&self, phi: &ObjectiveVector) -> bool {
        self.members
            .iter()
            .any(|m| eps_dominates(m.phi(), phi, &self.eps))
    }

    /// Inserts a simulated candidate; returns whether it was admitted.
    ///
    /// A candidate that is epsilon-dominated, or whose objective vector equals
    /// that of an existing member, leaves the archive unchanged. Otherwise every
    /// member the candidate epsilon-dominates is dropped and the candidate is
    /// appended.
    pub fn insert(&mut self, candidate: EvaluatedSolution) -> Result<bool> {
        if !candidate.fitness.is_simulated() {
            return Err(Error::NotSimulated);
        }
        if let Some(m) = self.members.first() {
            if m.phi().len() != candidate.phi().len() {
                return Err(Error::DimensionMismatch {
                    expected: m.phi().len(),
                    found: candidate.phi().len(),
                });
            }
        }
        if self
            .members
            .iter()
            .any(|m| m.phi() == candidate.phi() || eps_dominates(m.phi(), candidate.phi(), &self.eps))
        {
            return Ok(false);
        }
        let eps = &self.eps;
        self.members
            .retain(|m| !eps_dominates(candidate.phi(), m.phi(), eps));
        self.members.push(candidate);
        Ok(true)
    }
}
