//! Steady-state population replacement.

use rand::Rng;

use crate::dominance::{dominates, sbd_dominates, EvaluatedSolution};

/// What to do with an offspring, before any random pick is made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// Offspring discarded, population unchanged.
    Keep,
    /// Offspring replaces one member drawn uniformly from these indices.
    ReplaceOneOf(Vec<usize>),
}

/// Replacement decision following the provenance-aware ladder, checked in
/// order:
///
/// 1. some member dominates the offspring: keep;
/// 2. the offspring dominates predicted members: replace one of them;
/// 3. the offspring dominates simulated members: replace one of them;
/// 4. mutual non-dominance with predicted members present: replace a
///    predicted member;
/// 5. mutual non-dominance, all members simulated: keep when the offspring is
///    predicted, otherwise replace a simulated member.
pub fn sbd_decision(population: &[EvaluatedSolution], offspring: &EvaluatedSolution) -> Decision {
    if population.iter().any(|m| sbd_dominates(m, offspring)) {
        return Decision::Keep;
    }
    let (pred, sim): (Vec<usize>, Vec<usize>) =
        (0..population.len()).partition(|&i| !population[i].fitness.is_simulated());
    let beaten = |idx: &[usize]| -> Vec<usize> {
        idx.iter()
            .copied()
            .filter(|&i| sbd_dominates(offspring, &population[i]))
            .collect()
    };
    let dominated_pred = beaten(&pred);
    if !dominated_pred.is_empty() {
        return Decision::ReplaceOneOf(dominated_pred);
    }
    let dominated_sim = beaten(&sim);
    if !dominated_sim.is_empty() {
        return Decision::ReplaceOneOf(dominated_sim);
    }
    if !pred.is_empty() {
        return Decision::ReplaceOneOf(pred);
    }
    if offspring.fitness.is_simulated() {
        Decision::ReplaceOneOf(sim)
    } else {
        Decision::Keep
    }
}

/// Replacement decision of the baseline steady-state algorithm, using
/// standard dominance on objective values only: discard a dominated offspring,
/// otherwise replace a member it dominates if any, otherwise replace any member.
pub fn std_decision(population: &[EvaluatedSolution], offspring: &EvaluatedSolution) -> Decision {
    if population.iter().any(|m| dominates(m.phi(), offspring.phi())) {
        return Decision::Keep;
    }
    let dominated: Vec<usize> = (0..population.len())
        .filter(|&i| dominates(offspring.phi(), population[i].phi()))
        .collect();
    if !dominated.is_empty() {
        return Decision::ReplaceOneOf(dominated);
    }
    Decision::ReplaceOneOf((0..population.len()).collect())
}

/// Applies a decision; returns the replaced index, if any.
pub fn apply_decision<R: Rng + ?Sized>(
    population: &mut [EvaluatedSolution],
    offspring: EvaluatedSolution,
    decision: Decision,
    rng: &mut R,
) -> Option<usize> {
    match decision {
        Decision::Keep => None,
        Decision::ReplaceOneOf(candidates) => {
            let i = candidates[rng.gen_range(0..candidates.len())];
            population[i] = offspring;
            Some(i)
        }
    }
}

/// Provenance-aware population update; the population size never changes.
pub fn population_update<R: Rng + ?Sized>(
    population: &mut [EvaluatedSolution],
    offspring: EvaluatedSolution,
    rng: &mut R,
) -> Option<usize> {
    let decision = sbd_decision(population, &offspring);
    apply_decision(population, offspring, decision, rng)
}
