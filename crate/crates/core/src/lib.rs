//! Surrogate-assisted multi-objective optimization.
//!
//! A steady-state evolutionary loop keeps an epsilon-dominance archive of
//! exactly evaluated designs. Offspring are first screened with an Ordinary
//! Kriging surrogate; only those the prediction says could enter the archive
//! are sent to the expensive evaluator, and every exact result is fed back
//! into the surrogate. A plain epsilon-MOEA baseline, benchmark problems and
//! a best-compromise selector complete the crate.

pub mod decision;
pub mod dominance;
pub mod engine;
pub mod error;
pub mod io;
pub mod problems;
pub mod rng;
pub mod surrogate;
pub mod variation;

pub use decision::{mmd_select, mmd_select_objectives, MmdReport};
pub use dominance::{
    dominates, eps_dominates, sbd_dominates, Bounds, DesignVector, EpsilonConfig,
    EvaluatedSolution, FitnessRecord, ObjectiveVector, ParetoArchive, Provenance,
};
pub use engine::{run, Algorithm, Engine, EvalError, Evaluator, RunConfig, RunResult, StopReason};
pub use error::{Error, Result};
pub use surrogate::{KrigingConfig, KrigingModel, TrainingSet};
pub use variation::VariationParams;
