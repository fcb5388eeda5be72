//! Latin hypercube sampling and the Ordinary Kriging surrogate.

pub mod kriging;
pub mod lhs;

pub use kriging::{KrigingConfig, KrigingModel, ModelDump, ObjectiveDump, TrainingSet};
pub use lhs::lhs_sample;
