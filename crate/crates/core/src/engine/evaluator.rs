use std::sync::Arc;

use thiserror::Error;

use crate::dominance::Bounds;

/// Outcome of a failed exact evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// This design could not be evaluated; the run may continue.
    #[error("evaluation failed: {0}")]
    Failed(String),
    /// The evaluator is unusable; the run must stop.
    #[error("evaluator aborted: {0}")]
    Fatal(String),
}

/// Exact objective oracle over a box-constrained design space.
///
/// Implementations must be deterministic for a fixed design.
pub trait Evaluator {
    fn dim(&self) -> usize;

    fn n_objectives(&self) -> usize;

    fn bounds(&self) -> Arc<Bounds>;

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError>;

    /// Evaluates several designs; results are returned in input order.
    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Vec<Result<Vec<f64>, EvalError>> {
        xs.iter().map(|x| self.evaluate(x)).collect()
    }
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn n_objectives(&self) -> usize {
        (**self).n_objectives()
    }

    fn bounds(&self) -> Arc<Bounds> {
        (**self).bounds()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        (**self).evaluate(x)
    }

    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Vec<Result<Vec<f64>, EvalError>> {
        (**self).evaluate_batch(xs)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Box<E> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn n_objectives(&self) -> usize {
        (**self).n_objectives()
    }

    fn bounds(&self) -> Arc<Bounds> {
        (**self).bounds()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        (**self).evaluate(x)
    }

    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Vec<Result<Vec<f64>, EvalError>> {
        (**self).evaluate_batch(xs)
    }
}
