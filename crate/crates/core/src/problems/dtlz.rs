use std::f64::consts::PI;
use std::sync::Arc;

use crate::dominance::Bounds;
use crate::engine::evaluator::{EvalError, Evaluator};
use crate::error::{Error, Result};

/// DTLZ1 objectives for `x` in `[0, 1]^K` with `q` objectives.
///
/// The distance function `g` runs over the last `K - q + 1` coordinates and
/// vanishes when they all equal 0.5, which places the point on the linear
/// front `sum(f) = 0.5`.
pub fn dtlz1(x: &[f64], q: usize) -> Result<Vec<f64>> {
    if q < 2 || x.len() < q {
        return Err(Error::InvalidDesign(format!(
            "DTLZ1 needs K >= Q >= 2, got K = {}, Q = {q}",
            x.len()
        )));
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidDesign(format!("DTLZ1 input {v} outside [0, 1]")));
    }
    let (head, tail) = x.split_at(q - 1);
    let g = 100.0
        * (tail.len() as f64
            + tail
                .iter()
                .map(|xi| (xi - 0.5).powi(2) - (20.0 * PI * (xi - 0.5)).cos())
                .sum::<f64>());
    let scale = 0.5 * (1.0 + g);
    let f = (0..q)
        .map(|i| {
            let kept = q - 1 - i;
            let mut v = scale * head[..kept].iter().product::<f64>();
            if i > 0 {
                v *= 1.0 - head[kept];
            }
            v
        })
        .collect();
    Ok(f)
}

/// In-process DTLZ1 evaluator.
#[derive(Debug, Clone)]
pub struct Dtlz1 {
    k: usize,
    q: usize,
    bounds: Arc<Bounds>,
}

impl Dtlz1 {
    pub fn new(k: usize, q: usize) -> Result<Self> {
        if !(2..=3).contains(&q) {
            return Err(Error::config("problem.q", format!("DTLZ1 supports Q in {{2, 3}}, got {q}")));
        }
        if k < q {
            return Err(Error::config("problem.k", format!("must be >= Q = {q}, got {k}")));
        }
        Ok(Self {
            k,
            q,
            bounds: Arc::new(Bounds::unit(k)),
        })
    }
}

impl Evaluator for Dtlz1 {
    fn dim(&self) -> usize {
        self.k
    }

    fn n_objectives(&self) -> usize {
        self.q
    }

    fn bounds(&self) -> Arc<Bounds> {
        Arc::clone(&self.bounds)
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        dtlz1(x, self.q).map_err(|e| EvalError::Failed(e.to_string()))
    }
}
