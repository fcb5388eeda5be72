use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::external::ExternalEvaluator;
use crate::dominance::{Bounds, ObjectiveVector};
use crate::engine::{EvalError, Evaluator, RunConfig};
use crate::error::{Error, Result};
use crate::problems::front::{FRONT_POINTS_Q2, FRONT_POINTS_Q3};
use crate::problems::{dtlz1_true_front, AntennaThresholds, Dtlz1, ProxyAntenna};

fn default_timeout() -> f64 {
    300.0
}

/// The problem a configuration file targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Dtlz1 {
        k: usize,
        q: usize,
    },
    /// Analytic six-element array stand-in for the full-wave antenna model.
    Antenna {
        #[serde(default)]
        thresholds: AntennaThresholds,
    },
    /// Child process speaking the line-delimited JSON protocol.
    External {
        command: Vec<String>,
        k: usize,
        q: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default = "default_timeout")]
        timeout_s: f64,
    },
}

/// In-process or external objective oracle selected by a [`ProblemSpec`].
pub enum Problem {
    Dtlz1(Dtlz1),
    Antenna(ProxyAntenna),
    External(ExternalEvaluator),
}

impl Evaluator for Problem {
    fn dim(&self) -> usize {
        match self {
            Problem::Dtlz1(p) => p.dim(),
            Problem::Antenna(p) => p.dim(),
            Problem::External(p) => p.dim(),
        }
    }

    fn n_objectives(&self) -> usize {
        match self {
            Problem::Dtlz1(p) => p.n_objectives(),
            Problem::Antenna(p) => p.n_objectives(),
            Problem::External(p) => p.n_objectives(),
        }
    }

    fn bounds(&self) -> Arc<Bounds> {
        match self {
            Problem::Dtlz1(p) => p.bounds(),
            Problem::Antenna(p) => p.bounds(),
            Problem::External(p) => p.bounds(),
        }
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        match self {
            Problem::Dtlz1(p) => p.evaluate(x),
            Problem::Antenna(p) => p.evaluate(x),
            Problem::External(p) => p.evaluate(x),
        }
    }

    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Vec<Result<Vec<f64>, EvalError>> {
        match self {
            Problem::Dtlz1(p) => p.evaluate_batch(xs),
            Problem::Antenna(p) => p.evaluate_batch(xs),
            Problem::External(p) => p.evaluate_batch(xs),
        }
    }
}

impl ProblemSpec {
    /// Design and objective counts.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            ProblemSpec::Dtlz1 { k, q } | ProblemSpec::External { k, q, .. } => (*k, *q),
            ProblemSpec::Antenna { .. } => (crate::problems::antenna::PROXY_DIM, 3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProblemSpec::Dtlz1 { k, q } => Dtlz1::new(*k, *q).map(|_| ()),
            ProblemSpec::Antenna { thresholds } => thresholds.validate(),
            ProblemSpec::External {
                command,
                k,
                q,
                lower,
                upper,
                timeout_s,
            } => {
                if command.is_empty() {
                    return Err(Error::config("problem.command", "must name a program"));
                }
                if *k == 0 {
                    return Err(Error::config("problem.k", "must be >= 1"));
                }
                if *q < 2 {
                    return Err(Error::config("problem.q", "must be >= 2"));
                }
                if lower.len() != *k || upper.len() != *k {
                    return Err(Error::config("problem.lower", format!("lower and upper need {k} entries")));
                }
                Bounds::new(lower.clone(), upper.clone())
                    .map_err(|e| Error::config("problem.upper", e.to_string()))?;
                if !(*timeout_s > 0.0 && timeout_s.is_finite()) {
                    return Err(Error::config("problem.timeout_s", "must be > 0"));
                }
                Ok(())
            }
        }
    }

    /// Instantiates the evaluator; external problems spawn their child here.
    pub fn build(&self) -> Result<Problem> {
        self.validate()?;
        Ok(match self {
            ProblemSpec::Dtlz1 { k, q } => Problem::Dtlz1(Dtlz1::new(*k, *q)?),
            ProblemSpec::Antenna { thresholds } => {
                Problem::Antenna(ProxyAntenna::new(thresholds.clone())?)
            }
            ProblemSpec::External {
                command,
                k,
                q,
                lower,
                upper,
                timeout_s,
            } => Problem::External(ExternalEvaluator::spawn(
                command,
                *q,
                Arc::new(Bounds::new(lower.clone(), upper.clone())?),
                std::time::Duration::from_secs_f64(*timeout_s),
            )?)
            .check_dim(*k)?,
        })
    }

    /// Sampled Pareto front, when the problem has a known one.
    pub fn true_front(&self) -> Result<Option<Vec<ObjectiveVector>>> {
        match self {
            ProblemSpec::Dtlz1 { q, .. } => {
                let n = if *q == 2 { FRONT_POINTS_Q2 } else { FRONT_POINTS_Q3 };
                Ok(Some(dtlz1_true_front(*q, n)?))
            }
            _ => Ok(None),
        }
    }
}

impl Problem {
    fn check_dim(self, k: usize) -> Result<Self> {
        if self.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: self.dim(),
            });
        }
        Ok(self)
    }
}

/// Contents of one configuration file: a problem and the run parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: ProblemSpec,
    pub run: RunConfig,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ConfigFile = serde_json::from_str(text)
            .map_err(|e| Error::config("config", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        let (k, q) = self.problem.dims();
        self.run.validate(k, q)
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    ConfigFile::from_json(&text)
}
