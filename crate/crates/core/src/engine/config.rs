use serde::{Deserialize, Deserializer, Serialize};

use crate::dominance::EpsilonConfig;
use crate::error::{Error, Result};
use crate::surrogate::KrigingConfig;
use crate::variation::VariationParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Surrogate-assisted loop with provenance-aware replacement.
    #[default]
    Sbd,
    /// Plain epsilon-MOEA, every offspring evaluated exactly.
    Std,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Sbd => "sbd",
            Algorithm::Std => "std",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sbd" => Ok(Algorithm::Sbd),
            "std" => Ok(Algorithm::Std),
            other => Err(Error::config("algo", format!("must be `sbd` or `std`, got `{other}`"))),
        }
    }
}

/// When the crowding value enters the stationarity window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaSampling {
    /// Only after iterations that changed the archive, so the window counts
    /// archive updates. Screened-out offspring leave the series untouched.
    #[default]
    ArchiveUpdate,
    /// After every iteration.
    EveryIteration,
}

/// Control parameters of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub algo: Algorithm,
    /// Iteration cap `I`.
    pub max_iterations: usize,
    /// Population size `P`.
    pub population: usize,
    /// Stationarity window `W`.
    pub window: usize,
    /// Stationarity threshold on the windowed RMS deviation of the crowding value.
    pub gamma: f64,
    /// Box widths, one per objective; a single number applies to all.
    #[serde(deserialize_with = "scalar_or_vec")]
    pub eps: Vec<f64>,
    /// Initial training-set size.
    pub t0: usize,
    /// Budget of exact evaluations after initialization.
    pub t_rl_max: usize,
    /// Optional per-objective convergence thresholds.
    #[serde(default)]
    pub zeta: Option<Vec<f64>>,
    #[serde(default)]
    pub variation: VariationParams,
    #[serde(default)]
    pub kriging: KrigingConfig,
    #[serde(default)]
    pub seed: u64,
    /// Add exact evaluations to the surrogate. Turning this off freezes the
    /// model after initialization.
    #[serde(default = "yes")]
    pub reinforcement: bool,
    /// Stop when the crowding history becomes stationary.
    #[serde(default = "yes")]
    pub stop_on_stationarity: bool,
    #[serde(default)]
    pub gamma_sampling: GammaSampling,
}

fn yes() -> bool {
    true
}

fn scalar_or_vec<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Eps {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(match Eps::deserialize(d)? {
        Eps::One(e) => vec![e],
        Eps::Many(v) => v,
    })
}

impl RunConfig {
    /// Settings of the small DTLZ1 benchmark; `eps` is expanded to `q` objectives.
    pub fn dtlz1_small(q: usize) -> Self {
        Self {
            algo: Algorithm::Sbd,
            max_iterations: 15_000,
            population: 15,
            window: 40,
            gamma: 0.02,
            eps: vec![0.02; q],
            t0: 30,
            t_rl_max: 3_000,
            zeta: None,
            variation: VariationParams::default(),
            kriging: KrigingConfig::default(),
            seed: 0,
            reinforcement: true,
            stop_on_stationarity: true,
            gamma_sampling: GammaSampling::ArchiveUpdate,
        }
    }

    /// Box widths expanded to `q` objectives.
    pub fn epsilon(&self, q: usize) -> Result<EpsilonConfig> {
        match self.eps.len() {
            1 => EpsilonConfig::uniform(self.eps[0], q),
            n if n == q => EpsilonConfig::new(self.eps.clone()),
            n => Err(Error::config(
                "eps",
                format!("needs 1 or {q} entries, got {n}"),
            )),
        }
    }

    /// Checks the configuration against a problem with `k` variables and `q` objectives.
    pub fn validate(&self, k: usize, q: usize) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::config("max_iterations", "must be >= 1"));
        }
        if self.window < 1 || self.window > self.max_iterations {
            return Err(Error::config("window", "must satisfy 1 <= window <= max_iterations"));
        }
        if self.population < 2 {
            return Err(Error::config("population", "must be >= 2"));
        }
        if self.t0 < 2 {
            return Err(Error::config("t0", "must be >= 2"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::config("gamma", "must be > 0"));
        }
        self.epsilon(q)?;
        if let Some(z) = &self.zeta {
            if z.len() != q {
                return Err(Error::config("zeta", format!("needs {q} entries, got {}", z.len())));
            }
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("zeta", "entries must be finite"));
            }
        }
        if k == 0 {
            return Err(Error::config("k", "must be >= 1"));
        }
        self.variation.validate()?;
        self.kriging.validate()
    }
}
