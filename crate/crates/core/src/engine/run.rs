use std::sync::Arc;
use std::time::Instant;

use log::{debug, info, warn};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, GammaSampling, RunConfig};
use super::crowding::{crowding_gamma, stationarity_met};
use super::evaluator::{EvalError, Evaluator};
use super::population::{apply_decision, population_update, std_decision};
use crate::dominance::{
    Bounds, DesignVector, EvaluatedSolution, FitnessRecord, ObjectiveVector, ParetoArchive,
};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, stream_seed, Stream, StreamRng};
use crate::surrogate::{lhs_sample, KrigingModel, TrainingSet};
use crate::variation::make_offspring;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Stationarity,
    Budget,
    MaxIterations,
    ZetaMet,
}

/// Per-iteration progress snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub c_fw: usize,
    pub t_rl: usize,
    pub archive_size: usize,
    pub gamma: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub algo: Algorithm,
    pub archive: ParetoArchive,
    /// Successful exact evaluations, initialization included.
    pub c_fw: usize,
    /// Exact evaluations after initialization.
    pub t_rl: usize,
    /// Iterations performed.
    pub i_stop: usize,
    /// Crowding value after initialization, then after every iteration.
    pub gamma_history: Vec<f64>,
    pub stop_reason: StopReason,
    /// Exact evaluations that failed; these consume no budget.
    pub failed: usize,
    pub wall_time: f64,
}

/// Fraction of exact evaluations saved by `sbd` relative to `std`.
pub fn time_saving(std: &RunResult, sbd: &RunResult) -> f64 {
    time_saving_counts(std.c_fw, sbd.c_fw)
}

pub fn time_saving_counts(c_std: usize, c_sbd: usize) -> f64 {
    if c_std == 0 {
        return 0.0;
    }
    (c_std as f64 - c_sbd as f64) / c_std as f64
}

/// Wall-clock counterpart of [`time_saving`].
pub fn wall_time_saving(std: &RunResult, sbd: &RunResult) -> f64 {
    if std.wall_time <= 0.0 {
        return 0.0;
    }
    (std.wall_time - sbd.wall_time) / std.wall_time
}

/// State of a running optimization. Initialization happens in [`Engine::new`];
/// each [`Engine::step`] performs one steady-state iteration.
pub struct Engine<E> {
    config: RunConfig,
    evaluator: E,
    bounds: Arc<Bounds>,
    q: usize,
    archive: ParetoArchive,
    population: Vec<EvaluatedSolution>,
    model: Option<KrigingModel>,
    c_fw: usize,
    t_rl: usize,
    iteration: usize,
    failed: usize,
    gamma_history: Vec<f64>,
    /// Crowding values sampled for the stationarity test.
    gamma_samples: Vec<f64>,
    /// Consecutive samples with at least three archive members.
    populated_streak: usize,
    /// Set when the current iteration added a member to the archive.
    archive_changed: bool,
    variation_rng: StreamRng,
    replacement_rng: StreamRng,
    started: Instant,
    stopped: Option<StopReason>,
}

fn to_phi(values: Vec<f64>, q: usize) -> std::result::Result<ObjectiveVector, EvalError> {
    if values.len() != q {
        return Err(EvalError::Failed(format!(
            "expected {q} objectives, got {}",
            values.len()
        )));
    }
    ObjectiveVector::new(values).map_err(|e| EvalError::Failed(e.to_string()))
}

impl<E: Evaluator> Engine<E> {
    /// Validates the configuration and runs the initial exact evaluations.
    pub fn new(config: RunConfig, evaluator: E) -> Result<Self> {
        let k = evaluator.dim();
        let q = evaluator.n_objectives();
        config.validate(k, q)?;
        let bounds = evaluator.bounds();
        if bounds.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: bounds.dim(),
            });
        }
        let eps = config.epsilon(q)?;
        let seed = config.seed;
        let mut engine = Self {
            archive: ParetoArchive::new(eps),
            population: Vec::new(),
            model: None,
            c_fw: 0,
            t_rl: 0,
            iteration: 0,
            failed: 0,
            gamma_history: Vec::new(),
            gamma_samples: Vec::new(),
            populated_streak: 0,
            archive_changed: false,
            variation_rng: stream_rng(seed, Stream::Variation),
            replacement_rng: stream_rng(seed, Stream::Replacement),
            started: Instant::now(),
            stopped: None,
            config,
            evaluator,
            bounds,
            q,
        };
        match engine.config.algo {
            Algorithm::Sbd => engine.initialize_sbd()?,
            Algorithm::Std => engine.initialize_std()?,
        }
        engine.record_gamma(true);
        info!(
            "initialized {} run: C_FW={}, |A|={}",
            engine.config.algo,
            engine.c_fw,
            engine.archive.len()
        );
        Ok(engine)
    }

    fn evaluate_initial(&mut self, n: usize) -> Result<Vec<(DesignVector, ObjectiveVector)>> {
        let mut rng = stream_rng(self.config.seed, Stream::Sampling);
        let designs = lhs_sample(n, &self.bounds, &mut rng)?;
        let xs: Vec<Vec<f64>> = designs.iter().map(|d| d.values().to_vec()).collect();
        let results = self.evaluator.evaluate_batch(&xs);
        if results.len() != designs.len() {
            return Err(Error::Evaluation(format!(
                "evaluator returned {} results for {} designs",
                results.len(),
                designs.len()
            )));
        }
        let mut pairs = Vec::with_capacity(n);
        for (d, r) in designs.into_iter().zip(results) {
            match r.and_then(|v| to_phi(v, self.q)) {
                Ok(phi) => pairs.push((d, phi)),
                Err(EvalError::Fatal(m)) => return Err(Error::EvaluatorAborted(m)),
                Err(EvalError::Failed(m)) => {
                    return Err(Error::Evaluation(format!(
                        "initial design {:?}: {m}",
                        d.values()
                    )))
                }
            }
        }
        self.c_fw += pairs.len();
        Ok(pairs)
    }

    fn initialize_sbd(&mut self) -> Result<()> {
        let pairs = self.evaluate_initial(self.config.t0)?;
        let training = TrainingSet::from_pairs(Arc::clone(&self.bounds), pairs.iter().cloned())?;
        let model = KrigingModel::fit(
            training,
            self.config.kriging.clone(),
            stream_seed(self.config.seed, Stream::HyperSearch),
        )?;
        let solutions: Vec<EvaluatedSolution> = pairs
            .into_iter()
            .map(|(d, phi)| EvaluatedSolution::new(d, FitnessRecord::simulated(phi)))
            .collect();
        for s in &solutions {
            self.archive.insert(s.clone())?;
        }
        // archive members first, in archive order; the rest drawn from the
        // remaining training designs
        let p = self.config.population;
        self.population = self.archive.members().iter().take(p).cloned().collect();
        let mut rest: Vec<&EvaluatedSolution> = solutions
            .iter()
            .filter(|s| !self.population.iter().any(|m| m.design == s.design))
            .collect();
        rest.shuffle(&mut self.replacement_rng);
        let mut it = rest.into_iter();
        while self.population.len() < p {
            match it.next() {
                Some(s) => self.population.push(s.clone()),
                None => {
                    let s = solutions
                        .choose(&mut self.replacement_rng)
                        .expect("training set is non-empty");
                    self.population.push(s.clone());
                }
            }
        }
        self.model = Some(model);
        Ok(())
    }

    fn initialize_std(&mut self) -> Result<()> {
        let pairs = self.evaluate_initial(self.config.population)?;
        for (d, phi) in pairs {
            let s = EvaluatedSolution::new(d, FitnessRecord::simulated(phi));
            self.archive.insert(s.clone())?;
            self.population.push(s);
        }
        Ok(())
    }

    fn record_gamma(&mut self, sample: bool) {
        let g = crowding_gamma(&self.archive.objectives());
        self.gamma_history.push(g);
        if !sample {
            return;
        }
        self.gamma_samples.push(g);
        if self.archive.len() >= 3 {
            self.populated_streak += 1;
        } else {
            self.populated_streak = 0;
        }
    }

    fn exact(&mut self, design: &DesignVector) -> Result<Option<ObjectiveVector>> {
        match self
            .evaluator
            .evaluate(design.values())
            .and_then(|v| to_phi(v, self.q))
        {
            Ok(phi) => Ok(Some(phi)),
            Err(EvalError::Failed(m)) => {
                warn!("iteration {}: evaluation failed: {m}", self.iteration + 1);
                self.failed += 1;
                Ok(None)
            }
            Err(EvalError::Fatal(m)) => Err(Error::EvaluatorAborted(m)),
        }
    }

    fn sbd_iteration(&mut self) -> Result<()> {
        let design = make_offspring(
            &self.archive,
            &self.population,
            &self.config.variation,
            &mut self.variation_rng,
        )?;
        let model = self.model.as_ref().expect("surrogate fitted at initialization");
        if let Some(j) = model.training().find(design.values()) {
            // already simulated: reuse the stored exact value
            let phi = model.training().outputs()[j].clone();
            let s = EvaluatedSolution::new(design, FitnessRecord::simulated(phi));
            self.archive_changed |= self.archive.insert(s.clone())?;
            population_update(&mut self.population, s, &mut self.replacement_rng);
            return Ok(());
        }
        let mean = ObjectiveVector::new(model.predict_mean(design.values())?)?;
        if self.archive.eps_dominated(&mean) {
            let fitness = model.predict(&design)?;
            let s = EvaluatedSolution::new(design, fitness);
            population_update(&mut self.population, s, &mut self.replacement_rng);
            return Ok(());
        }
        let Some(phi) = self.exact(&design)? else {
            return Ok(());
        };
        self.c_fw += 1;
        self.t_rl += 1;
        if self.config.reinforcement {
            self.model
                .as_mut()
                .expect("surrogate fitted at initialization")
                .reinforce(design.clone(), phi.clone())?;
        }
        let s = EvaluatedSolution::new(design, FitnessRecord::simulated(phi));
        self.archive_changed |= self.archive.insert(s.clone())?;
        population_update(&mut self.population, s, &mut self.replacement_rng);
        Ok(())
    }

    fn std_iteration(&mut self) -> Result<()> {
        let design = make_offspring(
            &self.archive,
            &self.population,
            &self.config.variation,
            &mut self.variation_rng,
        )?;
        let Some(phi) = self.exact(&design)? else {
            return Ok(());
        };
        self.c_fw += 1;
        let s = EvaluatedSolution::new(design, FitnessRecord::simulated(phi));
        self.archive_changed |= self.archive.insert(s.clone())?;
        let decision = std_decision(&self.population, &s);
        apply_decision(&mut self.population, s, decision, &mut self.replacement_rng);
        Ok(())
    }

    fn budget_exhausted(&self) -> bool {
        self.config.algo == Algorithm::Sbd && self.t_rl >= self.config.t_rl_max
    }

    fn zeta_met(&self) -> bool {
        self.config.zeta.as_ref().is_some_and(|z| {
            self.archive
                .members()
                .iter()
                .any(|m| m.phi().as_slice().iter().zip(z).all(|(p, z)| p <= z))
        })
    }

    fn stop_check(&self) -> Option<StopReason> {
        if self.config.stop_on_stationarity
            && self.populated_streak >= self.config.window
            && stationarity_met(&self.gamma_samples, self.config.window, self.config.gamma)
        {
            return Some(StopReason::Stationarity);
        }
        if self.zeta_met() {
            return Some(StopReason::ZetaMet);
        }
        if self.budget_exhausted() {
            return Some(StopReason::Budget);
        }
        if self.iteration >= self.config.max_iterations {
            return Some(StopReason::MaxIterations);
        }
        None
    }

    /// Performs one iteration unless the run has already stopped. Returns the
    /// stop reason once a stopping condition holds.
    pub fn step(&mut self) -> Result<Option<StopReason>> {
        if self.stopped.is_none() {
            // conditions already true after initialization (zero budget, ...)
            if self.iteration == 0 {
                if self.budget_exhausted() {
                    self.stopped = Some(StopReason::Budget);
                } else if self.zeta_met() {
                    self.stopped = Some(StopReason::ZetaMet);
                }
            }
        }
        if self.stopped.is_some() {
            return Ok(self.stopped);
        }
        self.archive_changed = false;
        match self.config.algo {
            Algorithm::Sbd => self.sbd_iteration()?,
            Algorithm::Std => self.std_iteration()?,
        }
        self.iteration += 1;
        let sample = match self.config.gamma_sampling {
            GammaSampling::ArchiveUpdate => self.archive_changed,
            GammaSampling::EveryIteration => true,
        };
        self.record_gamma(sample);
        debug_assert_eq!(self.population.len(), self.config.population);
        self.stopped = self.stop_check();
        if let Some(r) = self.stopped {
            info!(
                "stopped after {} iterations ({r:?}): C_FW={}, T_RL={}, |A|={}",
                self.iteration,
                self.c_fw,
                self.t_rl,
                self.archive.len()
            );
        } else if self.iteration % 1000 == 0 {
            debug!(
                "iteration {}: C_FW={}, |A|={}, gamma={:.4}",
                self.iteration,
                self.c_fw,
                self.archive.len(),
                self.gamma_history.last().copied().unwrap_or(0.0)
            );
        }
        Ok(self.stopped)
    }

    pub fn trace_record(&self) -> TraceRecord {
        TraceRecord {
            iteration: self.iteration,
            c_fw: self.c_fw,
            t_rl: self.t_rl,
            archive_size: self.archive.len(),
            gamma: self.gamma_history.last().copied().unwrap_or(0.0),
        }
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn archive(&self) -> &ParetoArchive {
        &self.archive
    }

    pub fn population(&self) -> &[EvaluatedSolution] {
        &self.population
    }

    /// The surrogate; `None` for the baseline algorithm.
    pub fn model(&self) -> Option<&KrigingModel> {
        self.model.as_ref()
    }

    pub fn c_fw(&self) -> usize {
        self.c_fw
    }

    pub fn t_rl(&self) -> usize {
        self.t_rl
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn gamma_history(&self) -> &[f64] {
        &self.gamma_history
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stopped
    }

    /// Consumes the engine. Runs that have not stopped report `max_iterations`.
    pub fn finish(self) -> RunResult {
        RunResult {
            algo: self.config.algo,
            archive: self.archive,
            c_fw: self.c_fw,
            t_rl: self.t_rl,
            i_stop: self.iteration,
            gamma_history: self.gamma_history,
            stop_reason: self.stopped.unwrap_or(StopReason::MaxIterations),
            failed: self.failed,
            wall_time: self.started.elapsed().as_secs_f64(),
        }
    }
}

/// Runs to completion.
pub fn run<E: Evaluator>(config: RunConfig, evaluator: E) -> Result<RunResult> {
    run_with_observer(config, evaluator, |_| {})
}

/// Runs to completion, handing a trace record to `observer` after
/// initialization and after every iteration.
pub fn run_with_observer<E: Evaluator>(
    config: RunConfig,
    evaluator: E,
    mut observer: impl FnMut(&TraceRecord),
) -> Result<RunResult> {
    let mut engine = Engine::new(config, evaluator)?;
    observer(&engine.trace_record());
    loop {
        let before = engine.iteration();
        let stop = engine.step()?;
        if engine.iteration() != before {
            observer(&engine.trace_record());
        }
        if stop.is_some() {
            break;
        }
    }
    Ok(engine.finish())
}
