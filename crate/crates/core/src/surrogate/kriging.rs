//! Ordinary Kriging with a Gaussian correlation family.
//!
//! One independent model is kept per objective. Inputs are mapped onto the
//! unit cube and each objective's responses are standardized before fitting.
//! The correlation matrix is held as a packed lower Cholesky factor that
//! grows by one row per reinforcement; hyperparameters are re-estimated only
//! on refresh boundaries.

use std::sync::Arc;

use log::{debug, warn};
use rand::seq::index;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::dominance::{Bounds, DesignVector, FitnessRecord, ObjectiveVector};
use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::surrogate::lhs::lhs_unit;

/// Two normalized inputs closer than this in every coordinate are duplicates.
pub const DUPLICATE_TOL: f64 = 1e-12;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KrigingConfig {
    /// Search box for `log10(theta_k)`.
    pub log10_theta_min: f64,
    pub log10_theta_max: f64,
    /// Multi-start count of the likelihood search.
    pub starts: usize,
    /// Likelihood evaluations allowed per start.
    pub evals_per_start: usize,
    /// Minimum number of reinforcements between hyperparameter refreshes.
    pub refresh_every: usize,
    /// A refresh also waits until the training set grew by this factor.
    pub refresh_growth: f64,
    /// Largest training subset used inside the likelihood search.
    pub max_search_points: usize,
    /// Relative diagonal regularization, scaled by `trace(R) / T`.
    pub nugget: f64,
    pub max_nugget: f64,
}

impl Default for KrigingConfig {
    fn default() -> Self {
        Self {
            log10_theta_min: -3.0,
            log10_theta_max: 2.0,
            starts: 8,
            evals_per_start: 100,
            refresh_every: 50,
            refresh_growth: 1.25,
            max_search_points: 300,
            nugget: 1e-10,
            max_nugget: 1e-4,
        }
    }
}

impl KrigingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.log10_theta_min < self.log10_theta_max) {
            return Err(Error::config(
                "kriging.log10_theta_min",
                "must be below log10_theta_max",
            ));
        }
        if self.starts == 0 || self.evals_per_start < 3 {
            return Err(Error::config(
                "kriging.starts",
                "need at least one start with three evaluations",
            ));
        }
        if self.refresh_every == 0 {
            return Err(Error::config("kriging.refresh_every", "must be >= 1"));
        }
        if !(self.refresh_growth >= 1.0) {
            return Err(Error::config("kriging.refresh_growth", "must be >= 1"));
        }
        if self.max_search_points < 2 {
            return Err(Error::config("kriging.max_search_points", "must be >= 2"));
        }
        if !(self.nugget > 0.0 && self.nugget <= self.max_nugget) {
            return Err(Error::config(
                "kriging.nugget",
                "must be > 0 and not exceed max_nugget",
            ));
        }
        Ok(())
    }
}

/// Input/output pairs the surrogate is trained on.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    bounds: Arc<Bounds>,
    designs: Vec<DesignVector>,
    outputs: Vec<ObjectiveVector>,
    normalized: Vec<Vec<f64>>,
}

impl TrainingSet {
    pub fn new(bounds: Arc<Bounds>) -> Self {
        Self {
            bounds,
            designs: Vec::new(),
            outputs: Vec::new(),
            normalized: Vec::new(),
        }
    }

    /// Builds a training set, rejecting duplicate inputs.
    pub fn from_pairs(
        bounds: Arc<Bounds>,
        pairs: impl IntoIterator<Item = (DesignVector, ObjectiveVector)>,
    ) -> Result<Self> {
        let mut set = Self::new(bounds);
        for (x, phi) in pairs {
            if !set.push(x, phi)? {
                return Err(Error::Data(format!(
                    "duplicate training input at index {}",
                    set.len()
                )));
            }
        }
        Ok(set)
    }

    /// Adds a pair; returns `false` without change when the input is a duplicate.
    pub fn push(&mut self, x: DesignVector, phi: ObjectiveVector) -> Result<bool> {
        if x.dim() != self.bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.bounds.dim(),
                found: x.dim(),
            });
        }
        if let Some(q) = self.outputs.first().map(ObjectiveVector::len) {
            if q != phi.len() {
                return Err(Error::DimensionMismatch {
                    expected: q,
                    found: phi.len(),
                });
            }
        }
        if self.find(x.values()).is_some() {
            return Ok(false);
        }
        self.normalized.push(self.bounds.normalize(x.values()));
        self.designs.push(x);
        self.outputs.push(phi);
        Ok(true)
    }

    /// Index of a stored input equal to `x` within [`DUPLICATE_TOL`].
    pub fn find(&self, x: &[f64]) -> Option<usize> {
        let u = self.bounds.normalize(x);
        self.normalized.iter().position(|v| {
            v.iter()
                .zip(&u)
                .all(|(a, b)| (a - b).abs() <= DUPLICATE_TOL)
        })
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn bounds(&self) -> &Arc<Bounds> {
        &self.bounds
    }

    pub fn designs(&self) -> &[DesignVector] {
        &self.designs
    }

    pub fn outputs(&self) -> &[ObjectiveVector] {
        &self.outputs
    }

    pub fn n_objectives(&self) -> usize {
        self.outputs.first().map_or(0, ObjectiveVector::len)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..n {
        s += a[i] * b[i];
    }
    s
}

fn correlation(theta: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..theta.len() {
        let d = a[k] - b[k];
        s += theta[k] * d * d;
    }
    (-s).exp()
}

/// Lower Cholesky factor stored row by row; row `i` holds `i + 1` entries.
#[derive(Debug, Clone, Default)]
struct PackedCholesky {
    data: Vec<f64>,
    n: usize,
}

impl PackedCholesky {
    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.data[start..start + i + 1]
    }

    fn diag(&self, i: usize) -> f64 {
        self.data[i * (i + 1) / 2 + i]
    }

    /// Solves `L v = rhs` for the leading `rhs.len()` rows.
    fn forward(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rhs.len());
        for (i, r) in rhs.iter().enumerate() {
            let row = self.row(i);
            let s = dot(&row[..i], &out);
            out.push((r - s) / row[i]);
        }
        out
    }

    /// Solves `L^T x = rhs`.
    fn backward(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        for i in (0..self.n).rev() {
            let row = self.row(i);
            x[i] /= row[i];
            let xi = x[i];
            for (xj, lij) in x[..i].iter_mut().zip(&row[..i]) {
                *xj -= lij * xi;
            }
        }
        x
    }

    /// Appends the row for a new point with correlations `r` to the existing
    /// points and diagonal entry `diag`. Returns `false` if the extended
    /// matrix is not numerically positive definite.
    fn extend(&mut self, r: &[f64], diag: f64) -> bool {
        debug_assert_eq!(r.len(), self.n);
        let row = self.forward(r);
        let d2 = diag - dot(&row, &row);
        if !(d2 > 0.0 && d2.is_finite()) {
            return false;
        }
        self.data.extend_from_slice(&row);
        self.data.push(d2.sqrt());
        self.n += 1;
        true
    }

    fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.diag(i).ln()).sum::<f64>()
    }
}

/// Ordinary Kriging state for one objective.
#[derive(Debug, Clone)]
struct ObjectiveModel {
    theta: Vec<f64>,
    nugget: f64,
    y_shift: f64,
    y_scale: f64,
    chol: PackedCholesky,
    /// `L^-1 1`
    w: Vec<f64>,
    /// `L^-1 y` on standardized responses.
    z: Vec<f64>,
    mu: f64,
    sigma2: f64,
    /// `R^-1 (y - mu 1)`
    alpha: Vec<f64>,
}

impl ObjectiveModel {
    /// Factorizes the full correlation matrix, escalating the nugget on failure.
    fn build(
        inputs: &[Vec<f64>],
        ys: &[f64],
        theta: Vec<f64>,
        y_shift: f64,
        y_scale: f64,
        mut nugget: f64,
        max_nugget: f64,
    ) -> Result<Self> {
        loop {
            if let Some(chol) = factorize(inputs, &theta, nugget) {
                let mut m = Self {
                    theta,
                    nugget,
                    y_shift,
                    y_scale,
                    w: chol.forward(&vec![1.0; inputs.len()]),
                    z: chol.forward(ys),
                    chol,
                    mu: 0.0,
                    sigma2: 0.0,
                    alpha: Vec::new(),
                };
                m.update_estimates();
                return Ok(m);
            }
            if nugget >= max_nugget {
                return Err(Error::Numerical(format!(
                    "correlation matrix not positive definite with nugget {nugget:e}"
                )));
            }
            nugget = (nugget * 10.0).min(max_nugget);
            warn!("escalating kriging nugget to {nugget:e}");
        }
    }

    fn standardize(&self, y: f64) -> f64 {
        (y - self.y_shift) / self.y_scale
    }

    fn update_estimates(&mut self) {
        let n = self.w.len() as f64;
        let ww = dot(&self.w, &self.w);
        self.mu = dot(&self.w, &self.z) / ww;
        let resid: Vec<f64> = self
            .z
            .iter()
            .zip(&self.w)
            .map(|(z, w)| z - self.mu * w)
            .collect();
        self.sigma2 = dot(&resid, &resid) / n;
        self.alpha = self.chol.backward(&resid);
    }

    /// Adds one point with fixed hyperparameters. Returns `false` when the
    /// factor could not be extended.
    fn extend(&mut self, inputs: &[Vec<f64>], y: f64) -> bool {
        let (new, old) = inputs.split_last().expect("non-empty inputs");
        let r: Vec<f64> = old
            .iter()
            .map(|p| correlation(&self.theta, p, new))
            .collect();
        if !self.chol.extend(&r, 1.0 + self.nugget) {
            return false;
        }
        let i = self.chol.n - 1;
        let row = self.chol.row(i);
        let ys = self.standardize(y);
        self.z.push((ys - dot(&row[..i], &self.z)) / row[i]);
        self.w.push((1.0 - dot(&row[..i], &self.w)) / row[i]);
        self.update_estimates();
        true
    }

    /// Standardized mean and mean-squared error at normalized input `u`.
    fn predict(&self, inputs: &[Vec<f64>], u: &[f64], with_mse: bool) -> (f64, f64) {
        let r: Vec<f64> = inputs
            .iter()
            .map(|p| correlation(&self.theta, p, u))
            .collect();
        let mean = self.mu + dot(&r, &self.alpha);
        if !with_mse {
            return (mean, 0.0);
        }
        let v = self.chol.forward(&r);
        let ww = dot(&self.w, &self.w);
        let vw = 1.0 - dot(&v, &self.w);
        let s = 1.0 - dot(&v, &v) + vw * vw / ww;
        (mean, (self.sigma2 * s).max(0.0))
    }
}

fn factorize(inputs: &[Vec<f64>], theta: &[f64], nugget: f64) -> Option<PackedCholesky> {
    let n = inputs.len();
    let mut chol = PackedCholesky {
        data: Vec::with_capacity(n * (n + 1) / 2),
        n: 0,
    };
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        r.clear();
        r.extend(inputs[..i].iter().map(|p| correlation(theta, p, &inputs[i])));
        if !chol.extend(&r, 1.0 + nugget) {
            return None;
        }
    }
    Some(chol)
}

fn standardization(ys: &[f64]) -> (f64, f64) {
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let var = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd > 0.0 && sd.is_finite() {
        (mean, sd)
    } else {
        (mean, 1.0)
    }
}

/// Concentrated log-likelihood over a training subset, with per-dimension
/// squared distances precomputed.
struct Likelihood {
    n: usize,
    dim: usize,
    /// Packed strictly-lower pairs, `dim` squared differences each.
    sqdist: Vec<f64>,
    ys: Vec<f64>,
    nugget: f64,
}

impl Likelihood {
    fn new(points: &[&Vec<f64>], ys: Vec<f64>, nugget: f64) -> Self {
        let n = points.len();
        let dim = points.first().map_or(0, |p| p.len());
        let mut sqdist = Vec::with_capacity(n * (n.saturating_sub(1)) / 2 * dim);
        for i in 0..n {
            for j in 0..i {
                for k in 0..dim {
                    let d = points[i][k] - points[j][k];
                    sqdist.push(d * d);
                }
            }
        }
        Self {
            n,
            dim,
            sqdist,
            ys,
            nugget,
        }
    }

    fn eval(&self, log10_theta: &[f64]) -> f64 {
        let theta: Vec<f64> = log10_theta.iter().map(|t| 10f64.powf(*t)).collect();
        let mut chol = PackedCholesky {
            data: Vec::with_capacity(self.n * (self.n + 1) / 2),
            n: 0,
        };
        let mut r = Vec::with_capacity(self.n);
        let mut offset = 0;
        for i in 0..self.n {
            r.clear();
            for _ in 0..i {
                let d = &self.sqdist[offset..offset + self.dim];
                offset += self.dim;
                r.push((-dot(&theta, d)).exp());
            }
            if !chol.extend(&r, 1.0 + self.nugget) {
                return f64::NEG_INFINITY;
            }
        }
        let w = chol.forward(&vec![1.0; self.n]);
        let z = chol.forward(&self.ys);
        let mu = dot(&w, &z) / dot(&w, &w);
        let ss: f64 = z.iter().zip(&w).map(|(z, w)| (z - mu * w).powi(2)).sum();
        let sigma2 = ss / self.n as f64;
        if !(sigma2 > 0.0) {
            return f64::NEG_INFINITY;
        }
        -0.5 * self.n as f64 * sigma2.ln() - 0.5 * chol.log_det()
    }
}

/// Multi-start coordinate-wise golden-section maximization of the likelihood.
fn search_theta(lik: &Likelihood, config: &KrigingConfig, rng: &mut StreamRng) -> Vec<f64> {
    let (lo, hi) = (config.log10_theta_min, config.log10_theta_max);
    let dim = lik.dim;
    let starts = lhs_unit(config.starts, dim, rng);
    let mut best = (f64::NEG_INFINITY, vec![0.0; dim]);
    for start in starts {
        let mut x: Vec<f64> = start.iter().map(|u| lo + u * (hi - lo)).collect();
        let mut fx = lik.eval(&x);
        let mut evals = 1;
        let mut radius = 0.25 * (hi - lo);
        'sweeps: loop {
            for k in 0..dim {
                if evals + 6 > config.evals_per_start {
                    break 'sweeps;
                }
                let mut a = (x[k] - radius).max(lo);
                let mut b = (x[k] + radius).min(hi);
                let mut probe = x.clone();
                let mut at = |t: f64| {
                    probe[k] = t;
                    lik.eval(&probe)
                };
                let mut c = b - GOLDEN * (b - a);
                let mut d = a + GOLDEN * (b - a);
                let mut fc = at(c);
                let mut fd = at(d);
                for _ in 0..4 {
                    if fc >= fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - GOLDEN * (b - a);
                        fc = at(c);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + GOLDEN * (b - a);
                        fd = at(d);
                    }
                }
                evals += 6;
                let (t, ft) = if fc >= fd { (c, fc) } else { (d, fd) };
                if ft > fx {
                    x[k] = t;
                    fx = ft;
                }
            }
            radius = (radius * 0.5).max(0.02);
        }
        if fx > best.0 {
            best = (fx, x);
        }
    }
    if !best.0.is_finite() {
        warn!("likelihood search found no finite value; using theta = 1");
    }
    best.1.iter().map(|t| 10f64.powf(*t)).collect()
}

/// Per-objective Ordinary Kriging surrogate.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    config: KrigingConfig,
    training: TrainingSet,
    normalized: Vec<Vec<f64>>,
    objectives: Vec<ObjectiveModel>,
    hyper_seed: u64,
    refreshes: u64,
    next_refresh: usize,
}

impl KrigingModel {
    /// Fits hyperparameters by maximum likelihood and factorizes the model.
    pub fn fit(training: TrainingSet, config: KrigingConfig, hyper_seed: u64) -> Result<Self> {
        config.validate()?;
        check_training(&training)?;
        let mut model = Self {
            config,
            normalized: normalized_inputs(&training),
            training,
            objectives: Vec::new(),
            hyper_seed,
            refreshes: 0,
            next_refresh: 0,
        };
        model.refresh()?;
        Ok(model)
    }

    /// Fits with given correlation parameters (one vector per objective).
    pub fn fit_with_theta(
        training: TrainingSet,
        config: KrigingConfig,
        theta: Vec<Vec<f64>>,
    ) -> Result<Self> {
        config.validate()?;
        check_training(&training)?;
        let q = training.n_objectives();
        if theta.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                found: theta.len(),
            });
        }
        let normalized = normalized_inputs(&training);
        let mut objectives = Vec::with_capacity(q);
        for (j, th) in theta.into_iter().enumerate() {
            if th.len() != training.bounds().dim() || th.iter().any(|t| !(*t > 0.0)) {
                return Err(Error::Data(format!(
                    "theta for objective {j} must hold {} positive values",
                    training.bounds().dim()
                )));
            }
            let raw: Vec<f64> = training.outputs().iter().map(|o| o[j]).collect();
            let (shift, scale) = standardization(&raw);
            let ys: Vec<f64> = raw.iter().map(|y| (y - shift) / scale).collect();
            objectives.push(ObjectiveModel::build(
                &normalized,
                &ys,
                th,
                shift,
                scale,
                config.nugget,
                config.max_nugget,
            )?);
        }
        let next_refresh = next_refresh(&config, training.len());
        Ok(Self {
            config,
            normalized,
            training,
            objectives,
            hyper_seed: 0,
            refreshes: 1,
            next_refresh,
        })
    }

    fn refresh(&mut self) -> Result<()> {
        let t = self.training.len();
        let q = self.training.n_objectives();
        let mut rng = StreamRng::seed_from_u64(self.hyper_seed);
        rng.set_stream(self.refreshes);
        let subset: Vec<usize> = if t > self.config.max_search_points {
            let mut idx = index::sample(&mut rng, t, self.config.max_search_points).into_vec();
            idx.sort_unstable();
            idx
        } else {
            (0..t).collect()
        };
        let points: Vec<&Vec<f64>> = subset.iter().map(|&i| &self.normalized[i]).collect();
        let mut objectives = Vec::with_capacity(q);
        for j in 0..q {
            let raw: Vec<f64> = self.training.outputs().iter().map(|o| o[j]).collect();
            let (shift, scale) = standardization(&raw);
            let ys: Vec<f64> = raw.iter().map(|y| (y - shift) / scale).collect();
            let sub_ys: Vec<f64> = subset.iter().map(|&i| ys[i]).collect();
            let constant = sub_ys.iter().all(|y| *y == sub_ys[0]);
            let theta = if constant {
                vec![1.0; self.training.bounds().dim()]
            } else {
                let lik = Likelihood::new(&points, sub_ys, self.config.nugget);
                search_theta(&lik, &self.config, &mut rng)
            };
            debug!("objective {j}: theta {theta:?} at T = {t}");
            objectives.push(ObjectiveModel::build(
                &self.normalized,
                &ys,
                theta,
                shift,
                scale,
                self.config.nugget,
                self.config.max_nugget,
            )?);
        }
        self.objectives = objectives;
        self.refreshes += 1;
        self.next_refresh = next_refresh(&self.config, t);
        Ok(())
    }

    /// Adds an exactly evaluated pair. Returns `false`, leaving the model
    /// untouched, when the input duplicates a training input.
    pub fn reinforce(&mut self, x: DesignVector, phi: ObjectiveVector) -> Result<bool> {
        if phi.len() != self.objectives.len() {
            return Err(Error::DimensionMismatch {
                expected: self.objectives.len(),
                found: phi.len(),
            });
        }
        if !self.training.push(x.clone(), phi.clone())? {
            debug!("discarding duplicate training input {:?}", x.values());
            return Ok(false);
        }
        self.normalized.push(self.training.bounds().normalize(x.values()));
        if self.training.len() >= self.next_refresh {
            self.refresh()?;
            return Ok(true);
        }
        for (j, m) in self.objectives.iter_mut().enumerate() {
            if !m.extend(&self.normalized, phi[j]) {
                warn!("incremental factor update failed; refactorizing objective {j}");
                let ys: Vec<f64> = self
                    .training
                    .outputs()
                    .iter()
                    .map(|o| m.standardize(o[j]))
                    .collect();
                *m = ObjectiveModel::build(
                    &self.normalized,
                    &ys,
                    m.theta.clone(),
                    m.y_shift,
                    m.y_scale,
                    (m.nugget * 10.0).min(self.config.max_nugget),
                    self.config.max_nugget,
                )?;
            }
        }
        Ok(true)
    }

    fn check_input(&self, x: &[f64]) -> Result<Vec<f64>> {
        let bounds = self.training.bounds();
        if x.len() != bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: bounds.dim(),
                found: x.len(),
            });
        }
        Ok(bounds.normalize(x))
    }

    /// Predicted objectives and confidence radii, both in raw units.
    pub fn predict_values(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let u = self.check_input(x)?;
        Ok(self
            .objectives
            .iter()
            .map(|m| {
                let (mean, mse) = m.predict(&self.normalized, &u, true);
                (m.y_shift + m.y_scale * mean, m.y_scale * mse.sqrt())
            })
            .unzip())
    }

    /// Predicted objectives only; skips the mean-squared-error solve.
    pub fn predict_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        let u = self.check_input(x)?;
        Ok(self
            .objectives
            .iter()
            .map(|m| m.y_shift + m.y_scale * m.predict(&self.normalized, &u, false).0)
            .collect())
    }

    /// Prediction as a fitness record with `Predicted` provenance.
    pub fn predict(&self, x: &DesignVector) -> Result<FitnessRecord> {
        let (phi, delta) = self.predict_values(x.values())?;
        FitnessRecord::predicted(ObjectiveVector::new(phi)?, delta)
    }

    pub fn training(&self) -> &TrainingSet {
        &self.training
    }

    pub fn config(&self) -> &KrigingConfig {
        &self.config
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn theta(&self, q: usize) -> &[f64] {
        &self.objectives[q].theta
    }

    /// Process mean in raw units.
    pub fn process_mean(&self, q: usize) -> f64 {
        let m = &self.objectives[q];
        m.y_shift + m.y_scale * m.mu
    }

    /// Process variance in raw units.
    pub fn process_variance(&self, q: usize) -> f64 {
        let m = &self.objectives[q];
        m.sigma2 * m.y_scale * m.y_scale
    }

    /// Scale of the output standardization; divide a raw radius by it to get
    /// the normalized one.
    pub fn output_scale(&self, q: usize) -> f64 {
        self.objectives[q].y_scale
    }

    pub fn nugget(&self, q: usize) -> f64 {
        self.objectives[q].nugget
    }

    /// Training size at which hyperparameters are next re-estimated.
    pub fn next_refresh(&self) -> usize {
        self.next_refresh
    }

    pub fn to_dump(&self) -> ModelDump {
        ModelDump {
            config: self.config.clone(),
            bounds: (**self.training.bounds()).clone(),
            hyper_seed: self.hyper_seed,
            refreshes: self.refreshes,
            next_refresh: self.next_refresh,
            designs: self
                .training
                .designs()
                .iter()
                .map(|d| d.values().to_vec())
                .collect(),
            outputs: self
                .training
                .outputs()
                .iter()
                .map(|o| o.as_slice().to_vec())
                .collect(),
            objectives: self
                .objectives
                .iter()
                .map(|m| ObjectiveDump {
                    theta: m.theta.clone(),
                    nugget: m.nugget,
                    y_shift: m.y_shift,
                    y_scale: m.y_scale,
                })
                .collect(),
        }
    }

    pub fn from_dump(dump: ModelDump) -> Result<Self> {
        dump.config.validate()?;
        let bounds = Arc::new(dump.bounds);
        let pairs = dump
            .designs
            .into_iter()
            .zip(dump.outputs)
            .map(|(x, phi)| Ok((DesignVector::new(x, Arc::clone(&bounds))?, ObjectiveVector::new(phi)?)))
            .collect::<Result<Vec<_>>>()?;
        let training = TrainingSet::from_pairs(Arc::clone(&bounds), pairs)?;
        check_training(&training)?;
        if dump.objectives.len() != training.n_objectives() {
            return Err(Error::DimensionMismatch {
                expected: training.n_objectives(),
                found: dump.objectives.len(),
            });
        }
        let normalized = normalized_inputs(&training);
        let objectives = dump
            .objectives
            .into_iter()
            .enumerate()
            .map(|(j, o)| {
                let ys: Vec<f64> = training
                    .outputs()
                    .iter()
                    .map(|v| (v[j] - o.y_shift) / o.y_scale)
                    .collect();
                ObjectiveModel::build(
                    &normalized,
                    &ys,
                    o.theta,
                    o.y_shift,
                    o.y_scale,
                    o.nugget,
                    dump.config.max_nugget.max(o.nugget),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: dump.config,
            training,
            normalized,
            objectives,
            hyper_seed: dump.hyper_seed,
            refreshes: dump.refreshes,
            next_refresh: dump.next_refresh,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_dump())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_dump(serde_json::from_str(text)?)
    }
}

fn next_refresh(config: &KrigingConfig, t: usize) -> usize {
    let grown = (t as f64 * config.refresh_growth).ceil() as usize;
    (t + config.refresh_every).max(grown)
}

fn normalized_inputs(training: &TrainingSet) -> Vec<Vec<f64>> {
    training
        .designs()
        .iter()
        .map(|d| training.bounds().normalize(d.values()))
        .collect()
}

fn check_training(training: &TrainingSet) -> Result<()> {
    if training.len() < 2 {
        return Err(Error::Data(format!(
            "at least two training pairs required, got {}",
            training.len()
        )));
    }
    Ok(())
}

/// Serializable snapshot of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDump {
    pub config: KrigingConfig,
    pub bounds: Bounds,
    pub hyper_seed: u64,
    pub refreshes: u64,
    pub next_refresh: usize,
    pub designs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
    pub objectives: Vec<ObjectiveDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveDump {
    pub theta: Vec<f64>,
    pub nugget: f64,
    pub y_shift: f64,
    pub y_scale: f64,
}
