//! Cost terms for a series-fed radar antenna and an analytic stand-in for
//! the full-wave solver.
//!
//! The three costs share one hinge form: the mean over frequency samples of
//! the normalized threshold violation, counting only strict violations.

use std::f64::consts::PI;
use std::sync::Arc;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::dominance::Bounds;
use crate::engine::evaluator::{EvalError, Evaluator};
use crate::error::{Error, Result};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Floor applied to every dB quantity of the proxy.
pub const DB_FLOOR: f64 = -80.0;
/// Elevation grid step in degrees.
pub const THETA_STEP_DEG: f64 = 0.25;
/// Number of radiating elements of the proxy array.
pub const N_ELEMENTS: usize = 6;
/// Length of a proxy design vector.
pub const PROXY_DIM: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaThresholds {
    /// Hz
    pub f_min: f64,
    /// Hz
    pub f_max: f64,
    /// Number of frequency samples.
    pub b: usize,
    /// dB
    pub s11_th: f64,
    /// dB
    pub sll_th: f64,
    /// degrees
    pub bdd_th: f64,
}

impl Default for AntennaThresholds {
    fn default() -> Self {
        Self {
            f_min: 76e9,
            f_max: 79e9,
            b: 7,
            s11_th: -15.0,
            sll_th: -20.0,
            bdd_th: 0.25,
        }
    }
}

impl AntennaThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_min > 0.0 && self.f_min < self.f_max && self.f_max.is_finite()) {
            return Err(Error::config("thresholds.f_min", "need 0 < f_min < f_max"));
        }
        if self.b == 0 {
            return Err(Error::config("thresholds.b", "must be >= 1"));
        }
        if !(self.s11_th.is_finite() && self.s11_th != 0.0) {
            return Err(Error::config("thresholds.s11_th", "must be finite and non-zero"));
        }
        if !(self.sll_th.is_finite() && self.sll_th != 0.0) {
            return Err(Error::config("thresholds.sll_th", "must be finite and non-zero"));
        }
        if !(self.bdd_th.is_finite() && self.bdd_th > 0.0) {
            return Err(Error::config("thresholds.bdd_th", "must be > 0"));
        }
        Ok(())
    }

    /// Frequency samples `f_min + (b - 1)(f_max - f_min)/(B - 1)`.
    pub fn frequencies(&self) -> Vec<f64> {
        if self.b == 1 {
            return vec![self.f_min];
        }
        (0..self.b)
            .map(|i| self.f_min + i as f64 * (self.f_max - self.f_min) / (self.b - 1) as f64)
            .collect()
    }

    pub fn center_frequency(&self) -> f64 {
        0.5 * (self.f_min + self.f_max)
    }
}

/// Reflection and elevation-pattern samples over the frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaResponse {
    pub frequencies: Vec<f64>,
    pub s11_db: Vec<f64>,
    /// One peak-normalized pattern per frequency, sampled on `theta_grid`.
    pub pattern_db: Vec<Vec<f64>>,
    /// Degrees, strictly increasing.
    pub theta_grid: Vec<f64>,
}

impl AntennaResponse {
    fn check_grid(&self, th: &AntennaThresholds) -> Result<()> {
        let expected = th.frequencies();
        let matches = self.frequencies.len() == expected.len()
            && self
                .frequencies
                .iter()
                .zip(&expected)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs());
        if !matches {
            return Err(Error::InvalidObjectives(format!(
                "response sampled at {} frequencies does not match the {}-point threshold grid",
                self.frequencies.len(),
                expected.len()
            )));
        }
        if self.s11_db.len() != expected.len() || self.pattern_db.len() != expected.len() {
            return Err(Error::DimensionMismatch {
                expected: expected.len(),
                found: self.s11_db.len().min(self.pattern_db.len()),
            });
        }
        Ok(())
    }
}

fn hinge(value: f64, threshold: f64, norm: f64) -> f64 {
    let excess = value - threshold;
    if excess > 0.0 {
        excess / norm
    } else {
        0.0
    }
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Reflection cost: mean normalized excess of `|S11|` (dB) over its threshold.
pub fn phi_s11(resp: &AntennaResponse, th: &AntennaThresholds) -> Result<f64> {
    resp.check_grid(th)?;
    Ok(mean(
        resp.s11_db.iter().map(|s| hinge(*s, th.s11_th, th.s11_th.abs())),
        th.b,
    ))
}

/// Sidelobe cost: mean normalized excess of the per-frequency SLL over its threshold.
pub fn phi_sll(resp: &AntennaResponse, th: &AntennaThresholds) -> Result<f64> {
    resp.check_grid(th)?;
    let sll = resp
        .pattern_db
        .iter()
        .map(|p| extract_sll(p, &resp.theta_grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(
        sll.iter().map(|s| hinge(*s, th.sll_th, th.sll_th.abs())),
        th.b,
    ))
}

/// Pointing cost: mean normalized excess of `|BDD|` over its threshold.
pub fn phi_bdd(resp: &AntennaResponse, th: &AntennaThresholds) -> Result<f64> {
    resp.check_grid(th)?;
    let bdd = resp
        .pattern_db
        .iter()
        .map(|p| extract_bdd(p, &resp.theta_grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(bdd.iter().map(|d| hinge(d.abs(), th.bdd_th, th.bdd_th)), th.b))
}

fn check_pattern(pattern_db: &[f64], theta_grid: &[f64]) -> Result<()> {
    if pattern_db.is_empty() {
        return Err(Error::Empty("pattern"));
    }
    if pattern_db.len() != theta_grid.len() {
        return Err(Error::DimensionMismatch {
            expected: theta_grid.len(),
            found: pattern_db.len(),
        });
    }
    Ok(())
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best })
}

/// Highest pattern level outside the main lobe, in dB.
///
/// The main lobe spans from the global peak down to the first local minimum
/// on each side. A pattern that falls monotonically to both grid edges has no
/// sidelobe and yields `f64::NEG_INFINITY`.
pub fn extract_sll(pattern_db: &[f64], theta_grid: &[f64]) -> Result<f64> {
    check_pattern(pattern_db, theta_grid)?;
    let peak = argmax(pattern_db);
    let mut left = peak;
    while left > 0 && pattern_db[left - 1] < pattern_db[left] {
        left -= 1;
    }
    let mut right = peak;
    while right + 1 < pattern_db.len() && pattern_db[right + 1] < pattern_db[right] {
        right += 1;
    }
    Ok(pattern_db[..left]
        .iter()
        .chain(&pattern_db[right + 1..])
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Beam direction in degrees, refined by a parabola through the three
/// samples around the discrete maximum.
pub fn extract_bdd(pattern_db: &[f64], theta_grid: &[f64]) -> Result<f64> {
    check_pattern(pattern_db, theta_grid)?;
    let p = argmax(pattern_db);
    if p == 0 || p + 1 == pattern_db.len() {
        debug!("pattern peak on grid boundary at {} deg", theta_grid[p]);
        return Ok(theta_grid[p]);
    }
    let (x0, x1, x2) = (theta_grid[p - 1], theta_grid[p], theta_grid[p + 1]);
    let (y0, y1, y2) = (pattern_db[p - 1], pattern_db[p], pattern_db[p + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return Ok(x1);
    }
    Ok(x1 - 0.5 * num / den)
}

/// Elevation grid from -90 to 90 degrees.
pub fn theta_grid() -> Vec<f64> {
    let n = (180.0 / THETA_STEP_DEG).round() as usize;
    (0..=n).map(|i| -90.0 + i as f64 * THETA_STEP_DEG).collect()
}

/// Physical parameters decoded from a proxy design vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyDesign {
    /// Element spacing in free-space wavelengths at the center frequency.
    pub spacing: f64,
    /// Excitation amplitudes, symmetric about the array center.
    pub weights: [f64; N_ELEMENTS],
    /// Frequency slope of the progressive feed phase.
    pub phase_slope: f64,
    /// Reflection magnitudes of the four matching sections.
    pub reflections: [f64; 4],
    /// Reference line length in wavelengths at the center frequency.
    pub line_length: f64,
}

/// Coordinate ranges of the proxy design vector, in order: spacing, three
/// taper amplitudes (center to edge), phase slope, four reflection
/// magnitudes, reference line length.
pub fn proxy_bounds() -> Bounds {
    let mut lower = vec![0.4, 0.2, 0.2, 0.2, -1.0];
    let mut upper = vec![0.7, 1.0, 1.0, 1.0, 1.0];
    lower.extend([0.0; 4]);
    upper.extend([0.3; 4]);
    lower.push(0.5);
    upper.push(2.0);
    Bounds::new(lower, upper).expect("static proxy bounds")
}

impl ProxyDesign {
    pub fn decode(x: &[f64]) -> Result<Self> {
        let bounds = proxy_bounds();
        if !bounds.contains(x) {
            return Err(Error::InvalidDesign(format!(
                "proxy antenna design {x:?} outside its 10-dimensional box"
            )));
        }
        let (center, mid, edge) = (x[1], x[2], x[3]);
        Ok(Self {
            spacing: x[0],
            weights: [edge, mid, center, center, mid, edge],
            phase_slope: x[4],
            reflections: [x[5], x[6], x[7], x[8]],
            line_length: x[9],
        })
    }
}

/// Progressive phase between adjacent elements at frequency `f`.
fn feed_phase(design: &ProxyDesign, f: f64, f0: f64) -> f64 {
    2.0 * PI * design.phase_slope * design.line_length * (f - f0) / f0
}

fn to_db(power: f64) -> f64 {
    if power > 0.0 {
        (10.0 * power.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Peak-normalized elevation power pattern of the proxy array in dB.
pub fn proxy_pattern(design: &ProxyDesign, f: f64, f0: f64, theta_deg: &[f64]) -> Vec<f64> {
    let lambda0 = SPEED_OF_LIGHT / f0;
    let k = 2.0 * PI * f / SPEED_OF_LIGHT;
    let kd = k * design.spacing * lambda0;
    let alpha = feed_phase(design, f, f0);
    let power: Vec<f64> = theta_deg
        .iter()
        .map(|t| {
            let theta = t.to_radians();
            let psi = kd * theta.sin() + alpha;
            let (re, im) = design
                .weights
                .iter()
                .enumerate()
                .fold((0.0, 0.0), |(re, im), (n, w)| {
                    let ph = n as f64 * psi;
                    (re + w * ph.cos(), im + w * ph.sin())
                });
            let ef = theta.cos().max(0.0);
            ef * ef * (re * re + im * im)
        })
        .collect();
    let peak = power.iter().copied().fold(0.0, f64::max);
    power.iter().map(|p| to_db(p / peak)).collect()
}

/// `|S11|` in dB from the phasor sum of the section reflections.
pub fn proxy_s11_db(design: &ProxyDesign, f: f64, f0: f64) -> f64 {
    let beta = 2.0 * PI * f / SPEED_OF_LIGHT;
    let quarter = design.line_length * SPEED_OF_LIGHT / f0 / 4.0;
    let (re, im) = design
        .reflections
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (n, r)| {
            let ph = -2.0 * beta * (n + 1) as f64 * quarter;
            (re + r * ph.cos(), im + r * ph.sin())
        });
    to_db(re * re + im * im)
}

/// Analytic series-fed array response over the threshold frequency grid.
pub fn proxy_antenna_evaluate(x: &[f64], th: &AntennaThresholds) -> Result<AntennaResponse> {
    th.validate()?;
    let design = ProxyDesign::decode(x)?;
    let f0 = th.center_frequency();
    let grid = theta_grid();
    let frequencies = th.frequencies();
    Ok(AntennaResponse {
        s11_db: frequencies.iter().map(|f| proxy_s11_db(&design, *f, f0)).collect(),
        pattern_db: frequencies
            .iter()
            .map(|f| proxy_pattern(&design, *f, f0, &grid))
            .collect(),
        theta_grid: grid,
        frequencies,
    })
}

/// The three antenna costs `(S11, SLL, BDD)` of a proxy design.
#[derive(Debug, Clone)]
pub struct ProxyAntenna {
    thresholds: AntennaThresholds,
    bounds: Arc<Bounds>,
}

impl ProxyAntenna {
    pub fn new(thresholds: AntennaThresholds) -> Result<Self> {
        thresholds.validate()?;
        Ok(Self {
            thresholds,
            bounds: Arc::new(proxy_bounds()),
        })
    }

    pub fn thresholds(&self) -> &AntennaThresholds {
        &self.thresholds
    }

    pub fn costs(&self, x: &[f64]) -> Result<Vec<f64>> {
        let resp = proxy_antenna_evaluate(x, &self.thresholds)?;
        Ok(vec![
            phi_s11(&resp, &self.thresholds)?,
            phi_sll(&resp, &self.thresholds)?,
            phi_bdd(&resp, &self.thresholds)?,
        ])
    }
}

impl Evaluator for ProxyAntenna {
    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn n_objectives(&self) -> usize {
        3
    }

    fn bounds(&self) -> Arc<Bounds> {
        Arc::clone(&self.bounds)
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.costs(x).map_err(|e| EvalError::Failed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(b: usize) -> AntennaThresholds {
        AntennaThresholds {
            b,
            ..AntennaThresholds::default()
        }
    }

    fn response(th: &AntennaThresholds, s11: Vec<f64>, patterns: Vec<Vec<f64>>, grid: Vec<f64>) -> AntennaResponse {
        AntennaResponse {
            frequencies: th.frequencies(),
            s11_db: s11,
            pattern_db: patterns,
            theta_grid: grid,
        }
    }

    /// Uniform linear array factor at half-wavelength spacing, no element factor.
    fn uniform_af_db(n: usize, step: f64, steer_deg: f64) -> (Vec<f64>, Vec<f64>) {
        let m = (180.0 / step).round() as usize;
        let grid: Vec<f64> = (0..=m).map(|i| -90.0 + i as f64 * step).collect();
        let s0 = steer_deg.to_radians().sin();
        let p: Vec<f64> = grid
            .iter()
            .map(|t| {
                let psi = PI * (t.to_radians().sin() - s0);
                let (re, im) = (0..n).fold((0.0, 0.0), |(re, im), k| {
                    (re + (k as f64 * psi).cos(), im + (k as f64 * psi).sin())
                });
                re * re + im * im
            })
            .collect();
        let peak = p.iter().copied().fold(0.0, f64::max);
        (p.iter().map(|v| to_db(v / peak)).collect(), grid)
    }

    #[test]
    fn s11_cost_examples() {
        let th = AntennaThresholds::default();
        let grid = theta_grid();
        let flat = vec![vec![0.0; grid.len()]; th.b];
        let resp = response(&th, vec![-16.0; th.b], flat, grid.clone());
        assert_eq!(phi_s11(&resp, &th).unwrap(), 0.0);

        let th1 = single(1);
        let resp = response(&th1, vec![-10.0], vec![vec![0.0; grid.len()]], grid.clone());
        assert!((phi_s11(&resp, &th1).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let th2 = single(2);
        let resp = response(&th2, vec![-10.0, -20.0], vec![vec![0.0; grid.len()]; 2], grid.clone());
        assert!((phi_s11(&resp, &th2).unwrap() - 1.0 / 6.0).abs() < 1e-12);

        // frequency grid mismatch
        let resp = response(&th2, vec![-10.0, -20.0], vec![vec![0.0; grid.len()]; 2], grid);
        assert!(phi_s11(&resp, &th1).is_err());
    }

    #[test]
    fn sll_of_uniform_six_element_array() {
        // Brute-force reference on a 0.05 degree grid, then the production grid.
        let (fine, fine_grid) = uniform_af_db(6, 0.05, 0.0);
        let reference = extract_sll(&fine, &fine_grid).unwrap();
        assert!((reference - (-12.43)).abs() < 0.01, "{reference}");
        let (coarse, coarse_grid) = uniform_af_db(6, THETA_STEP_DEG, 0.0);
        let sll = extract_sll(&coarse, &coarse_grid).unwrap();
        assert!((sll - reference).abs() < 0.02);
    }

    #[test]
    fn sll_of_synthetic_two_lobe_pattern() {
        let grid = theta_grid();
        let p: Vec<f64> = grid
            .iter()
            .map(|t| {
                let main = -0.05 * t * t;
                let side = -18.9 - 0.5 * (t - 40.0).powi(2);
                main.max(side).max(DB_FLOOR)
            })
            .collect();
        assert!((extract_sll(&p, &grid).unwrap() + 18.9).abs() < 1e-12);
    }

    #[test]
    fn sll_reports_floor_and_monotone_sentinel() {
        let grid = theta_grid();
        let floored: Vec<f64> = grid.iter().map(|t| (-0.5 * t * t).max(-60.0)).collect();
        assert_eq!(extract_sll(&floored, &grid).unwrap(), -60.0);
        let monotone: Vec<f64> = grid.iter().map(|t| -0.001 * t * t).collect();
        assert_eq!(extract_sll(&monotone, &grid).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn sll_cost_examples() {
        let grid = theta_grid();
        let pat = |sll: f64| -> Vec<f64> {
            grid.iter()
                .map(|t| (-0.05 * t * t).max(sll - 0.5 * (t - 40.0).powi(2)).max(DB_FLOOR))
                .collect()
        };
        let th = AntennaThresholds::default();
        let resp = response(&th, vec![-20.0; 7], vec![pat(-21.0); 7], grid.clone());
        assert_eq!(phi_sll(&resp, &th).unwrap(), 0.0);
        let th1 = single(1);
        let resp = response(&th1, vec![-20.0], vec![pat(-18.9)], grid.clone());
        assert!((phi_sll(&resp, &th1).unwrap() - 0.055).abs() < 1e-12);
        let resp = response(&th1, vec![-20.0], vec![pat(-10.0)], grid);
        assert!((phi_sll(&resp, &th1).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bdd_examples() {
        let (p, grid) = uniform_af_db(6, THETA_STEP_DEG, 0.0);
        assert!(extract_bdd(&p, &grid).unwrap().abs() < 1e-9);

        // reference: fine-grid argmax of the steered pattern
        let (fine, fine_grid) = uniform_af_db(6, 0.005, 1.0);
        let reference = fine_grid[argmax(&fine)];
        let (p, grid) = uniform_af_db(6, THETA_STEP_DEG, 1.0);
        let bdd = extract_bdd(&p, &grid).unwrap();
        assert!((bdd - reference).abs() < 0.05, "{bdd} vs {reference}");
        assert!((bdd - 1.0).abs() < 0.05);

        // boundary peak is returned without interpolation
        let edge: Vec<f64> = grid.iter().map(|t| -(t - 90.0).abs()).collect();
        assert_eq!(extract_bdd(&edge, &grid).unwrap(), 90.0);
    }

    #[test]
    fn bdd_cost_examples() {
        let grid = theta_grid();
        let steered = |deg: f64| -> Vec<f64> { grid.iter().map(|t| -0.05 * (t - deg).powi(2)).collect() };
        let th1 = single(1);
        let resp = response(&th1, vec![-20.0], vec![steered(0.25)], grid.clone());
        assert!(phi_bdd(&resp, &th1).unwrap().abs() < 1e-9);
        let resp = response(&th1, vec![-20.0], vec![steered(1.0)], grid.clone());
        assert!((phi_bdd(&resp, &th1).unwrap() - 3.0).abs() < 1e-9);
        let th = AntennaThresholds::default();
        let resp = response(&th, vec![-20.0; 7], vec![steered(-0.2); 7], grid);
        assert_eq!(phi_bdd(&resp, &th).unwrap(), 0.0);
    }

    fn uniform_design(spacing: f64) -> Vec<f64> {
        vec![spacing, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
    }

    #[test]
    fn proxy_zero_reflections_hit_the_floor() {
        let th = AntennaThresholds::default();
        let resp = proxy_antenna_evaluate(&uniform_design(0.5), &th).unwrap();
        assert!(resp.s11_db.iter().all(|s| *s == DB_FLOOR));
        assert!(resp.pattern_db.iter().all(|p| p.iter().copied().fold(f64::MIN, f64::max) == 0.0));
    }

    #[test]
    fn proxy_uniform_broadside_has_no_squint() {
        let th = AntennaThresholds::default();
        let resp = proxy_antenna_evaluate(&uniform_design(0.55), &th).unwrap();
        for p in &resp.pattern_db {
            assert!(extract_bdd(p, &resp.theta_grid).unwrap().abs() < 1e-9);
        }
        let mut x = uniform_design(0.55);
        x[4] = 1.0;
        x[9] = 2.0;
        let resp = proxy_antenna_evaluate(&x, &th).unwrap();
        let edge = extract_bdd(&resp.pattern_db[0], &resp.theta_grid).unwrap();
        assert!(edge.abs() > 1.0);
    }

    #[test]
    fn proxy_sll_matches_brute_force_with_element_factor() {
        // Independent reference: fine-grid evaluation of |cos(theta) AF|^2 at mid-band.
        let step = 0.05;
        let m = (180.0 / step) as usize;
        let fine_grid: Vec<f64> = (0..=m).map(|i| -90.0 + i as f64 * step).collect();
        let power: Vec<f64> = fine_grid
            .iter()
            .map(|t| {
                let th = t.to_radians();
                let psi = PI * th.sin();
                let af = (3.0 * psi).sin() / (0.5 * psi).sin();
                let af = if psi.abs() < 1e-12 { 6.0 } else { af };
                (th.cos() * af).powi(2)
            })
            .collect();
        let peak = power.iter().copied().fold(0.0, f64::max);
        let db: Vec<f64> = power.iter().map(|p| to_db(p / peak)).collect();
        let reference = extract_sll(&db, &fine_grid).unwrap();
        assert!((reference - (-13.55)).abs() < 0.01, "{reference}");

        let th = AntennaThresholds {
            b: 1,
            f_min: 77.5e9,
            f_max: 77.5e9 * 1.0001,
            ..AntennaThresholds::default()
        };
        let design = ProxyDesign::decode(&uniform_design(0.5)).unwrap();
        let p = proxy_pattern(&design, th.center_frequency(), th.center_frequency(), &theta_grid());
        let sll = extract_sll(&p, &theta_grid()).unwrap();
        assert!((sll - reference).abs() < 0.05, "{sll} vs {reference}");
    }

    #[test]
    fn proxy_costs_are_non_negative_and_deterministic() {
        let ant = ProxyAntenna::new(AntennaThresholds::default()).unwrap();
        let x = vec![0.6, 0.9, 0.6, 0.3, 0.4, 0.1, 0.05, 0.2, 0.02, 1.3];
        let a = ant.costs(&x).unwrap();
        let b = ant.costs(&x).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| *v >= 0.0));
        assert!(ant.costs(&[0.5; 10]).is_err());
    }
}
