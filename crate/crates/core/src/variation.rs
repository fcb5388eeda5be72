//! Parent selection, simulated binary crossover and polynomial mutation.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dominance::{nondominated_indices, DesignVector, EvaluatedSolution, ParetoArchive};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationParams {
    /// SBX distribution index.
    pub eta_c: f64,
    /// Polynomial mutation distribution index.
    pub eta_m: f64,
    /// Probability that a coordinate undergoes SBX.
    pub p_c: f64,
    /// Probability that a crossed coordinate takes the second SBX child.
    pub p_exchange: f64,
    /// Per-coordinate mutation probability; `None` means `1/K`.
    pub p_m: Option<f64>,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self {
            eta_c: 15.0,
            eta_m: 20.0,
            p_c: 1.0,
            p_exchange: 0.5,
            p_m: None,
        }
    }
}

impl VariationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_c > 0.0 && self.eta_c.is_finite()) {
            return Err(Error::config("variation.eta_c", "must be > 0"));
        }
        if !(self.eta_m > 0.0 && self.eta_m.is_finite()) {
            return Err(Error::config("variation.eta_m", "must be > 0"));
        }
        for (key, p) in [
            ("variation.p_c", Some(self.p_c)),
            ("variation.p_exchange", Some(self.p_exchange)),
            ("variation.p_m", self.p_m),
        ] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(key, "must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }

    pub fn mutation_probability(&self, k: usize) -> f64 {
        self.p_m.unwrap_or(1.0 / k as f64)
    }
}

/// First parent uniformly from the archive, second uniformly from the
/// non-dominated members of the population.
pub fn select_parents<'a, R: Rng + ?Sized>(
    archive: &'a ParetoArchive,
    population: &'a [EvaluatedSolution],
    rng: &mut R,
) -> Result<(&'a EvaluatedSolution, &'a EvaluatedSolution)> {
    if archive.is_empty() {
        return Err(Error::Empty("archive"));
    }
    if population.is_empty() {
        return Err(Error::Empty("population"));
    }
    let first = &archive.members()[rng.gen_range(0..archive.len())];
    let front = nondominated_indices(population);
    let second = &population[front[rng.gen_range(0..front.len())]];
    Ok((first, second))
}

/// Both SBX children of one coordinate for the uniform draw `u`.
pub fn sbx_pair(p1: f64, p2: f64, u: f64, eta_c: f64) -> (f64, f64) {
    let beta = if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta_c + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta_c + 1.0))
    };
    (
        0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2),
        0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2),
    )
}

/// Single-child simulated binary crossover, clamped to the bounds.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &DesignVector,
    p2: &DesignVector,
    params: &VariationParams,
    rng: &mut R,
) -> Result<DesignVector> {
    if **p1.bounds() != **p2.bounds() {
        return Err(Error::InvalidDesign("parents have different bounds".into()));
    }
    let bounds = p1.bounds();
    let child = p1
        .values()
        .iter()
        .zip(p2.values())
        .enumerate()
        .map(|(k, (&a, &b))| {
            if rng.gen::<f64>() >= params.p_c {
                return a;
            }
            let u = rng.gen::<f64>();
            let (c1, c2) = sbx_pair(a, b, u, params.eta_c);
            debug_assert!(
                (c1 + c2 - (a + b)).abs() <= 1e-9 * (1.0 + (a + b).abs()) || !c1.is_finite(),
                "SBX children not symmetric about the parent mean"
            );
            let c = if rng.gen::<f64>() < params.p_exchange { c2 } else { c1 };
            bounds.clamp(k, c)
        })
        .collect();
    DesignVector::new(child, Arc::clone(bounds))
}

/// Polynomial perturbation for the uniform draw `r`, as a fraction of the range.
pub fn mutation_delta(r: f64, eta_m: f64) -> f64 {
    if r < 0.5 {
        (2.0 * r).powf(1.0 / (eta_m + 1.0)) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - r)).powf(1.0 / (eta_m + 1.0))
    }
}

/// Polynomial mutation with per-coordinate probability `p_m`, clamped to the bounds.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &DesignVector,
    params: &VariationParams,
    rng: &mut R,
) -> Result<DesignVector> {
    let bounds = x.bounds();
    let p_m = params.mutation_probability(x.dim());
    let values = x
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if rng.gen::<f64>() >= p_m {
                return v;
            }
            let d = mutation_delta(rng.gen::<f64>(), params.eta_m);
            bounds.clamp(k, v + d * bounds.width(k))
        })
        .collect();
    DesignVector::new(values, Arc::clone(bounds))
}

/// Selection, crossover and mutation producing one offspring design.
pub fn make_offspring<R: Rng + ?Sized>(
    archive: &ParetoArchive,
    population: &[EvaluatedSolution],
    params: &VariationParams,
    rng: &mut R,
) -> Result<DesignVector> {
    let (a, b) = select_parents(archive, population, rng)?;
    let crossed = sbx_crossover(&a.design, &b.design, params, rng)?;
    polynomial_mutation(&crossed, params, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::{Bounds, EpsilonConfig, FitnessRecord, ObjectiveVector};
    use crate::rng::{stream_rng, Stream};
    use proptest::prelude::*;
    use rand::Rng;

    fn sol(bounds: &Arc<Bounds>, x: &[f64], phi: &[f64]) -> EvaluatedSolution {
        EvaluatedSolution::new(
            DesignVector::new(x.to_vec(), Arc::clone(bounds)).unwrap(),
            FitnessRecord::simulated(ObjectiveVector::new(phi.to_vec()).unwrap()),
        )
    }

    #[test]
    fn sbx_examples() {
        assert_eq!(sbx_pair(0.3, 0.8, 0.5, 15.0).0, 0.3);
        let (c1, c2) = sbx_pair(0.42, 0.42, 0.93, 15.0);
        assert_eq!((c1, c2), (0.42, 0.42));
        let (c1, _) = sbx_pair(0.0, 1.0, 0.8, 15.0);
        let beta = (1.0f64 / 0.4).powf(1.0 / 16.0);
        assert!((beta - 1.0590).abs() < 1e-4);
        assert!((c1 - 0.5 * (1.0 - beta)).abs() < 1e-12);
        assert!((c1 + 0.0295).abs() < 1e-4);
        let bounds = Bounds::unit(1);
        assert_eq!(bounds.clamp(0, c1), 0.0);
    }

    #[test]
    fn mutation_examples() {
        assert_eq!(mutation_delta(0.5, 20.0), 0.0);
        assert_eq!(mutation_delta(0.0, 20.0), -1.0);
        let d = mutation_delta(0.9, 20.0);
        assert!((d - (1.0 - 0.2f64.powf(1.0 / 21.0))).abs() < 1e-15);
        assert!((0.5 + d - 0.5738).abs() < 1e-4);
    }

    #[test]
    fn zero_probabilities_copy_first_parent() {
        let bounds = Arc::new(Bounds::unit(4));
        let p = VariationParams {
            p_c: 0.0,
            p_m: Some(0.0),
            ..VariationParams::default()
        };
        let a = DesignVector::new(vec![0.1, 0.2, 0.3, 0.4], Arc::clone(&bounds)).unwrap();
        let b = DesignVector::new(vec![0.9, 0.8, 0.7, 0.6], Arc::clone(&bounds)).unwrap();
        let mut rng = stream_rng(1, Stream::Variation);
        let c = sbx_crossover(&a, &b, &p, &mut rng).unwrap();
        let c = polynomial_mutation(&c, &p, &mut rng).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn parent_selection_examples() {
        let bounds = Arc::new(Bounds::unit(1));
        let mut archive = ParetoArchive::new(EpsilonConfig::uniform(0.01, 2).unwrap());
        archive.insert(sol(&bounds, &[0.1], &[0.0, 1.0])).unwrap();
        let pop = vec![sol(&bounds, &[0.7], &[2.0, 2.0])];
        let mut rng = stream_rng(2, Stream::Variation);
        let (a, b) = select_parents(&archive, &pop, &mut rng).unwrap();
        assert_eq!(a.design.values(), &[0.1]);
        assert_eq!(b.design.values(), &[0.7]);

        let chain: Vec<_> = (0..5)
            .map(|i| sol(&bounds, &[i as f64 / 10.0], &[i as f64, i as f64]))
            .collect();
        for _ in 0..50 {
            let (_, b) = select_parents(&archive, &chain, &mut rng).unwrap();
            assert_eq!(b.phi().as_slice(), &[0.0, 0.0]);
        }

        let pick = |seed| {
            let wide: Vec<_> = (0..6)
                .map(|i| sol(&bounds, &[i as f64 / 10.0], &[i as f64, 5.0 - i as f64]))
                .collect();
            let mut rng = stream_rng(seed, Stream::Variation);
            (0..20)
                .map(|_| select_parents(&archive, &wide, &mut rng).unwrap().1.design.values()[0])
                .collect::<Vec<_>>()
        };
        assert_eq!(pick(5), pick(5));

        let empty = ParetoArchive::new(EpsilonConfig::uniform(0.01, 2).unwrap());
        assert!(select_parents(&empty, &pop, &mut rng).is_err());
    }

    #[test]
    fn mutation_perturbation_is_small_on_average() {
        let mut rng = stream_rng(3, Stream::Variation);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| mutation_delta(rng.gen::<f64>(), 20.0).abs())
            .sum::<f64>()
            / n as f64;
        assert!(mean < 0.05, "{mean}");
    }

    proptest! {
        #[test]
        fn sbx_children_are_symmetric(p1 in -5.0f64..5.0, p2 in -5.0f64..5.0, u in 0.0f64..1.0, eta in 1.0f64..30.0) {
            let (c1, c2) = sbx_pair(p1, p2, u, eta);
            prop_assert!((c1 + c2 - (p1 + p2)).abs() <= 1e-9 * (1.0 + (p1 + p2).abs()));
        }
    }
}
