use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dominance::{Bounds, DesignVector};
use crate::error::{Error, Result};

/// Latin hypercube sample of `n` designs.
///
/// Every coordinate range is split into `n` equal strata; each stratum holds
/// exactly one sample, placed uniformly inside it, and strata are assigned to
/// samples by an independent permutation per dimension.
pub fn lhs_sample<R: Rng + ?Sized>(
    n: usize,
    bounds: &Arc<Bounds>,
    rng: &mut R,
) -> Result<Vec<DesignVector>> {
    if n < 2 {
        return Err(Error::config("t0", format!("must be >= 2, got {n}")));
    }
    let unit = lhs_unit(n, bounds.dim(), rng);
    unit.into_iter()
        .map(|u| {
            let values = u
                .iter()
                .enumerate()
                .map(|(k, v)| bounds.clamp(k, bounds.lower()[k] + v * bounds.width(k)))
                .collect();
            DesignVector::new(values, Arc::clone(bounds))
        })
        .collect()
}

/// Latin hypercube sample in `[0, 1)^dim`.
pub(crate) fn lhs_unit<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for k in 0..dim {
        strata.shuffle(rng);
        for (p, s) in points.iter_mut().zip(&strata) {
            p[k] = (*s as f64 + rng.gen::<f64>()) / n as f64;
        }
    }
    points
}
