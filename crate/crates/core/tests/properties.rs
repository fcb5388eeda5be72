use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mosbd_core::decision::mmd_select_objectives;
use mosbd_core::dominance::{
    dominates, eps_dominates, non_eps_dominated_subset, sbd_dominates, Bounds, DesignVector,
    EpsilonConfig, EvaluatedSolution, FitnessRecord, ObjectiveVector, ParetoArchive,
};
use mosbd_core::surrogate::{lhs_sample, KrigingConfig, KrigingModel, TrainingSet};
use mosbd_core::variation::{make_offspring, VariationParams};

fn ov(v: &[f64]) -> ObjectiveVector {
    ObjectiveVector::new(v.to_vec()).unwrap()
}

fn design(x: &[f64]) -> DesignVector {
    DesignVector::new(x.to_vec(), Arc::new(Bounds::unit(x.len()))).unwrap()
}

fn sim(phi: &[f64]) -> EvaluatedSolution {
    EvaluatedSolution::new(design(&[0.5]), FitnessRecord::simulated(ov(phi)))
}

fn pred(phi: &[f64], delta: Vec<f64>) -> EvaluatedSolution {
    EvaluatedSolution::new(
        design(&[0.5]),
        FitnessRecord::predicted(ov(phi), delta).unwrap(),
    )
}

fn objectives(q: usize) -> impl Strategy<Value = Vec<f64>> {
    // a coarse grid makes ties and shared boxes common
    prop::collection::vec((0i32..20).prop_map(|i| i as f64 * 0.05), q)
}

proptest! {
    #[test]
    fn dominance_is_irreflexive_and_antisymmetric(a in objectives(3), b in objectives(3)) {
        let eps = EpsilonConfig::uniform(0.1, 3).unwrap();
        let (a, b) = (ov(&a), ov(&b));
        prop_assert!(!dominates(&a, &a));
        prop_assert!(!eps_dominates(&a, &a, &eps));
        prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
        if a != b {
            prop_assert!(!(eps_dominates(&a, &b, &eps) && eps_dominates(&b, &a, &eps)));
        }
    }

    #[test]
    fn zero_width_intervals_reduce_to_plain_dominance(a in objectives(2), b in objectives(2)) {
        let expected = dominates(&ov(&a), &ov(&b));
        let zero = vec![0.0; 2];
        let pairs = [
            (sim(&a), sim(&b)),
            (sim(&a), pred(&b, zero.clone())),
            (pred(&a, zero.clone()), sim(&b)),
            (pred(&a, zero.clone()), pred(&b, zero.clone())),
        ];
        for (x, y) in &pairs {
            prop_assert_eq!(sbd_dominates(x, y), expected);
        }
    }

    #[test]
    fn non_eps_dominated_subset_is_mutually_non_dominated(
        points in prop::collection::vec(objectives(2), 1..12),
    ) {
        let eps = EpsilonConfig::uniform(0.1, 2).unwrap();
        let g: Vec<_> = points.iter().map(|p| sim(p)).collect();
        let kept = non_eps_dominated_subset(&g, &eps).unwrap();
        for x in &kept {
            for y in &kept {
                prop_assert!(!eps_dominates(x.phi(), y.phi(), &eps));
            }
        }
    }

    #[test]
    fn archive_content_does_not_depend_on_insertion_order(
        points in prop::collection::vec(objectives(2), 1..=8),
        seed in any::<u64>(),
    ) {
        let eps = EpsilonConfig::uniform(0.1, 2).unwrap();
        let build = |order: &[usize]| {
            let a = ParetoArchive::from_solutions(order.iter().map(|&i| sim(&points[i])), eps.clone())
                .unwrap();
            let mut set: Vec<Vec<f64>> =
                a.objectives().iter().map(|o| o.as_slice().to_vec()).collect();
            set.sort_by(|x, y| x.partial_cmp(y).unwrap());
            set.dedup();
            set
        };
        let forward: Vec<usize> = (0..points.len()).collect();
        let mut shuffled = forward.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        prop_assert_eq!(build(&forward), build(&shuffled));
    }

    #[test]
    fn compromise_is_invariant_under_affine_rescaling(
        points in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 3), 1..=10),
        scale in prop::collection::vec(0.01f64..100.0, 3),
        shift in prop::collection::vec(-50.0f64..50.0, 3),
    ) {
        let a: Vec<_> = points.iter().map(|p| ov(p)).collect();
        let b: Vec<_> = points
            .iter()
            .map(|p| ov(&p.iter().enumerate().map(|(j, v)| scale[j] * v + shift[j]).collect::<Vec<_>>()))
            .collect();
        let ra = mmd_select_objectives(&a).unwrap();
        let rb = mmd_select_objectives(&b).unwrap();
        // distances may tie up to rounding; the chosen distance must be minimal in both
        let best = rb.l1_distances.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((rb.l1_distances[ra.index] - best).abs() <= 1e-9);
    }
}

#[test]
fn tiny_epsilon_agrees_with_dominance_without_ties() {
    let eps = EpsilonConfig::uniform(1e-12, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 10_000 {
        let a = ov(&[rng.gen::<f64>(), rng.gen::<f64>()]);
        let b = ov(&[rng.gen::<f64>(), rng.gen::<f64>()]);
        if a.as_slice().iter().zip(b.as_slice()).any(|(x, y)| x == y) {
            continue;
        }
        assert_eq!(eps_dominates(&a, &b, &eps), dominates(&a, &b), "{a:?} {b:?}");
        checked += 1;
    }
}

#[test]
fn offspring_stay_within_bounds() {
    let bounds = Arc::new(Bounds::new(vec![-2.0, 0.0, 10.0], vec![-1.0, 1e-3, 1e4]).unwrap());
    let params = VariationParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eps = EpsilonConfig::uniform(0.05, 2).unwrap();
    let random_member = |rng: &mut ChaCha8Rng| {
        let x: Vec<f64> = (0..3)
            .map(|k| {
                // parents on the bounds exercise clamping
                match rng.gen_range(0..4) {
                    0 => bounds.lower()[k],
                    1 => bounds.upper()[k],
                    _ => rng.gen_range(bounds.lower()[k]..=bounds.upper()[k]),
                }
            })
            .collect();
        EvaluatedSolution::new(
            DesignVector::new(x, Arc::clone(&bounds)).unwrap(),
            FitnessRecord::simulated(ov(&[rng.gen(), rng.gen()])),
        )
    };
    for _ in 0..100_000 {
        let a = random_member(&mut rng);
        let b = random_member(&mut rng);
        let archive = ParetoArchive::from_solutions([a], eps.clone()).unwrap();
        let child = make_offspring(&archive, &[b], &params, &mut rng).unwrap();
        assert!(bounds.contains(child.values()), "{:?}", child.values());
    }
}

fn fit(bounds: &Arc<Bounds>, xs: &[DesignVector], f: impl Fn(&[f64]) -> Vec<f64>) -> KrigingModel {
    let training = TrainingSet::from_pairs(
        Arc::clone(bounds),
        xs.iter().map(|x| (x.clone(), ov(&f(x.values())))),
    )
    .unwrap();
    KrigingModel::fit(training, KrigingConfig::default(), 3).unwrap()
}

fn smooth(x: &[f64]) -> Vec<f64> {
    vec![
        (3.0 * x[0]).sin() + x[1] * x[1],
        (x[0] - 0.3).powi(2) + (2.0 * x[1]).cos(),
    ]
}

fn max_interpolation_error(model: &KrigingModel, xs: &[DesignVector], f: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for x in xs {
        let (mean, delta) = model.predict_values(x.values()).unwrap();
        for (m, y) in mean.iter().zip(f(x.values())) {
            worst = worst.max((m - y).abs() / (1.0 + y.abs()));
        }
        for (q, d) in delta.iter().enumerate() {
            assert!(*d >= 0.0 && *d / model.output_scale(q) <= 1e-4, "delta {d}");
        }
    }
    worst
}

#[test]
fn kriging_interpolates_benchmark_and_proxy_responses() {
    use mosbd_core::problems::antenna::proxy_bounds;
    use mosbd_core::problems::{dtlz1, AntennaThresholds, ProxyAntenna};
    for (k, q, n) in [(3, 2, 40), (7, 2, 80), (7, 3, 80)] {
        let bounds = Arc::new(Bounds::unit(k));
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let xs = lhs_sample(n, &bounds, &mut rng).unwrap();
        let f = |x: &[f64]| dtlz1(x, q).unwrap();
        let model = fit(&bounds, &xs, f);
        let err = max_interpolation_error(&model, &xs, f);
        assert!(err <= 1e-6, "K={k} Q={q}: {err:e}");
    }
    let antenna = ProxyAntenna::new(AntennaThresholds::default()).unwrap();
    let bounds = Arc::new(proxy_bounds());
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let xs = lhs_sample(60, &bounds, &mut rng).unwrap();
    let f = |x: &[f64]| antenna.costs(x).unwrap();
    let model = fit(&bounds, &xs, f);
    let err = max_interpolation_error(&model, &xs, f);
    assert!(err <= 1e-6, "antenna proxy: {err:e}");
}

#[test]
fn very_smooth_responses_interpolate_to_nugget_accuracy() {
    // long correlation lengths make R nearly singular; the diagonal nugget
    // then costs a few 1e-6 at the training points
    let bounds = Arc::new(Bounds::unit(2));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs = lhs_sample(40, &bounds, &mut rng).unwrap();
    let model = fit(&bounds, &xs, smooth);
    let err = max_interpolation_error(&model, &xs, smooth);
    assert!(err <= 1e-4, "{err:e}");
}

#[test]
fn kriging_is_invariant_to_input_scaling() {
    let unit = Arc::new(Bounds::unit(2));
    let wide = Arc::new(Bounds::new(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let xs = lhs_sample(25, &unit, &mut rng).unwrap();
    let scaled: Vec<DesignVector> = xs
        .iter()
        .map(|x| DesignVector::new(x.values().iter().map(|v| 10.0 * v).collect(), Arc::clone(&wide)).unwrap())
        .collect();
    let a = fit(&unit, &xs, smooth);
    let b = fit(&wide, &scaled, |x| smooth(&[x[0] / 10.0, x[1] / 10.0]));
    for _ in 0..50 {
        let u = [rng.gen::<f64>(), rng.gen::<f64>()];
        let (ma, da) = a.predict_values(&u).unwrap();
        let (mb, db) = b.predict_values(&[10.0 * u[0], 10.0 * u[1]]).unwrap();
        for q in 0..2 {
            assert!((ma[q] - mb[q]).abs() <= 1e-9 * (1.0 + ma[q].abs()));
            assert!((da[q] - db[q]).abs() <= 1e-9 * (1.0 + da[q].abs()));
        }
    }
}

#[test]
fn kriging_error_shrinks_with_more_data() {
    use mosbd_core::problems::dtlz1;
    let bounds = Arc::new(Bounds::unit(3));
    let f = |x: &[f64]| dtlz1(x, 2).unwrap();
    let rmse = |model: &KrigingModel, test: &[DesignVector]| {
        let s: f64 = test
            .iter()
            .map(|x| {
                let m = model.predict_mean(x.values()).unwrap();
                m.iter().zip(f(x.values())).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            })
            .sum();
        (s / (2 * test.len()) as f64).sqrt()
    };
    let (mut small_err, mut large_err) = (Vec::new(), Vec::new());
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let test = lhs_sample(200, &bounds, &mut rng).unwrap();
        let small = fit(&bounds, &lhs_sample(30, &bounds, &mut rng).unwrap(), f);
        let large = fit(&bounds, &lhs_sample(300, &bounds, &mut rng).unwrap(), f);
        small_err.push(rmse(&small, &test));
        large_err.push(rmse(&large, &test));
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[2]
    };
    let (s, l) = (median(&mut small_err), median(&mut large_err));
    assert!(l < s, "median RMSE: 300 points {l}, 30 points {s}");
}
