use plantprop::benchmark::{BenchmarkFunction, Bounds};
use plantprop::ppa::{
    displacement, fitness, mutate_position, normalize, offspring_count_for, run_ppa,
    run_ppa_observed, PpaParams,
};
use plantprop::rng::RngStream;
use proptest::prelude::*;

fn within_step_bound(step: f64, f: f64, width: f64, x: f64) -> bool {
    // Absolute slack for the rounding in (x + d*w) - x.
    step.abs() <= (1.0 - f) * width + 1e-12 * (width + x.abs())
}

proptest! {
    #[test]
    fn offspring_count_is_ceiling_in_range(z in 0.0f64..=1.0, n_max in 1usize..=10, r in 1e-12f64..1.0) {
        let f = fitness(z);
        let n = offspring_count_for(f, n_max, r);
        prop_assert!((1..=n_max).contains(&n));
        prop_assert_eq!(n, (n_max as f64 * f * r).ceil() as usize);
    }

    #[test]
    fn displacement_bounded(f in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        prop_assert!(displacement(f, r).abs() <= 1.0 - f);
    }

    #[test]
    fn mutated_position_respects_bounds(seed: u64, z in 0.0f64..=1.0, fi in 0usize..5, u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
        let func = BenchmarkFunction::ALL[fi];
        let b = func.bounds();
        let p = (b[0].0 + u * (b[0].1 - b[0].0), b[1].0 + v * (b[1].1 - b[1].0));
        let f = fitness(z);
        let q = mutate_position(p, f, &b, &mut RngStream::new(seed));
        prop_assert!(func.contains(q.0, q.1));
        prop_assert!(within_step_bound(q.0 - p.0, f, b[0].1 - b[0].0, p.0));
        prop_assert!(within_step_bound(q.1 - p.1, f, b[1].1 - b[1].0, p.1));
    }

    #[test]
    fn normalize_maps_extremes(xs in proptest::collection::vec(-1e6f64..1e6, 1..30)) {
        let z = normalize(&xs);
        prop_assert!(z.iter().all(|&v| (0.0..=1.0).contains(&v)));
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (x, v) in xs.iter().zip(&z) {
            if hi == lo {
                prop_assert_eq!(*v, 0.5);
            } else if *x == lo {
                prop_assert_eq!(*v, 1.0);
            } else if *x == hi {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }
}

#[test]
fn run_instrumentation_invariants() {
    for f in BenchmarkFunction::ALL {
        for &(pop, nmax) in &[(1, 1), (2, 5), (7, 3), (40, 10)] {
            let params = PpaParams::new(pop, nmax, 3_000).unwrap();
            let mut per_gen: Vec<usize> = Vec::new();
            let (traj, best) = run_ppa_observed(
                |x, y| f.value(x, y),
                &f.bounds(),
                params,
                13,
                |e| {
                    assert!(within_step_bound(
                        e.step[0],
                        e.parent_fitness,
                        e.width[0],
                        e.child.x
                    ));
                    assert!(within_step_bound(
                        e.step[1],
                        e.parent_fitness,
                        e.width[1],
                        e.child.y
                    ));
                    assert!((1..=nmax).contains(&e.planned_offspring));
                    if per_gen.len() <= e.generation {
                        per_gen.resize(e.generation + 1, 0);
                    }
                    per_gen[e.generation] += 1;
                },
            )
            .unwrap();
            let spawned: usize = per_gen.iter().sum();
            assert_eq!(spawned + pop, 3_000, "{f} pop {pop}");
            assert!(traj.windows(2).all(|w| w[0].1 >= w[1].1));
            assert_eq!(traj.last().unwrap().0, 3_000);
            assert_eq!(best.objective, f.value(best.x, best.y));
        }
    }
}

#[test]
fn evaluation_count_matches_budget() {
    use std::cell::Cell;
    let calls = Cell::new(0usize);
    let f = BenchmarkFunction::Branin;
    for budget in [1usize, 5, 17, 1_000, 2_501] {
        calls.set(0);
        let params = PpaParams::new(6, 4, budget).unwrap();
        run_ppa_observed(
            |x, y| {
                calls.set(calls.get() + 1);
                f.value(x, y)
            },
            &f.bounds(),
            params,
            2,
            |_| {},
        )
        .unwrap();
        assert_eq!(calls.get(), budget);
    }
}

/// Integer-valued objective so that shifting it keeps every normalized value
/// bit-identical.
fn lattice(x: f64, y: f64) -> f64 {
    ((x - 5.0) * 4.0).round().powi(2) + ((y - 5.0) * 4.0).round().powi(2)
}

#[test]
fn translation_invariance() {
    let bounds: Bounds = [(0.0, 10.0), (0.0, 10.0)];
    let params = PpaParams::new(6, 5, 2_000).unwrap();
    for shift in [1.0, 1024.0, -37.0] {
        let mut a_events = Vec::new();
        let mut b_events = Vec::new();
        let (ta, ba) = run_ppa_observed(lattice, &bounds, params, 77, |e| {
            a_events.push((e.parent_fitness, e.planned_offspring, e.child.x, e.child.y))
        })
        .unwrap();
        let (tb, bb) = run_ppa_observed(
            |x, y| lattice(x, y) + shift,
            &bounds,
            params,
            77,
            |e| b_events.push((e.parent_fitness, e.planned_offspring, e.child.x, e.child.y)),
        )
        .unwrap();
        assert_eq!(a_events, b_events);
        assert_eq!((ba.x, ba.y), (bb.x, bb.y));
        let ia: Vec<usize> = ta.iter().map(|t| t.0).collect();
        let ib: Vec<usize> = tb.iter().map(|t| t.0).collect();
        assert_eq!(ia, ib);
    }
}

#[test]
fn martin_gaddy_desk_scale() {
    let params = PpaParams::new(2, 5, 10_000).unwrap();
    let mut bests: Vec<f64> = (0..10)
        .map(|s| {
            run_ppa(BenchmarkFunction::MartinGaddy, params, s)
                .unwrap()
                .final_best
                .objective
        })
        .collect();
    bests.sort_by(f64::total_cmp);
    let median = (bests[4] + bests[5]) / 2.0;
    assert!(median <= 1e-3, "median {median}");
}
