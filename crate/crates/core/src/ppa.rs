//! Plant Propagation Algorithm for bounded two-dimensional minimization.
//!
//! Each generation the population objectives are normalized to `z` in [0, 1]
//! (best = 1), mapped through `F = (tanh(4z - 2) + 1) / 2`, and every
//! individual spawns `ceil(n_max * F * r)` offspring displaced by
//! `2 (1 - F) (r - 0.5)` domain widths per dimension. Parents and offspring
//! are then truncated back to the `pop_size` best.

use serde::{Deserialize, Serialize};

use crate::benchmark::{sample_in, BenchmarkFunction, Bounds};
use crate::error::{invalid, Result};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PpaParams {
    pub pop_size: usize,
    pub n_max: usize,
    pub eval_budget: usize,
}

impl PpaParams {
    pub fn new(pop_size: usize, n_max: usize, eval_budget: usize) -> Result<Self> {
        let p = Self {
            pop_size,
            n_max,
            eval_budget,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size == 0 || self.n_max == 0 || self.eval_budget == 0 {
            return Err(invalid(format!(
                "pop_size, n_max and eval_budget must all be positive (got {}, {}, {})",
                self.pop_size, self.n_max, self.eval_budget
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousIndividual {
    pub x: f64,
    pub y: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub function: BenchmarkFunction,
    #[serde(flatten)]
    pub params: PpaParams,
    /// `(evaluations_used, best_so_far)`, one entry after initialization, one
    /// per improvement and a closing entry at the end of the run.
    pub trajectory: Vec<(usize, f64)>,
    #[serde(rename = "final")]
    pub final_best: ContinuousIndividual,
}

/// Maps objectives to `z` in [0, 1], best (lowest) to 1 and worst to 0. When
/// all objectives are equal every `z` is 0.5.
pub fn normalize(objectives: &[f64]) -> Vec<f64> {
    let lo = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = objectives.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return vec![0.5; objectives.len()];
    }
    objectives.iter().map(|&f| (hi - f) / (hi - lo)).collect()
}

pub fn fitness(z: f64) -> f64 {
    0.5 * ((4.0 * z - 2.0).tanh() + 1.0)
}

/// `ceil(n_max * F * r)` for a given `r` in (0, 1), kept within `1..=n_max`.
pub fn offspring_count_for(f: f64, n_max: usize, r: f64) -> usize {
    ((n_max as f64 * f * r).ceil() as usize).clamp(1, n_max)
}

pub fn offspring_count(f: f64, n_max: usize, rng: &mut RngStream) -> usize {
    offspring_count_for(f, n_max, rng.open01())
}

/// Relative displacement `2 (1 - F) (r - 0.5)`, in units of domain width.
pub fn displacement(f: f64, r: f64) -> f64 {
    2.0 * (1.0 - f) * (r - 0.5)
}

/// Offspring position: each coordinate moves by its own displacement times
/// the domain width and is clamped back into bounds.
pub fn mutate_position(
    parent: (f64, f64),
    f: f64,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> (f64, f64) {
    let step =
        |x: f64, (lo, hi): (f64, f64), r: f64| (x + displacement(f, r) * (hi - lo)).clamp(lo, hi);
    let rx = rng.open01();
    let ry = rng.open01();
    (step(parent.0, bounds[0], rx), step(parent.1, bounds[1], ry))
}

pub fn mutate_offspring(
    parent: &ContinuousIndividual,
    f: f64,
    function: BenchmarkFunction,
    rng: &mut RngStream,
) -> ContinuousIndividual {
    let (x, y) = mutate_position((parent.x, parent.y), f, &function.bounds(), rng);
    ContinuousIndividual {
        x,
        y,
        objective: function.value(x, y),
    }
}

/// One offspring as seen by a [`run_ppa_observed`] observer.
#[derive(Clone, Copy, Debug)]
pub struct SpawnEvent {
    pub generation: usize,
    pub parent_rank: usize,
    pub parent_fitness: f64,
    pub planned_offspring: usize,
    pub step: [f64; 2],
    pub width: [f64; 2],
    pub child: ContinuousIndividual,
}

pub fn run_ppa(function: BenchmarkFunction, params: PpaParams, seed: u64) -> Result<RunRecord> {
    let (trajectory, final_best) = run_ppa_observed(
        |x, y| function.value(x, y),
        &function.bounds(),
        params,
        seed,
        |_| {},
    )?;
    Ok(RunRecord {
        seed,
        function,
        params,
        trajectory,
        final_best,
    })
}

/// PPA on an arbitrary objective over `bounds`. Every objective call counts
/// against the budget, including the initial population; the run stops as
/// soon as the budget is spent.
pub fn run_ppa_observed<O, E>(
    objective: O,
    bounds: &Bounds,
    params: PpaParams,
    seed: u64,
    mut observe: E,
) -> Result<(Vec<(usize, f64)>, ContinuousIndividual)>
where
    O: Fn(f64, f64) -> f64,
    E: FnMut(&SpawnEvent),
{
    params.validate()?;
    let mut rng = RngStream::new(seed);
    let mut evals = 0;
    let mut population = Vec::with_capacity(params.pop_size * (params.n_max + 1));

    while population.len() < params.pop_size && evals < params.eval_budget {
        let (x, y) = sample_in(bounds, &mut rng);
        population.push(ContinuousIndividual {
            x,
            y,
            objective: objective(x, y),
        });
        evals += 1;
    }
    population.sort_by(|a, b| a.objective.total_cmp(&b.objective));
    let mut best = population[0];
    let mut trajectory = vec![(evals, best.objective)];

    let width = [bounds[0].1 - bounds[0].0, bounds[1].1 - bounds[1].0];
    let mut generation = 0;
    while evals < params.eval_budget {
        let objectives: Vec<f64> = population.iter().map(|p| p.objective).collect();
        let fit: Vec<f64> = normalize(&objectives).into_iter().map(fitness).collect();
        let parents = population.len();
        'spawn: for rank in 0..parents {
            let parent = population[rank];
            let n = offspring_count(fit[rank], params.n_max, &mut rng);
            for _ in 0..n {
                if evals == params.eval_budget {
                    break 'spawn;
                }
                let (x, y) = mutate_position((parent.x, parent.y), fit[rank], bounds, &mut rng);
                let child = ContinuousIndividual {
                    x,
                    y,
                    objective: objective(x, y),
                };
                evals += 1;
                observe(&SpawnEvent {
                    generation,
                    parent_rank: rank,
                    parent_fitness: fit[rank],
                    planned_offspring: n,
                    step: [x - parent.x, y - parent.y],
                    width,
                    child,
                });
                if child.objective < best.objective {
                    best = child;
                    trajectory.push((evals, best.objective));
                }
                population.push(child);
            }
        }
        // Stable: among equal objectives, older individuals stay ahead.
        population.sort_by(|a, b| a.objective.total_cmp(&b.objective));
        population.truncate(params.pop_size);
        generation += 1;
    }

    if trajectory.last().map(|t| t.0) != Some(evals) {
        trajectory.push((evals, best.objective));
    }
    Ok((trajectory, best))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[2.0, 4.0, 6.0]), vec![1.0, 0.5, 0.0]);
        assert_eq!(normalize(&[7.0, 7.0, 7.0]), vec![0.5; 3]);
        assert_eq!(normalize(&[0.0, 10.0]), vec![1.0, 0.0]);
        assert_eq!(normalize(&[3.0]), vec![0.5]);
    }

    #[test]
    fn fitness_values() {
        assert_eq!(fitness(0.5), 0.5);
        let top = 0.5 * (2f64.tanh() + 1.0);
        assert!((fitness(1.0) - top).abs() < 1e-12);
        assert!((fitness(1.0) - 0.982_013_790_037_908_5).abs() < 1e-12);
        assert!((fitness(0.0) - 0.017_986_209_962_091_5).abs() < 1e-12);
        assert!((0..100).all(|i| fitness(i as f64 / 100.0) < fitness((i + 1) as f64 / 100.0)));
    }

    #[test]
    fn offspring_count_examples() {
        assert_eq!(offspring_count_for(0.5, 10, 0.3), 2);
        assert_eq!(offspring_count_for(fitness(1.0), 10, 0.999), 10);
        for r in [1e-9, 0.2, 0.7, 0.999_999] {
            assert_eq!(offspring_count_for(0.7, 1, r), 1);
        }
    }

    #[test]
    fn displacement_examples() {
        assert_eq!(displacement(1.0, 0.9), 0.0);
        assert_eq!(displacement(0.0, 1.0), 1.0);
        assert_eq!(displacement(0.3, 0.5), 0.0);
        let mut rng = RngStream::new(0);
        let b = BenchmarkFunction::MartinGaddy.bounds();
        assert_eq!(mutate_position((3.0, 4.0), 1.0, &b, &mut rng), (3.0, 4.0));
    }

    #[test]
    fn single_individual_uses_midpoint_fitness() {
        let params = PpaParams::new(1, 1, 300).unwrap();
        let f = BenchmarkFunction::SixHumpCamel;
        let mut events = 0;
        run_ppa_observed(
            |x, y| f.value(x, y),
            &f.bounds(),
            params,
            8,
            |e| {
                events += 1;
                assert_eq!(e.parent_fitness, 0.5);
                assert_eq!(e.planned_offspring, 1);
            },
        )
        .unwrap();
        assert_eq!(events, 299);
    }

    #[test]
    fn budget_smaller_than_population() {
        let params = PpaParams::new(30, 4, 12).unwrap();
        let rec = run_ppa(BenchmarkFunction::Branin, params, 1).unwrap();
        assert_eq!(rec.trajectory.last().unwrap().0, 12);
        assert_eq!(rec.trajectory.len(), 1);
    }

    #[test]
    fn run_is_seeded_and_monotone() {
        let params = PpaParams::new(5, 4, 2_000).unwrap();
        let a = run_ppa(BenchmarkFunction::GoldsteinPrice, params, 3).unwrap();
        let b = run_ppa(BenchmarkFunction::GoldsteinPrice, params, 3).unwrap();
        assert_eq!(a, b);
        assert!(a
            .trajectory
            .windows(2)
            .all(|w| w[0].1 >= w[1].1 && w[0].0 < w[1].0));
        assert_eq!(
            a.trajectory.last().unwrap(),
            &(2_000, a.final_best.objective)
        );
        let f = BenchmarkFunction::GoldsteinPrice;
        assert_eq!(
            a.final_best.objective,
            f.value(a.final_best.x, a.final_best.y)
        );
        assert!(PpaParams::new(0, 1, 1).is_err());
        assert!(PpaParams::new(1, 1, 0).is_err());
    }
}
