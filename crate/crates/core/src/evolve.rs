//! Evolving graphs that are hard for the Hamiltonian solver.
//!
//! Fitness is the solver's recursion count. Two evolvers are provided: a
//! strict hillclimber and a plant-propagation variant with a fixed population
//! of ten graphs.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::{self, max_edges, mutate_many, mutate_random, random_graph, Graph};
use crate::hamiltonian::{decide, MAX_SOLVER_VERTICES};
use crate::rng::RngStream;

pub const DEFAULT_BUDGET: usize = 500;
pub const PPA_POPULATION: usize = 10;
const PPA_ELITE: usize = 2;
const ELITE_OFFSPRING: usize = 5;
const TAIL_MUTATIONS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "hc")]
    Hillclimber,
    #[serde(rename = "ppa")]
    PlantPropagation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEvolutionConfig {
    pub algorithm: Algorithm,
    pub vertices: usize,
    pub initial_edges: usize,
    pub budget: usize,
    pub recursion_cap: u64,
    pub seed: u64,
}

impl GraphEvolutionConfig {
    /// Config with the initial edge count taken from [`graph::ks_edge_count`].
    pub fn new(
        algorithm: Algorithm,
        vertices: usize,
        budget: usize,
        recursion_cap: u64,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            algorithm,
            vertices,
            initial_edges: graph::ks_edge_count(vertices)?,
            budget,
            recursion_cap,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices < 3 {
            return Err(invalid(format!(
                "need at least 3 vertices, got {}",
                self.vertices
            )));
        }
        if self.vertices > MAX_SOLVER_VERTICES {
            return Err(invalid(format!(
                "at most {MAX_SOLVER_VERTICES} vertices supported, got {}",
                self.vertices
            )));
        }
        if self.initial_edges > max_edges(self.vertices) {
            return Err(invalid(format!(
                "{} edges do not fit on {} vertices",
                self.initial_edges, self.vertices
            )));
        }
        if self.recursion_cap == 0 {
            return Err(invalid("recursion cap must be positive"));
        }
        let min_budget = match self.algorithm {
            Algorithm::Hillclimber => 1,
            Algorithm::PlantPropagation => PPA_POPULATION,
        };
        if self.budget < min_budget {
            return Err(invalid(format!(
                "budget {} is below the minimum of {min_budget}",
                self.budget
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphRunRecord {
    pub config: GraphEvolutionConfig,
    pub best_graph: Graph,
    pub best_fitness: u64,
    /// Best fitness seen so far, after each evaluation.
    pub fitness_trajectory: Vec<u64>,
    pub evaluations_used: usize,
}

/// Recursion count of the solver on `g`; a capped run scores the cap.
pub fn evaluate_graph(g: &Graph, cap: u64) -> Result<u64> {
    Ok(decide(g, cap)?.recursions)
}

pub fn evolve(cfg: &GraphEvolutionConfig) -> Result<GraphRunRecord> {
    match cfg.algorithm {
        Algorithm::Hillclimber => hillclimb(cfg),
        Algorithm::PlantPropagation => graph_ppa(cfg),
    }
}

/// Accept-iff-strictly-fitter hillclimber. One evaluation for the initial
/// graph plus one per iteration.
pub fn hillclimb(cfg: &GraphEvolutionConfig) -> Result<GraphRunRecord> {
    if cfg.algorithm != Algorithm::Hillclimber {
        return Err(invalid("hillclimb requires the hc algorithm"));
    }
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed);
    let mut current = random_graph(cfg.vertices, cfg.initial_edges, &mut rng)?;
    let mut fitness = evaluate_graph(&current, cfg.recursion_cap)?;
    let mut trajectory = Vec::with_capacity(cfg.budget);
    trajectory.push(fitness);

    while trajectory.len() < cfg.budget {
        let child = match mutate_random(&current, &mut rng) {
            Some((child, _)) => child,
            None => current.clone(),
        };
        let f = evaluate_graph(&child, cfg.recursion_cap)?;
        if f > fitness {
            current = child;
            fitness = f;
        }
        trajectory.push(fitness);
    }

    Ok(GraphRunRecord {
        config: cfg.clone(),
        best_graph: current,
        best_fitness: fitness,
        evaluations_used: trajectory.len(),
        fitness_trajectory: trajectory,
    })
}

struct Offspring {
    parent: usize,
    graph: Graph,
    mutations: usize,
}

/// Spawns one generation in rank order: the two fittest graphs get five
/// single-mutation offspring each, every other graph one offspring carrying
/// twenty mutations.
fn spawn_generation(population: &[(Graph, u64)], rng: &mut RngStream) -> Vec<Offspring> {
    let mut out = Vec::with_capacity(PPA_ELITE * ELITE_OFFSPRING + population.len() - PPA_ELITE);
    for (rank, (parent, _)) in population.iter().enumerate() {
        if rank < PPA_ELITE {
            for _ in 0..ELITE_OFFSPRING {
                let (graph, mutations) = mutate_many(parent, 1, rng);
                out.push(Offspring {
                    parent: rank,
                    graph,
                    mutations,
                });
            }
        } else {
            let (graph, mutations) = mutate_many(parent, TAIL_MUTATIONS, rng);
            out.push(Offspring {
                parent: rank,
                graph,
                mutations,
            });
        }
    }
    out
}

/// Graph plant propagation. The population is kept in non-increasing fitness
/// order; an offspring replaces its own parent iff strictly fitter, after
/// which the population is re-sorted (stable, so ties keep prior order).
pub fn graph_ppa(cfg: &GraphEvolutionConfig) -> Result<GraphRunRecord> {
    graph_ppa_observed(cfg, |_, _| {})
}

/// As [`graph_ppa`], calling `observe(population, mutation_counts)` after
/// every generation with the re-sorted population and the number of
/// elementary mutations applied to each evaluated offspring.
pub fn graph_ppa_observed<F>(cfg: &GraphEvolutionConfig, mut observe: F) -> Result<GraphRunRecord>
where
    F: FnMut(&[(Graph, u64)], &[(usize, usize)]),
{
    if cfg.algorithm != Algorithm::PlantPropagation {
        return Err(invalid("graph_ppa requires the ppa algorithm"));
    }
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed);
    let mut population = Vec::with_capacity(PPA_POPULATION);
    let mut trajectory = Vec::with_capacity(cfg.budget);
    let mut best = 0;
    for _ in 0..PPA_POPULATION {
        let g = random_graph(cfg.vertices, cfg.initial_edges, &mut rng)?;
        let f = evaluate_graph(&g, cfg.recursion_cap)?;
        best = best.max(f);
        trajectory.push(best);
        population.push((g, f));
    }
    population.sort_by_key(|p| std::cmp::Reverse(p.1));

    while trajectory.len() < cfg.budget {
        let mut offspring = spawn_generation(&population, &mut rng);
        offspring.truncate(cfg.budget - trajectory.len());

        let fitness: Vec<u64> = offspring
            .par_iter()
            .map(|o| evaluate_graph(&o.graph, cfg.recursion_cap))
            .collect::<Result<_>>()?;

        let mut winners: Vec<Option<(usize, u64)>> = vec![None; population.len()];
        for (i, (o, &f)) in offspring.iter().zip(&fitness).enumerate() {
            best = best.max(f);
            trajectory.push(best);
            let slot = &mut winners[o.parent];
            if f > population[o.parent].1 && slot.is_none_or(|(_, bf)| f > bf) {
                *slot = Some((i, f));
            }
        }
        let counts: Vec<(usize, usize)> =
            offspring.iter().map(|o| (o.parent, o.mutations)).collect();
        let mut offspring: Vec<Option<Offspring>> = offspring.into_iter().map(Some).collect();
        for (rank, win) in winners.into_iter().enumerate() {
            if let Some((i, f)) = win {
                population[rank] = (offspring[i].take().unwrap().graph, f);
            }
        }
        population.sort_by_key(|p| std::cmp::Reverse(p.1));
        observe(&population, &counts);
    }

    let (best_graph, best_fitness) = population[0].clone();
    debug_assert_eq!(best_fitness, best);
    Ok(GraphRunRecord {
        config: cfg.clone(),
        best_graph,
        best_fitness,
        evaluations_used: trajectory.len(),
        fitness_trajectory: trajectory,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamburgerReport {
    pub avg_degree: f64,
    pub degree_histogram: BTreeMap<usize, usize>,
    /// Share of vertices whose degree exceeds the average.
    pub fraction_high: f64,
}

pub fn hamburger_report(g: &Graph) -> HamburgerReport {
    let degrees = g.degrees();
    let avg = g.average_degree();
    let mut histogram = BTreeMap::new();
    for &d in &degrees {
        *histogram.entry(d).or_insert(0) += 1;
    }
    let high = degrees.iter().filter(|&&d| d as f64 > avg).count();
    HamburgerReport {
        avg_degree: avg,
        degree_histogram: histogram,
        fraction_high: high as f64 / degrees.len() as f64,
    }
}
