//! Generational genetic algorithm over city designs.
//!
//! Each generation keeps the `elitism_count` best designs unchanged and fills
//! the rest by tournament selection, gene-level uniform crossover and per-bit
//! mutation of the binary encoding.

use std::cmp::Ordering;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FloodError, Result};
use crate::model::{
    random_design_with, BarangayGenome, CityDesign, ObjectiveConfig, SiteGrid, BITS_PER_CELL,
    TRAIT_COUNT,
};
use crate::objective::{total_objective, DesignEvaluator};
use crate::rng::seeded_rng;
use crate::run::{EngineKind, EngineParams, RunReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means one over the encoding length
    /// (1/504 on a 6 x 6 city).
    pub mutation_rate_per_bit: Option<f64>,
    pub elitism_count: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 100,
            generations: 500,
            tournament_size: 2,
            crossover_rate: 0.9,
            mutation_rate_per_bit: None,
            elitism_count: 1,
            seed: 0,
        }
    }
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(FloodError::param(
            name,
            format!("must lie in [0, 1], got {v}"),
        ))
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(FloodError::param(
                "ga.population_size",
                "must be at least 2",
            ));
        }
        if self.elitism_count >= self.population_size {
            return Err(FloodError::param(
                "ga.elitism_count",
                "must be smaller than population_size",
            ));
        }
        if self.tournament_size < 1 {
            return Err(FloodError::param(
                "ga.tournament_size",
                "must be at least 1",
            ));
        }
        check_rate("ga.crossover_rate", self.crossover_rate)?;
        if let Some(p) = self.mutation_rate_per_bit {
            check_rate("ga.mutation_rate_per_bit", p)?;
        }
        Ok(())
    }

    pub fn mutation_rate(&self, bit_len: usize) -> f64 {
        self.mutation_rate_per_bit.unwrap_or(1.0 / bit_len as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub design: CityDesign,
    pub objective: f64,
}

/// Index of the lowest objective among `draws`; the earliest draw wins ties.
pub fn tournament_winner(objectives: &[f64], draws: &[usize]) -> usize {
    winner_by(|i| objectives[i], draws)
}

fn winner_by(objective: impl Fn(usize) -> f64, draws: &[usize]) -> usize {
    let mut winner = draws[0];
    for &d in &draws[1..] {
        if objective(d) < objective(winner) {
            winner = d;
        }
    }
    winner
}

/// Draws `k` members uniformly with replacement and returns the best.
pub fn tournament_select<'a, R: Rng + ?Sized>(
    population: &'a [Individual],
    k: usize,
    rng: &mut R,
) -> Result<&'a Individual> {
    if population.is_empty() {
        return Err(FloodError::EmptyPopulation);
    }
    if k == 0 {
        return Err(FloodError::param("tournament_size", "must be at least 1"));
    }
    let draws: Vec<usize> = (0..k).map(|_| rng.gen_range(0..population.len())).collect();
    Ok(&population[winner_by(|i| population[i].objective, &draws)])
}

fn check_same_size(a: &CityDesign, b: &CityDesign) -> Result<()> {
    if a.n() != b.n() {
        return Err(FloodError::DimensionMismatch(format!(
            "parents are {0} x {0} and {1} x {1}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// Swaps gene `i` (row-major cell, then A..G) between the parents wherever
/// `swap[i]` is set.
pub fn crossover_with_mask(
    parent_a: &CityDesign,
    parent_b: &CityDesign,
    swap: &[bool],
) -> Result<(CityDesign, CityDesign)> {
    check_same_size(parent_a, parent_b)?;
    let genes = parent_a.cells().len() * TRAIT_COUNT;
    if swap.len() != genes {
        return Err(FloodError::DimensionMismatch(format!(
            "mask has {} entries, designs have {genes} genes",
            swap.len()
        )));
    }
    let (mut a, mut b) = (parent_a.clone(), parent_b.clone());
    for (cell, mask) in swap.chunks(TRAIT_COUNT).enumerate() {
        let (ga, gb) = (a.cells()[cell], b.cells()[cell]);
        let (mut ca, mut cb) = (*ga.genes(), *gb.genes());
        for (t, &s) in mask.iter().enumerate() {
            if s {
                std::mem::swap(&mut ca[t], &mut cb[t]);
            }
        }
        *a.cell_mut(cell) = BarangayGenome::from_genes(ca);
        *b.cell_mut(cell) = BarangayGenome::from_genes(cb);
    }
    Ok((a, b))
}

/// With probability `1 - rate` the children are copies of the parents;
/// otherwise each gene is swapped between them with probability 1/2.
pub fn crossover_uniform<R: Rng + ?Sized>(
    parent_a: &CityDesign,
    parent_b: &CityDesign,
    rate: f64,
    rng: &mut R,
) -> Result<(CityDesign, CityDesign)> {
    check_same_size(parent_a, parent_b)?;
    if rng.gen::<f64>() >= rate {
        return Ok((parent_a.clone(), parent_b.clone()));
    }
    let mask: Vec<bool> = (0..parent_a.cells().len() * TRAIT_COUNT)
        .map(|_| rng.gen())
        .collect();
    crossover_with_mask(parent_a, parent_b, &mask)
}

/// Flips each bit of the design's binary encoding independently with
/// probability `p`.
pub fn mutate_bitflip<R: Rng + ?Sized>(design: &CityDesign, p: f64, rng: &mut R) -> CityDesign {
    let mut out = design.clone();
    if p <= 0.0 {
        return out;
    }
    for cell in 0..out.cells().len() {
        let genome = out.cell_mut(cell);
        for bit in 0..BITS_PER_CELL {
            if rng.gen::<f64>() < p {
                genome.flip_bit(bit);
            }
        }
    }
    out
}

fn by_objective(a: &Individual, b: &Individual) -> Ordering {
    a.objective.total_cmp(&b.objective)
}

fn evaluate(design: CityDesign, eval: &DesignEvaluator) -> Individual {
    let objective = eval.total(&design);
    Individual { design, objective }
}

/// Produces the next generation. Output size equals input size.
pub fn step_generation<R: Rng + ?Sized>(
    population: &[Individual],
    params: &GaParams,
    eval: &DesignEvaluator,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    let size = population.len();
    if size != params.population_size {
        return Err(FloodError::DimensionMismatch(format!(
            "population has {size} members, params expect {}",
            params.population_size
        )));
    }
    let mut ranked: Vec<&Individual> = population.iter().collect();
    // Stable sort: among equal objectives the earlier member ranks first.
    ranked.sort_by(|a, b| by_objective(a, b));

    let mut next: Vec<Individual> = ranked
        .iter()
        .take(params.elitism_count)
        .map(|i| (*i).clone())
        .collect();
    let p = params.mutation_rate(population[0].design.bit_len());
    while next.len() < size {
        let a = tournament_select(population, params.tournament_size, rng)?;
        let b = tournament_select(population, params.tournament_size, rng)?;
        let (c1, c2) = crossover_uniform(&a.design, &b.design, params.crossover_rate, rng)?;
        let c1 = mutate_bitflip(&c1, p, rng);
        let c2 = mutate_bitflip(&c2, p, rng);
        next.push(evaluate(c1, eval));
        if next.len() < size {
            next.push(evaluate(c2, eval));
        }
    }
    Ok(next)
}

fn best_of(population: &[Individual]) -> &Individual {
    population
        .iter()
        .min_by(|a, b| by_objective(a, b))
        .expect("population is never empty")
}

pub fn run_ga(grid: &SiteGrid, config: &ObjectiveConfig, params: &GaParams) -> Result<RunReport> {
    params.validate()?;
    let started = Instant::now();
    let eval = DesignEvaluator::new(grid, config)?;
    let mut rng = seeded_rng(params.seed);

    let mut population = (0..params.population_size)
        .map(|_| random_design_with(&mut rng, grid.n()).map(|d| evaluate(d, &eval)))
        .collect::<Result<Vec<_>>>()?;
    let mut evaluations = params.population_size as u64;
    let mut best = best_of(&population).clone();
    let mut trace = Vec::with_capacity(params.generations + 1);
    trace.push(best.objective);

    for _ in 0..params.generations {
        population = step_generation(&population, params, &eval, &mut rng)?;
        evaluations += params.population_size as u64;
        let gen_best = best_of(&population);
        if gen_best.objective < best.objective {
            best = gen_best.clone();
        }
        trace.push(best.objective);
    }

    let best_objective = total_objective(&best.design, grid, config)?;
    Ok(RunReport {
        engine: EngineKind::Ga,
        params: EngineParams::Ga(params.clone()),
        seed: params.seed,
        best_design: best.design,
        best_objective,
        trace,
        evaluations,
        levels: Vec::new(),
        wall_time: started.elapsed(),
    })
}
