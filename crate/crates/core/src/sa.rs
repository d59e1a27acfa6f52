//! Simulated annealing with Metropolis acceptance and geometric cooling.
//!
//! A move changes one cell: by default it flips a single uniformly chosen bit
//! of the design's binary encoding. At each temperature level the chain makes
//! `steps_per_temperature` proposals; the temperature at level `k` is
//! `T0 * alpha^k` and the run stops once it drops below `min_temperature` or
//! the evaluation cap is reached.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FloodError, Result};
use crate::model::{
    random_design_with, BarangayGenome, CityDesign, GeneValue, ObjectiveConfig, SiteGrid,
    BITS_PER_CELL, TRAIT_COUNT,
};
use crate::objective::{total_objective, DesignEvaluator};
use crate::rng::seeded_rng;
use crate::run::{EngineKind, EngineParams, LevelStats, RunReport};

/// Uphill samples used to calibrate the initial temperature.
pub const CALIBRATION_SAMPLES: usize = 200;
/// Target mean acceptance of uphill moves at the initial temperature.
pub const CALIBRATION_ACCEPTANCE: f64 = 0.8;
const CALIBRATION_MAX_ATTEMPTS: usize = 100 * CALIBRATION_SAMPLES;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Flip one bit of the encoding.
    #[default]
    BitFlip,
    /// Replace one gene with a different value drawn uniformly.
    GeneResample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaParams {
    /// `None` calibrates from the seeded start so that uphill moves are
    /// accepted with mean probability 0.8.
    pub initial_temperature: Option<f64>,
    pub cooling_ratio: f64,
    /// `None` means twice the encoding length (1008 on a 6 x 6 city).
    pub steps_per_temperature: Option<usize>,
    /// `None` means `1e-3 * initial_temperature`.
    pub min_temperature: Option<f64>,
    pub max_evaluations: u64,
    pub move_kind: MoveKind,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            initial_temperature: None,
            cooling_ratio: 0.95,
            steps_per_temperature: None,
            min_temperature: None,
            max_evaluations: 2_000_000,
            move_kind: MoveKind::BitFlip,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_ratio > 0.0 && self.cooling_ratio < 1.0) {
            return Err(FloodError::param(
                "sa.cooling_ratio",
                format!("must lie in (0, 1), got {}", self.cooling_ratio),
            ));
        }
        if let Some(t) = self.initial_temperature {
            if !(t.is_finite() && t > 0.0) {
                return Err(FloodError::param(
                    "sa.initial_temperature",
                    format!("must be > 0, got {t}"),
                ));
            }
        }
        if let Some(t) = self.min_temperature {
            if !(t.is_finite() && t > 0.0) {
                return Err(FloodError::param(
                    "sa.min_temperature",
                    format!("must be > 0, got {t}"),
                ));
            }
        }
        if self.steps_per_temperature == Some(0) {
            return Err(FloodError::param(
                "sa.steps_per_temperature",
                "must be at least 1",
            ));
        }
        if self.max_evaluations == 0 {
            return Err(FloodError::param(
                "sa.max_evaluations",
                "must be at least 1",
            ));
        }
        Ok(())
    }
}

/// Flips one uniformly chosen bit of the design's encoding.
pub fn neighbor<R: Rng + ?Sized>(design: &CityDesign, rng: &mut R) -> CityDesign {
    let mut out = design.clone();
    out.flip_bit(rng.gen_range(0..design.bit_len()));
    out
}

fn check_temperature(t: f64) -> Result<f64> {
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(FloodError::param(
            "temperature",
            format!("must be > 0, got {t}"),
        ))
    }
}

/// Metropolis probability: 1 for `delta <= 0`, otherwise `exp(-delta / T)`.
pub fn acceptance_probability(delta: f64, temperature: f64) -> Result<f64> {
    let t = check_temperature(temperature)?;
    Ok(metropolis(delta, t))
}

fn metropolis(delta: f64, t: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        (-delta / t).exp()
    }
}

/// A move is accepted iff the uniform draw `u` is below the acceptance probability.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> Result<bool> {
    Ok(u < acceptance_probability(delta, temperature)?)
}

/// A proposed single-cell change and its objective delta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proposal {
    pub cell: usize,
    pub genome: BarangayGenome,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub delta: f64,
    /// Acceptance probability at the temperature the step ran at.
    pub probability: f64,
    pub accepted: bool,
}

/// State of one annealing chain.
///
/// Proposals and decisions are separate so a caller can drive the chain with
/// its own bit choices and uniform draws.
#[derive(Clone, Debug)]
pub struct Annealer<'a> {
    eval: &'a DesignEvaluator,
    current: CityDesign,
    cell_values: Vec<f64>,
    current_objective: f64,
    best: CityDesign,
    best_objective: f64,
    temperature: f64,
}

impl<'a> Annealer<'a> {
    pub fn new(eval: &'a DesignEvaluator, start: CityDesign, temperature: f64) -> Result<Self> {
        eval.check(&start)?;
        let temperature = check_temperature(temperature)?;
        let cell_values: Vec<f64> = start
            .cells()
            .iter()
            .enumerate()
            .map(|(i, g)| eval.cell(i, g))
            .collect();
        let current_objective = eval.total(&start);
        Ok(Annealer {
            eval,
            best: start.clone(),
            current: start,
            cell_values,
            current_objective,
            best_objective: current_objective,
            temperature,
        })
    }

    pub fn current(&self) -> &CityDesign {
        &self.current
    }

    pub fn current_objective(&self) -> f64 {
        self.current_objective
    }

    pub fn best(&self) -> &CityDesign {
        &self.best
    }

    pub fn best_objective(&self) -> f64 {
        self.best_objective
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn set_temperature(&mut self, temperature: f64) -> Result<()> {
        self.temperature = check_temperature(temperature)?;
        Ok(())
    }

    fn proposal_for(&self, cell: usize, genome: BarangayGenome) -> Proposal {
        Proposal {
            cell,
            genome,
            delta: self.eval.cell(cell, &genome) - self.cell_values[cell],
        }
    }

    /// Proposal flipping bit `bit` of the current design's encoding.
    pub fn propose_flip(&self, bit: usize) -> Proposal {
        let cell = bit / BITS_PER_CELL;
        let mut genome = self.current.cells()[cell];
        genome.flip_bit(bit % BITS_PER_CELL);
        self.proposal_for(cell, genome)
    }

    pub fn propose<R: Rng + ?Sized>(&self, kind: MoveKind, rng: &mut R) -> Proposal {
        match kind {
            MoveKind::BitFlip => self.propose_flip(rng.gen_range(0..self.current.bit_len())),
            MoveKind::GeneResample => {
                let cell = rng.gen_range(0..self.current.cells().len());
                let t = rng.gen_range(0..TRAIT_COUNT);
                let mut genes = *self.current.cells()[cell].genes();
                let old = genes[t].get();
                // Uniform over the three other values.
                let shift = rng.gen_range(1..=GeneValue::MAX);
                genes[t] =
                    GeneValue::new((old + shift) % (GeneValue::MAX + 1)).expect("value in range");
                self.proposal_for(cell, BarangayGenome::from_genes(genes))
            }
        }
    }

    /// Applies `proposal` iff `u < acceptance_probability(delta, T)`.
    pub fn decide(&mut self, proposal: Proposal, u: f64) -> StepOutcome {
        let probability = metropolis(proposal.delta, self.temperature);
        let accepted = u < probability;
        if accepted {
            self.apply(proposal);
        }
        StepOutcome {
            delta: proposal.delta,
            probability,
            accepted,
        }
    }

    fn apply(&mut self, proposal: Proposal) {
        *self.current.cell_mut(proposal.cell) = proposal.genome;
        self.cell_values[proposal.cell] = self.eval.cell(proposal.cell, &proposal.genome);
        // Re-summed in row-major order so the value matches `total_objective` exactly.
        let mut total = 0.0;
        for v in &self.cell_values {
            total += v;
        }
        self.current_objective = total;
        if total < self.best_objective {
            self.best_objective = total;
            self.best = self.current.clone();
        }
    }

    /// One proposal plus one uniform draw.
    pub fn step<R: Rng + ?Sized>(&mut self, kind: MoveKind, rng: &mut R) -> StepOutcome {
        let proposal = self.propose(kind, rng);
        let u: f64 = rng.gen();
        self.decide(proposal, u)
    }
}

/// Samples proposals from the chain's current state (without applying them)
/// until `CALIBRATION_SAMPLES` uphill deltas are seen, then returns
/// `T0 = -mean(delta) / ln(0.8)` and the number of proposals evaluated.
/// Falls back to `T0 = 1` when no uphill move is found.
pub fn calibrate_initial_temperature<R: Rng + ?Sized>(
    annealer: &Annealer<'_>,
    kind: MoveKind,
    rng: &mut R,
) -> (f64, u64) {
    let mut sum = 0.0;
    let mut found = 0usize;
    let mut attempts = 0usize;
    while found < CALIBRATION_SAMPLES && attempts < CALIBRATION_MAX_ATTEMPTS {
        attempts += 1;
        let delta = annealer.propose(kind, rng).delta;
        if delta > 0.0 {
            sum += delta;
            found += 1;
        }
    }
    let t0 = if found == 0 {
        1.0
    } else {
        -(sum / found as f64) / CALIBRATION_ACCEPTANCE.ln()
    };
    (t0, attempts as u64)
}

pub fn run_sa(grid: &SiteGrid, config: &ObjectiveConfig, params: &SaParams) -> Result<RunReport> {
    params.validate()?;
    let started = Instant::now();
    let eval = DesignEvaluator::new(grid, config)?;
    let mut rng = seeded_rng(params.seed);
    let start = random_design_with(&mut rng, grid.n())?;
    let steps = params.steps_per_temperature.unwrap_or(2 * start.bit_len());

    let mut chain = Annealer::new(&eval, start, 1.0)?;
    let mut evaluations = 1u64;
    let t0 = match params.initial_temperature {
        Some(t) => t,
        None => {
            let (t, used) = calibrate_initial_temperature(&chain, params.move_kind, &mut rng);
            evaluations += used;
            t
        }
    };
    let t_min = params.min_temperature.unwrap_or(1e-3 * t0);

    let mut trace = vec![chain.best_objective()];
    let mut levels = Vec::new();
    let mut level: i32 = 0;
    loop {
        let temperature = t0 * params.cooling_ratio.powi(level);
        if temperature < t_min || evaluations >= params.max_evaluations {
            break;
        }
        chain.set_temperature(temperature)?;
        let mut stats = LevelStats {
            temperature,
            proposals: 0,
            accepted: 0,
            accepted_uphill: 0,
            best: 0.0,
        };
        for _ in 0..steps {
            if evaluations >= params.max_evaluations {
                break;
            }
            let outcome = chain.step(params.move_kind, &mut rng);
            evaluations += 1;
            stats.proposals += 1;
            if outcome.accepted {
                stats.accepted += 1;
                if outcome.delta > 0.0 {
                    stats.accepted_uphill += 1;
                }
            }
        }
        stats.best = chain.best_objective();
        levels.push(stats);
        trace.push(chain.best_objective());
        level += 1;
    }

    let best_design = chain.best().clone();
    let best_objective = total_objective(&best_design, grid, config)?;
    Ok(RunReport {
        engine: EngineKind::Sa,
        params: EngineParams::Sa(params.clone()),
        seed: params.seed,
        best_design,
        best_objective,
        trace,
        evaluations,
        levels,
        wall_time: started.elapsed(),
    })
}
