//! Seeded GA/SA runs measured against the exact optimum.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::ga::run_ga;
use crate::model::CityDesign;
use crate::oracle::{exact_optimum, OracleResult};
use crate::report::config::RunConfig;
use crate::report::render::{render_trait_grids, RenderOptions};
use crate::report::sig6;
use crate::run::{EngineKind, RunReport};
use crate::sa::{run_sa, SaParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompareOptions {
    /// Caps SA at the GA evaluation budget and scales its steps per
    /// temperature so the whole schedule fits.
    pub equalize_budgets: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub engine: EngineKind,
    pub seed: u64,
    pub best_objective: f64,
    pub gap: f64,
    pub evaluations: u64,
    pub trace_monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EngineSummary {
    pub engine: EngineKind,
    pub runs: usize,
    pub median_gap: f64,
    pub min_gap: f64,
    pub max_gap: f64,
    pub median_evaluations: f64,
    pub best_seed: u64,
    pub best_objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub optimum: f64,
    pub runs: Vec<RunSummary>,
    pub engines: Vec<EngineSummary>,
    #[serde(skip)]
    pub oracle: OracleResult,
    /// Full reports in the same order as `runs`.
    #[serde(skip)]
    pub reports: Vec<RunReport>,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.is_empty() {
        f64::NAN
    } else if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Number of temperature levels SA runs when its range is known up front.
fn planned_levels(sa: &SaParams) -> Option<usize> {
    let ratio = match (sa.initial_temperature, sa.min_temperature) {
        (_, None) => 1e-3,
        (Some(t0), Some(tmin)) => tmin / t0,
        (None, Some(_)) => return None,
    };
    if ratio > 1.0 {
        return Some(0);
    }
    Some((ratio.ln() / sa.cooling_ratio.ln()).floor() as usize + 1)
}

/// SA parameters spending at most `budget` evaluations.
pub fn sa_with_budget(sa: &SaParams, budget: u64) -> SaParams {
    let mut out = sa.clone();
    out.max_evaluations = budget.max(1);
    if let Some(levels) = planned_levels(sa).filter(|&l| l > 0) {
        out.steps_per_temperature = Some(((budget / levels as u64) as usize).max(1));
    }
    out
}

pub fn ga_budget(config: &RunConfig) -> u64 {
    (config.ga.population_size * (config.ga.generations + 1)) as u64
}

pub fn compare_runs(
    config: &RunConfig,
    seeds: &[u64],
    options: CompareOptions,
) -> Result<Comparison> {
    let oracle = exact_optimum(&config.grid, &config.objective)?;
    let sa_base = if options.equalize_budgets {
        sa_with_budget(&config.sa, ga_budget(config))
    } else {
        config.sa.clone()
    };
    let jobs: Vec<(EngineKind, u64)> = [EngineKind::Ga, EngineKind::Sa]
        .into_iter()
        .flat_map(|e| seeds.iter().map(move |&s| (e, s)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(engine, seed)| match engine {
            EngineKind::Ga => {
                let mut p = config.ga.clone();
                p.seed = seed;
                run_ga(&config.grid, &config.objective, &p)
            }
            EngineKind::Sa => {
                let mut p = sa_base.clone();
                p.seed = seed;
                run_sa(&config.grid, &config.objective, &p)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let runs: Vec<RunSummary> = reports
        .iter()
        .map(|r| RunSummary {
            engine: r.engine,
            seed: r.seed,
            best_objective: r.best_objective,
            gap: r.gap_to(oracle.total),
            evaluations: r.evaluations,
            trace_monotone: r.trace_is_nonincreasing(),
        })
        .collect();

    let mut engines = Vec::new();
    for engine in [EngineKind::Ga, EngineKind::Sa] {
        let mine: Vec<&RunSummary> = runs.iter().filter(|r| r.engine == engine).collect();
        let Some(best) = mine
            .iter()
            .min_by(|a, b| a.best_objective.total_cmp(&b.best_objective))
        else {
            continue;
        };
        let gaps: Vec<f64> = mine.iter().map(|r| r.gap).collect();
        let evals: Vec<f64> = mine.iter().map(|r| r.evaluations as f64).collect();
        engines.push(EngineSummary {
            engine,
            runs: mine.len(),
            median_gap: median(&gaps),
            min_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
            max_gap: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            median_evaluations: median(&evals),
            best_seed: best.seed,
            best_objective: best.best_objective,
        });
    }

    Ok(Comparison {
        optimum: oracle.total,
        runs,
        engines,
        oracle,
        reports,
    })
}

impl Comparison {
    pub fn best_design(&self, engine: EngineKind) -> Option<&CityDesign> {
        let summary = self.engines.iter().find(|e| e.engine == engine)?;
        self.reports
            .iter()
            .find(|r| r.engine == engine && r.seed == summary.best_seed)
            .map(|r| &r.best_design)
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("engine,seed,best_objective,gap,evaluations\n");
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.engine.name(),
                r.seed,
                r.best_objective,
                r.gap,
                r.evaluations
            );
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "exact optimum: {}", sig6(self.optimum));
        let _ = writeln!(
            out,
            "{:<6} {:>5} {:>12} {:>12} {:>12} {:>14}",
            "engine", "runs", "median gap", "min gap", "max gap", "median evals"
        );
        for e in &self.engines {
            let _ = writeln!(
                out,
                "{:<6} {:>5} {:>11}% {:>11}% {:>11}% {:>14}",
                e.engine.name(),
                e.runs,
                sig6(100.0 * e.median_gap),
                sig6(100.0 * e.min_gap),
                sig6(100.0 * e.max_gap),
                e.median_evaluations
            );
        }
        for e in &self.engines {
            if let Some(d) = self.best_design(e.engine) {
                let _ = writeln!(
                    out,
                    "\nbest {} design (seed {}, objective {}):",
                    e.engine.name(),
                    e.best_seed,
                    sig6(e.best_objective)
                );
                out.push_str(&render_trait_grids(
                    d,
                    &RenderOptions {
                        legend: false,
                        ..Default::default()
                    },
                ));
            }
        }
        out
    }
}
