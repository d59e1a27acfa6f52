//! Vulnerability, penalty and the combined objective minimized by both engines.
//!
//! For a cell with site factor `S`, genome `x`, weights `w`, shapes `f` and
//! cost scale `lambda`:
//!
//! ```text
//! V = S * sum_t w_t * x_t
//! C = lambda * sum_t f_t(3 - x_t) / S
//! F = sum over cells of (V + C)
//! ```
//!
//! `F` is separable: each cell (and within a cell, each trait) contributes an
//! independent term.

use serde::Serialize;

use crate::error::{FloodError, Result};
use crate::model::{
    check_factor, BarangayGenome, CityDesign, ObjectiveConfig, PenaltyShapes, SiteGrid, TraitId,
    TraitMap, VulnerabilityWeights, GENOME_SPACE,
};

pub fn vulnerability(
    genome: &BarangayGenome,
    site: f64,
    weights: &VulnerabilityWeights,
) -> Result<f64> {
    let site = check_factor(site)?;
    let mut sum = 0.0;
    for t in TraitId::ALL {
        sum += weights.get(t) * genome.gene(t).get() as f64;
    }
    Ok(site * sum)
}

fn check_scale(cost_scale: f64) -> Result<f64> {
    if cost_scale.is_finite() && cost_scale > 0.0 {
        Ok(cost_scale)
    } else {
        Err(FloodError::param(
            "cost_scale",
            format!("must be > 0, got {cost_scale}"),
        ))
    }
}

pub fn penalty(
    genome: &BarangayGenome,
    site: f64,
    shapes: &PenaltyShapes,
    cost_scale: f64,
) -> Result<f64> {
    let site = check_factor(site)?;
    let cost_scale = check_scale(cost_scale)?;
    let mut sum = 0.0;
    for t in TraitId::ALL {
        sum += shapes[t].eval(genome.gene(t).complement() as f64);
    }
    Ok(cost_scale * sum / site)
}

pub fn cell_objective(genome: &BarangayGenome, site: f64, config: &ObjectiveConfig) -> Result<f64> {
    Ok(vulnerability(genome, site, config.weights())?
        + penalty(genome, site, config.shapes(), config.cost_scale())?)
}

fn check_dims(city: &CityDesign, grid: &SiteGrid) -> Result<()> {
    if city.n() != grid.n() {
        return Err(FloodError::DimensionMismatch(format!(
            "design is {0} x {0} but site grid is {1} x {1}",
            city.n(),
            grid.n()
        )));
    }
    Ok(())
}

/// Sum of cell objectives in row-major order.
pub fn total_objective(
    city: &CityDesign,
    grid: &SiteGrid,
    config: &ObjectiveConfig,
) -> Result<f64> {
    check_dims(city, grid)?;
    let mut total = 0.0;
    for (genome, &site) in city.cells().iter().zip(grid.factors()) {
        total += cell_objective(genome, site, config)?;
    }
    Ok(total)
}

/// Flood risk as the product hazard x vulnerability x exposure.
pub fn risk(hazard: f64, vulnerability: f64, exposure: f64) -> Result<f64> {
    for (name, v) in [
        ("hazard", hazard),
        ("vulnerability", vulnerability),
        ("exposure", exposure),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(FloodError::param(
                name,
                format!("must be finite and >= 0, got {v}"),
            ));
        }
    }
    Ok(hazard * vulnerability * exposure)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraitTerms {
    /// `S * w_t * x_t`
    pub vulnerability: f64,
    /// `lambda * f_t(3 - x_t) / S`
    pub penalty: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellBreakdown {
    pub row: usize,
    pub col: usize,
    pub site_factor: f64,
    pub vulnerability: f64,
    pub penalty: f64,
    pub objective: f64,
    pub risk: f64,
    pub traits: TraitMap<TraitTerms>,
}

/// Per-cell and per-trait decomposition of the objective.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObjectiveBreakdown {
    pub cells: Vec<CellBreakdown>,
    pub total_vulnerability: f64,
    pub total_penalty: f64,
    pub total_objective: f64,
    pub total_risk: f64,
}

pub fn breakdown(
    city: &CityDesign,
    grid: &SiteGrid,
    config: &ObjectiveConfig,
) -> Result<ObjectiveBreakdown> {
    check_dims(city, grid)?;
    let n = city.n();
    let mut cells = Vec::with_capacity(n * n);
    let (mut tv, mut tp, mut to, mut tr) = (0.0, 0.0, 0.0, 0.0);
    for (idx, (genome, &site)) in city.cells().iter().zip(grid.factors()).enumerate() {
        let v = vulnerability(genome, site, config.weights())?;
        let p = penalty(genome, site, config.shapes(), config.cost_scale())?;
        let r = risk(
            config.hazard().at(n, idx)?,
            v,
            config.exposure().at(n, idx)?,
        )?;
        let traits = TraitMap::from_fn(|t| {
            let x = genome.gene(t);
            TraitTerms {
                vulnerability: site * config.weights().get(t) * x.get() as f64,
                penalty: config.cost_scale() * config.shapes()[t].eval(x.complement() as f64)
                    / site,
            }
        });
        tv += v;
        tp += p;
        to += v + p;
        tr += r;
        cells.push(CellBreakdown {
            row: idx / n,
            col: idx % n,
            site_factor: site,
            vulnerability: v,
            penalty: p,
            objective: v + p,
            risk: r,
            traits,
        });
    }
    Ok(ObjectiveBreakdown {
        cells,
        total_vulnerability: tv,
        total_penalty: tp,
        total_objective: to,
        total_risk: tr,
    })
}

/// Cell objectives for every genome at every distinct site factor of a grid.
///
/// Each entry is exactly `cell_objective(genome, S, config)` and [`total`]
/// sums in the same order as [`total_objective`], so results are bit-identical.
///
/// [`total`]: DesignEvaluator::total
#[derive(Clone, Debug)]
pub struct DesignEvaluator {
    n: usize,
    cell_table: Vec<usize>,
    tables: Vec<Vec<f64>>,
}

impl DesignEvaluator {
    pub fn new(grid: &SiteGrid, config: &ObjectiveConfig) -> Result<Self> {
        let distinct = grid.distinct_factors();
        let mut tables = Vec::with_capacity(distinct.len());
        for &site in &distinct {
            let table = (0..GENOME_SPACE)
                .map(|code| cell_objective(&BarangayGenome::from_code(code as u16), site, config))
                .collect::<Result<Vec<f64>>>()?;
            tables.push(table);
        }
        let cell_table = grid
            .factors()
            .iter()
            .map(|f| {
                distinct
                    .iter()
                    .position(|d| d.to_bits() == f.to_bits())
                    .expect("factor listed in distinct set")
            })
            .collect();
        Ok(DesignEvaluator {
            n: grid.n(),
            cell_table,
            tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn check(&self, city: &CityDesign) -> Result<()> {
        if city.n() != self.n {
            return Err(FloodError::DimensionMismatch(format!(
                "design is {0} x {0} but evaluator grid is {1} x {1}",
                city.n(),
                self.n
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn cell(&self, index: usize, genome: &BarangayGenome) -> f64 {
        self.tables[self.cell_table[index]][genome.code() as usize]
    }

    /// Panics if the design does not match the grid size; call [`check`] on
    /// untrusted input.
    ///
    /// [`check`]: DesignEvaluator::check
    pub fn total(&self, city: &CityDesign) -> f64 {
        assert_eq!(city.n(), self.n, "design/grid size mismatch");
        let mut total = 0.0;
        for (idx, genome) in city.cells().iter().enumerate() {
            total += self.cell(idx, genome);
        }
        total
    }
}
