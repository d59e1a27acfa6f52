//! Exact global optimum by exhaustive enumeration.
//!
//! The total objective is a sum of independent cell terms, so the global
//! minimum is obtained by minimizing each cell on its own. Cells sharing a site
//! factor share an optimum, leaving one `4^7 = 16384` enumeration per distinct
//! factor. A per-trait 1-D minimization gives the same answer whenever the cell
//! objective is additive over traits and is kept as a cross-check.

use serde::Serialize;

use crate::error::Result;
use crate::model::{
    BarangayGenome, CityDesign, GeneValue, ObjectiveConfig, SiteGrid, TraitId, GENOME_SPACE,
};
use crate::objective::{cell_objective, total_objective};

/// Relative gap below which two objective values count as tied. Ties go to the
/// lexicographically smallest gene vector.
pub const TIE_RTOL: f64 = 1e-12;

fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent - TIE_RTOL * incumbent.abs()
}

/// Argmin of the cell objective over all 16384 genomes for one site factor.
///
/// Genomes are visited in increasing code order, which is lexicographic A..G
/// order, and only strict improvements replace the incumbent.
pub fn best_genome_for_factor(
    site: f64,
    config: &ObjectiveConfig,
) -> Result<(BarangayGenome, f64)> {
    let mut best = BarangayGenome::ZERO;
    let mut best_value = cell_objective(&best, site, config)?;
    for code in 1..GENOME_SPACE {
        let g = BarangayGenome::from_code(code as u16);
        let v = cell_objective(&g, site, config)?;
        if improves(v, best_value) {
            best = g;
            best_value = v;
        }
    }
    Ok((best, best_value))
}

/// Per-trait shortcut: minimizes `S*w*x + lambda*f(3-x)/S` over `x` in `0..=3`
/// for each trait independently.
pub fn best_genome_per_trait(site: f64, config: &ObjectiveConfig) -> Result<(BarangayGenome, f64)> {
    crate::model::check_factor(site)?;
    let mut genes = [GeneValue::ZERO; 7];
    for t in TraitId::ALL {
        let term = |x: u8| {
            site * config.weights().get(t) * x as f64
                + config.cost_scale() * config.shapes()[t].eval((3 - x) as f64) / site
        };
        let mut best_x = 0u8;
        let mut best_v = term(0);
        for x in 1..=GeneValue::MAX {
            let v = term(x);
            if improves(v, best_v) {
                best_x = x;
                best_v = v;
            }
        }
        genes[t.index()] = GeneValue::new(best_x)?;
    }
    let genome = BarangayGenome::from_genes(genes);
    let value = cell_objective(&genome, site, config)?;
    Ok((genome, value))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorOptimum {
    pub factor: f64,
    pub cells: usize,
    pub genome: BarangayGenome,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    /// One entry per distinct site factor, ascending.
    pub per_factor: Vec<FactorOptimum>,
    pub design: CityDesign,
    pub total: f64,
}

impl OracleResult {
    pub fn genome_for(&self, factor: f64) -> Option<&BarangayGenome> {
        self.per_factor
            .iter()
            .find(|f| f.factor.to_bits() == factor.to_bits())
            .map(|f| &f.genome)
    }
}

pub fn exact_optimum(grid: &SiteGrid, config: &ObjectiveConfig) -> Result<OracleResult> {
    let per_factor = grid
        .distinct_factors()
        .into_iter()
        .map(|factor| {
            let (genome, objective) = best_genome_for_factor(factor, config)?;
            Ok(FactorOptimum {
                factor,
                cells: grid.multiplicity(factor),
                genome,
                objective,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let cells = grid
        .factors()
        .iter()
        .map(|f| {
            per_factor
                .iter()
                .find(|p| p.factor.to_bits() == f.to_bits())
                .map(|p| p.genome)
                .expect("every factor has an optimum")
        })
        .collect();
    let design = CityDesign::new(grid.n(), cells)?;
    let total = total_objective(&design, grid, config)?;
    Ok(OracleResult {
        per_factor,
        design,
        total,
    })
}
