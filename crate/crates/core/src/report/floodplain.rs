//! Trait-value counts by site class, with value-3 cells on the floodplain
//! flagged.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{FloodError, Result};
use crate::model::{CityDesign, SiteClass, SiteGrid, TraitId, TraitMap};

/// Counts of gene values 0..=3 for one trait, split by site class
/// (indexed by [`SiteClass::index`]).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValueCounts {
    pub by_class: [[usize; 4]; 3],
}

impl ValueCounts {
    pub fn class(&self, class: SiteClass) -> &[usize; 4] {
        &self.by_class[class.index()]
    }

    pub fn total(&self, value: usize) -> usize {
        self.by_class.iter().map(|c| c[value]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FloodplainFlag {
    pub row: usize,
    pub col: usize,
    #[serde(rename = "trait")]
    pub trait_id: TraitId,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloodplainReport {
    pub n: usize,
    /// Number of cells in each site class.
    pub class_cells: [usize; 3],
    pub counts: TraitMap<ValueCounts>,
    /// Cells on the floodplain holding value 3, row-major then trait order.
    pub flags: Vec<FloodplainFlag>,
}

impl FloodplainReport {
    pub fn flags_for(&self, t: TraitId) -> impl Iterator<Item = &FloodplainFlag> {
        self.flags.iter().filter(move |f| f.trait_id == t)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "site classes: floodplain {} cells, slope {} cells, highland {} cells",
            self.class_cells[0], self.class_cells[1], self.class_cells[2]
        );
        let _ = writeln!(
            out,
            "{:<15} {:<10} {:>4} {:>4} {:>4} {:>4}",
            "trait", "class", "00", "01", "10", "11"
        );
        for (t, counts) in self.counts.iter() {
            for class in SiteClass::ALL {
                let c = counts.class(class);
                let _ = writeln!(
                    out,
                    "{:<15} {:<10} {:>4} {:>4} {:>4} {:>4}",
                    t.name(),
                    class.name(),
                    c[0],
                    c[1],
                    c[2],
                    c[3]
                );
            }
        }
        if self.flags.is_empty() {
            let _ = writeln!(out, "no value-3 traits on floodplain cells");
        } else {
            let _ = writeln!(out, "value-3 traits on floodplain cells:");
            for f in &self.flags {
                let _ = writeln!(out, "  ({}, {}) {}", f.row, f.col, f.trait_id.name());
            }
        }
        out
    }
}

pub fn floodplain_report(design: &CityDesign, grid: &SiteGrid) -> Result<FloodplainReport> {
    let n = design.n();
    if grid.n() != n {
        return Err(FloodError::DimensionMismatch(format!(
            "design is {n}x{n} but site grid is {0}x{0}",
            grid.n()
        )));
    }
    let mut class_cells = [0; 3];
    let mut counts: TraitMap<ValueCounts> = TraitMap::from_fn(|_| ValueCounts::default());
    let mut flags = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let class = grid.class(r, c);
            class_cells[class.index()] += 1;
            let genome = design.cell(r, c);
            for t in TraitId::ALL {
                let v = genome.gene(t).get() as usize;
                counts[t].by_class[class.index()][v] += 1;
                if class == SiteClass::Floodplain && v == 3 {
                    flags.push(FloodplainFlag {
                        row: r,
                        col: c,
                        trait_id: t,
                    });
                }
            }
        }
    }
    Ok(FloodplainReport {
        n,
        class_cells,
        counts,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_site_grid, random_design, ObjectiveConfig};
    use crate::oracle::exact_optimum;

    #[test]
    fn counts_cover_every_cell() {
        let grid = default_site_grid(6).unwrap();
        for seed in 0..20 {
            let rep = floodplain_report(&random_design(seed, 6).unwrap(), &grid).unwrap();
            for (_, counts) in rep.counts.iter() {
                assert_eq!((0..4).map(|v| counts.total(v)).sum::<usize>(), 36);
            }
        }
    }

    #[test]
    fn zero_design_has_no_flags() {
        let grid = default_site_grid(6).unwrap();
        let rep = floodplain_report(&CityDesign::zeros(6).unwrap(), &grid).unwrap();
        assert!(rep.flags.is_empty());
        assert_eq!(rep.class_cells, [6, 10, 20]);
        assert!(rep.render().contains("no value-3 traits"));
    }

    #[test]
    fn oracle_design_counts_follow_class_sizes() {
        let grid = default_site_grid(6).unwrap();
        let opt = exact_optimum(&grid, &ObjectiveConfig::default()).unwrap();
        let rep = floodplain_report(&opt.design, &grid).unwrap();
        for t in TraitId::ALL {
            for class in SiteClass::ALL {
                let factor = match class {
                    SiteClass::Floodplain => 2.0,
                    SiteClass::Slope => 1.0,
                    SiteClass::Highland => 0.5,
                };
                let v = opt.genome_for(factor).unwrap().gene(t).get() as usize;
                let mut expected = [0; 4];
                expected[v] = rep.class_cells[class.index()];
                assert_eq!(
                    rep.counts[t].class(class),
                    &expected,
                    "{t} {}",
                    class.name()
                );
            }
        }
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let grid = default_site_grid(5).unwrap();
        assert!(floodplain_report(&CityDesign::zeros(6).unwrap(), &grid).is_err());
    }
}
