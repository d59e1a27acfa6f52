//! Flood vulnerability optimization on a gridded city.
//!
//! A city is an `n x n` grid of barangays. Each barangay carries seven 2-bit
//! traits (urbanization, literacy, mortality, poverty, TV/radio penetration,
//! non-structural and structural measures). The objective adds a weighted
//! vulnerability term, scaled by the cell's site factor, to a remediation
//! penalty that grows as traits are pushed toward zero. Two metaheuristics
//! minimize it:
//!
//! - [`ga::run_ga`]: generational genetic algorithm with elitism, tournament
//!   selection, uniform crossover and bit-flip mutation;
//! - [`sa::run_sa`]: simulated annealing with single-bit moves, Metropolis
//!   acceptance and geometric cooling.
//!
//! Because the objective is separable per cell, [`oracle::exact_optimum`]
//! finds the true optimum by enumeration and serves as ground truth.

pub mod error;
pub mod ga;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod run;
pub mod sa;

pub use error::{FloodError, Result};
pub use model::{
    decode_design, default_site_grid, encode_design, random_design, BarangayGenome, CityDesign,
    GeneValue, ObjectiveConfig, SiteGrid, TraitId,
};
pub use objective::{breakdown, cell_objective, penalty, risk, total_objective, vulnerability};
pub use oracle::{exact_optimum, OracleResult};
pub use run::RunReport;
