//! Domain types: genes, barangay genomes, city designs, site grids and the
//! objective configuration.

mod config;
mod design;
mod site;
mod traits;

pub use config::{
    default_shapes, CellField, ObjectiveConfig, PenaltyShape, PenaltyShapes, VulnerabilityWeights,
    DEFAULT_COST_SCALE,
};
pub use design::{
    decode_design, encode_design, random_design, random_design_with, BarangayGenome, BitString,
    CityDesign, DesignFile, BITS_PER_CELL, BITS_PER_GENE, GENOME_SPACE,
};
pub(crate) use site::check_factor;
pub use site::{
    default_site_grid, SiteClass, SiteGrid, FLOODPLAIN_FACTOR, HIGHLAND_FACTOR, SLOPE_FACTOR,
};
pub use traits::{GeneValue, TraitId, TraitMap, TRAIT_COUNT};
