use serde::{Deserialize, Serialize};

use super::traits::{TraitId, TraitMap};
use crate::error::{FloodError, Result};

/// Default cost scale applied to the penalty sum.
pub const DEFAULT_COST_SCALE: f64 = 3.26;

/// How a trait's remediation cost grows with its three's complement `u = 3 - gene`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyShape {
    Linear,
    Quadratic,
    Exponential,
}

impl PenaltyShape {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            PenaltyShape::Linear => u,
            PenaltyShape::Quadratic => u * u,
            PenaltyShape::Exponential => u.exp(),
        }
    }
}

pub type PenaltyShapes = TraitMap<PenaltyShape>;

/// Exponential for urbanization, poverty and structural measures; quadratic
/// for mortality; linear for the rest.
pub fn default_shapes() -> PenaltyShapes {
    TraitMap::from_fn(|t| match t {
        TraitId::Urbanized | TraitId::Poverty | TraitId::Structural => PenaltyShape::Exponential,
        TraitId::Mortality => PenaltyShape::Quadratic,
        TraitId::Literacy | TraitId::TvRadio | TraitId::NonStructural => PenaltyShape::Linear,
    })
}

/// Nonnegative per-trait weights in the vulnerability sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VulnerabilityWeights(TraitMap<f64>);

impl VulnerabilityWeights {
    pub fn new(weights: TraitMap<f64>) -> Result<Self> {
        for (t, w) in weights.iter() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(FloodError::param(
                    format!("weights.{t}"),
                    format!("weight must be finite and >= 0, got {w}"),
                ));
            }
        }
        Ok(VulnerabilityWeights(weights))
    }

    pub fn get(&self, t: TraitId) -> f64 {
        self.0[t]
    }

    pub fn as_map(&self) -> &TraitMap<f64> {
        &self.0
    }
}

impl Default for VulnerabilityWeights {
    /// One for every trait, two for poverty.
    fn default() -> Self {
        VulnerabilityWeights(TraitMap::from_fn(|t| {
            if t == TraitId::Poverty {
                2.0
            } else {
                1.0
            }
        }))
    }
}

impl<'de> Deserialize<'de> for VulnerabilityWeights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        VulnerabilityWeights::new(TraitMap::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A nonnegative quantity that is either constant or given per cell (row-major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellField {
    Uniform(f64),
    PerCell(Vec<Vec<f64>>),
}

impl Default for CellField {
    fn default() -> Self {
        CellField::Uniform(1.0)
    }
}

impl CellField {
    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |v: f64| !(v.is_finite() && v >= 0.0);
        match self {
            CellField::Uniform(v) if bad(*v) => Err(FloodError::param(
                name,
                format!("must be finite and >= 0, got {v}"),
            )),
            CellField::PerCell(rows) => {
                let n = rows.len();
                if n == 0 || rows.iter().any(|r| r.len() != n) {
                    return Err(FloodError::param(
                        name,
                        "per-cell values must form a non-empty square",
                    ));
                }
                match rows.iter().flatten().find(|v| bad(**v)) {
                    Some(v) => Err(FloodError::param(
                        name,
                        format!("must be finite and >= 0, got {v}"),
                    )),
                    None => Ok(()),
                }
            }
            CellField::Uniform(_) => Ok(()),
        }
    }

    /// Value for row-major cell `index` of an `n x n` grid.
    pub fn at(&self, n: usize, index: usize) -> Result<f64> {
        match self {
            CellField::Uniform(v) => Ok(*v),
            CellField::PerCell(rows) => {
                if rows.len() != n {
                    return Err(FloodError::DimensionMismatch(format!(
                        "per-cell field is {0} x {0} but grid is {n} x {n}",
                        rows.len()
                    )));
                }
                Ok(rows[index / n][index % n])
            }
        }
    }
}

/// Everything the objective needs besides the design and the site grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveConfig {
    weights: VulnerabilityWeights,
    shapes: PenaltyShapes,
    cost_scale: f64,
    hazard: CellField,
    exposure: CellField,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            weights: VulnerabilityWeights::default(),
            shapes: default_shapes(),
            cost_scale: DEFAULT_COST_SCALE,
            hazard: CellField::default(),
            exposure: CellField::default(),
        }
    }
}

impl ObjectiveConfig {
    pub fn new(
        weights: VulnerabilityWeights,
        shapes: PenaltyShapes,
        cost_scale: f64,
    ) -> Result<Self> {
        ObjectiveConfig::default()
            .with_weights(weights)
            .with_shapes(shapes)
            .with_cost_scale(cost_scale)
    }

    /// Default weights and shapes with no cost scaling (`lambda = 1`).
    pub fn unscaled() -> Self {
        ObjectiveConfig {
            cost_scale: 1.0,
            ..Default::default()
        }
    }

    pub fn with_weights(mut self, weights: VulnerabilityWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_shapes(mut self, shapes: PenaltyShapes) -> Self {
        self.shapes = shapes;
        self
    }

    pub fn with_cost_scale(mut self, cost_scale: f64) -> Result<Self> {
        if !(cost_scale.is_finite() && cost_scale > 0.0) {
            return Err(FloodError::param(
                "cost_scale",
                format!("must be > 0, got {cost_scale}"),
            ));
        }
        self.cost_scale = cost_scale;
        Ok(self)
    }

    pub fn with_hazard(mut self, hazard: CellField) -> Result<Self> {
        hazard.validate("hazard")?;
        self.hazard = hazard;
        Ok(self)
    }

    pub fn with_exposure(mut self, exposure: CellField) -> Result<Self> {
        exposure.validate("exposure")?;
        self.exposure = exposure;
        Ok(self)
    }

    pub fn weights(&self) -> &VulnerabilityWeights {
        &self.weights
    }

    pub fn shapes(&self) -> &PenaltyShapes {
        &self.shapes
    }

    pub fn cost_scale(&self) -> f64 {
        self.cost_scale
    }

    pub fn hazard(&self) -> &CellField {
        &self.hazard
    }

    pub fn exposure(&self) -> &CellField {
        &self.exposure
    }
}
