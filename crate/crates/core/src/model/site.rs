use serde::{Deserialize, Serialize};

use crate::error::{FloodError, Result};

/// Factor applied to cells on the floodplain (the anti-diagonal).
pub const FLOODPLAIN_FACTOR: f64 = 2.0;
/// Factor for cells adjacent to the floodplain.
pub const SLOPE_FACTOR: f64 = 1.0;
/// Factor for high ground, two or more steps from the floodplain.
pub const HIGHLAND_FACTOR: f64 = 0.5;

/// Geographic class of a cell, derived from its site factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteClass {
    Floodplain,
    Slope,
    Highland,
}

impl SiteClass {
    pub const ALL: [SiteClass; 3] = [SiteClass::Floodplain, SiteClass::Slope, SiteClass::Highland];

    /// `>= 2` floodplain, `[1, 2)` slope, `< 1` highland.
    pub fn of_factor(factor: f64) -> SiteClass {
        if factor >= FLOODPLAIN_FACTOR {
            SiteClass::Floodplain
        } else if factor >= SLOPE_FACTOR {
            SiteClass::Slope
        } else {
            SiteClass::Highland
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SiteClass::Floodplain => "floodplain",
            SiteClass::Slope => "slope",
            SiteClass::Highland => "highland",
        }
    }
}

/// Per-cell vulnerability multipliers `S_i`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteGrid {
    n: usize,
    factors: Vec<f64>,
}

pub(crate) fn check_factor(f: f64) -> Result<f64> {
    if f.is_finite() && f > 0.0 {
        Ok(f)
    } else {
        Err(FloodError::InvalidSiteFactor(f))
    }
}

impl SiteGrid {
    pub fn new(n: usize, factors: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(FloodError::InvalidDimension(
                "grid side must be at least 1".into(),
            ));
        }
        if factors.len() != n * n {
            return Err(FloodError::DimensionMismatch(format!(
                "expected {} site factors for n = {n}, got {}",
                n * n,
                factors.len()
            )));
        }
        for &f in &factors {
            check_factor(f)?;
        }
        Ok(SiteGrid { n, factors })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(FloodError::DimensionMismatch(
                "site factor rows must form a square".into(),
            ));
        }
        SiteGrid::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn factor(&self, row: usize, col: usize) -> f64 {
        self.factors[row * self.n + col]
    }

    pub fn class(&self, row: usize, col: usize) -> SiteClass {
        SiteClass::of_factor(self.factor(row, col))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.factors.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn with_override(mut self, row: usize, col: usize, factor: f64) -> Result<Self> {
        if row >= self.n || col >= self.n {
            return Err(FloodError::DimensionMismatch(format!(
                "cell ({row}, {col}) outside {0} x {0} grid",
                self.n
            )));
        }
        self.factors[row * self.n + col] = check_factor(factor)?;
        Ok(self)
    }

    /// Distinct factor values, ascending.
    pub fn distinct_factors(&self) -> Vec<f64> {
        let mut v = self.factors.clone();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| a.to_bits() == b.to_bits());
        v
    }

    /// Number of cells carrying exactly `factor`.
    pub fn multiplicity(&self, factor: f64) -> usize {
        self.factors
            .iter()
            .filter(|f| f.to_bits() == factor.to_bits())
            .count()
    }
}

/// Floodplain running down the anti-diagonal: distance `|r + c - (n - 1)|`
/// of 0 gives 2.0, 1 gives 1.0, anything further 0.5.
pub fn default_site_grid(n: usize) -> Result<SiteGrid> {
    if n == 0 {
        return Err(FloodError::InvalidDimension(
            "grid side must be at least 1".into(),
        ));
    }
    let mut factors = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let d = (r + c).abs_diff(n - 1);
            factors.push(match d {
                0 => FLOODPLAIN_FACTOR,
                1 => SLOPE_FACTOR,
                _ => HIGHLAND_FACTOR,
            });
        }
    }
    SiteGrid::new(n, factors)
}
