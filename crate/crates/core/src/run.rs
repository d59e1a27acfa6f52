use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::ga::GaParams;
use crate::model::CityDesign;
use crate::sa::SaParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Ga,
    Sa,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Ga => "ga",
            EngineKind::Sa => "sa",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "lowercase")]
pub enum EngineParams {
    Ga(GaParams),
    Sa(SaParams),
}

/// Statistics for one annealing temperature level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub temperature: f64,
    pub proposals: u64,
    pub accepted: u64,
    pub accepted_uphill: u64,
    pub best: f64,
}

/// Outcome of one seeded engine run.
///
/// Everything except `wall_time` is a pure function of (grid, config, params),
/// and `wall_time` is never serialized with the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub engine: EngineKind,
    pub params: EngineParams,
    pub seed: u64,
    pub best_design: CityDesign,
    pub best_objective: f64,
    /// Best-so-far objective: the initial state, then one entry per
    /// generation (GA) or temperature level (SA).
    pub trace: Vec<f64>,
    pub evaluations: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelStats>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunReport {
    pub fn trace_is_nonincreasing(&self) -> bool {
        self.trace.windows(2).all(|w| w[1] <= w[0])
    }

    /// Relative gap `(best - optimum) / optimum`.
    pub fn gap_to(&self, optimum: f64) -> f64 {
        (self.best_objective - optimum) / optimum
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,best_objective\n");
        for (i, v) in self.trace.iter().enumerate() {
            let _ = writeln!(out, "{i},{v}");
        }
        out
    }
}
