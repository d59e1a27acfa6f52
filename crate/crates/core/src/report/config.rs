//! Run configuration file.
//!
//! Every field is optional; omitted fields take the defaults (6 x 6 grid with
//! the anti-diagonal floodplain, default weights and penalty shapes, cost scale
//! 3.26, unit hazard and exposure, default engine parameters). Validation
//! errors carry the dotted path of the offending field.
//!
//! ```json
//! {
//!   "grid": { "n": 6, "factors": [[0.5, ...], ...], "overrides": [{ "row": 0, "col": 0, "factor": 1.0 }] },
//!   "objective": {
//!     "weights": { "Poverty": 2.0 },
//!     "shapes": { "Mortality": "quadratic" },
//!     "cost_scale": 3.26,
//!     "hazard": 1.0,
//!     "exposure": [[1.0, ...], ...]
//!   },
//!   "ga": { "population_size": 100, "generations": 500 },
//!   "sa": { "cooling_ratio": 0.95 },
//!   "output": { "trace_csv": true, "render_grids": true }
//! }
//! ```

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FloodError, Result};
use crate::ga::GaParams;
use crate::model::{
    default_site_grid, CellField, ObjectiveConfig, PenaltyShape, SiteGrid, TraitId, TraitMap,
    VulnerabilityWeights,
};
use crate::sa::SaParams;

/// Grid side used when neither `grid.n` nor `grid.factors` is given.
pub const DEFAULT_GRID_SIDE: usize = 6;

/// Ordered `trait name -> value` entries, serialized as a JSON object.
/// Keys are kept as written so unknown names can be reported with their path.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TraitEntries<T>(pub Vec<(String, T)>);

impl<T: Serialize> Serialize for TraitEntries<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for TraitEntries<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct EntriesVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for EntriesVisitor<T> {
            type Value = TraitEntries<T>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from trait name to value")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut entries = Vec::new();
                while let Some((k, v)) = access.next_entry()? {
                    entries.push((k, v));
                }
                Ok(TraitEntries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor(std::marker::PhantomData))
    }
}

impl<T: Copy> From<&TraitMap<T>> for TraitEntries<T> {
    fn from(m: &TraitMap<T>) -> Self {
        TraitEntries(m.iter().map(|(t, v)| (t.name().to_string(), v)).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorOverride {
    pub row: usize,
    pub col: usize,
    pub factor: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<FactorOverride>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<TraitEntries<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shapes: Option<TraitEntries<PenaltyShape>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hazard: Option<CellField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exposure: Option<CellField>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    /// Write `<out>.trace.csv` next to engine reports.
    pub trace_csv: bool,
    /// Write `<out>.grids.txt` with the per-trait rendering of the best design.
    pub render_grids: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            trace_csv: true,
            render_grids: true,
        }
    }
}

/// The configuration document as written on disk.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfigFile {
    pub grid: GridSection,
    pub objective: ObjectiveSection,
    pub ga: GaParams,
    pub sa: SaParams,
    pub output: OutputOptions,
}

/// A validated configuration with every default applied.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: SiteGrid,
    pub objective: ObjectiveConfig,
    pub ga: GaParams,
    pub sa: SaParams,
    pub output: OutputOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: default_site_grid(DEFAULT_GRID_SIDE).expect("default grid side is positive"),
            objective: ObjectiveConfig::default(),
            ga: GaParams::default(),
            sa: SaParams::default(),
            output: OutputOptions::default(),
        }
    }
}

/// Prefixes the field path of a lower-level error.
fn at(path: &str, err: FloodError) -> FloodError {
    match err {
        FloodError::InvalidParameter { name, reason } => {
            let name = if name.starts_with(path) {
                name
            } else {
                format!("{path}.{name}")
            };
            FloodError::config(name, reason)
        }
        FloodError::Config { .. } => err,
        other => FloodError::config(path, other.to_string()),
    }
}

fn resolve_grid(section: &GridSection) -> Result<SiteGrid> {
    let n = match (section.n, &section.factors) {
        (Some(n), _) => n,
        (None, Some(rows)) => rows.len(),
        (None, None) => DEFAULT_GRID_SIDE,
    };
    if n == 0 {
        return Err(FloodError::config("grid.n", "grid side must be at least 1"));
    }
    let mut grid = match &section.factors {
        None => default_site_grid(n).map_err(|e| at("grid.n", e))?,
        Some(rows) => {
            if rows.len() != n {
                return Err(FloodError::config(
                    "grid.factors",
                    format!("expected {n} rows, got {}", rows.len()),
                ));
            }
            for (r, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(FloodError::config(
                        format!("grid.factors[{r}]"),
                        format!("expected {n} columns, got {}", row.len()),
                    ));
                }
                for (c, &f) in row.iter().enumerate() {
                    if !(f.is_finite() && f > 0.0) {
                        return Err(FloodError::config(
                            format!("grid.factors[{r}][{c}]"),
                            format!("site factor must be > 0, got {f}"),
                        ));
                    }
                }
            }
            SiteGrid::from_rows(rows).map_err(|e| at("grid.factors", e))?
        }
    };
    for (i, o) in section.overrides.iter().enumerate() {
        grid = grid
            .with_override(o.row, o.col, o.factor)
            .map_err(|e| FloodError::config(format!("grid.overrides[{i}]"), e.to_string()))?;
    }
    Ok(grid)
}

fn resolve_trait_entries<T: Copy>(
    path: &str,
    entries: &TraitEntries<T>,
    mut base: TraitMap<T>,
) -> Result<TraitMap<T>> {
    let mut seen = Vec::new();
    for (name, value) in &entries.0 {
        let t: TraitId = name.parse().map_err(|_| {
            FloodError::config(
                format!("{path}.{name}"),
                format!("unknown trait name `{name}`"),
            )
        })?;
        if seen.contains(&t) {
            return Err(FloodError::config(
                format!("{path}.{name}"),
                format!("trait `{t}` given twice"),
            ));
        }
        seen.push(t);
        base[t] = *value;
    }
    Ok(base)
}

fn check_cell_field(path: &str, field: &CellField, n: usize) -> Result<()> {
    field.validate(path).map_err(|e| at(path, e))?;
    if let CellField::PerCell(rows) = field {
        if rows.len() != n {
            return Err(FloodError::config(
                path,
                format!(
                    "per-cell values are {0} x {0} but the grid is {n} x {n}",
                    rows.len()
                ),
            ));
        }
    }
    Ok(())
}

fn resolve_objective(section: &ObjectiveSection, n: usize) -> Result<ObjectiveConfig> {
    let mut cfg = ObjectiveConfig::default();
    if let Some(entries) = &section.weights {
        let map = resolve_trait_entries("objective.weights", entries, *cfg.weights().as_map())?;
        for (t, w) in map.iter() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(FloodError::config(
                    format!("objective.weights.{t}"),
                    format!("weight must be finite and >= 0, got {w}"),
                ));
            }
        }
        cfg = cfg.with_weights(VulnerabilityWeights::new(map)?);
    }
    if let Some(entries) = &section.shapes {
        let map = resolve_trait_entries("objective.shapes", entries, *cfg.shapes())?;
        cfg = cfg.with_shapes(map);
    }
    if let Some(scale) = section.cost_scale {
        cfg = cfg.with_cost_scale(scale).map_err(|_| {
            FloodError::config("objective.cost_scale", format!("must be > 0, got {scale}"))
        })?;
    }
    if let Some(h) = &section.hazard {
        check_cell_field("objective.hazard", h, n)?;
        cfg = cfg.with_hazard(h.clone())?;
    }
    if let Some(e) = &section.exposure {
        check_cell_field("objective.exposure", e, n)?;
        cfg = cfg.with_exposure(e.clone())?;
    }
    Ok(cfg)
}

impl RunConfigFile {
    pub fn resolve(&self) -> Result<RunConfig> {
        let grid = resolve_grid(&self.grid)?;
        let objective = resolve_objective(&self.objective, grid.n())?;
        self.ga.validate().map_err(|e| at("ga", e))?;
        self.sa.validate().map_err(|e| at("sa", e))?;
        Ok(RunConfig {
            grid,
            objective,
            ga: self.ga.clone(),
            sa: self.sa.clone(),
            output: self.output.clone(),
        })
    }
}

impl RunConfig {
    /// Fully explicit document; parsing it yields this config again.
    pub fn to_file(&self) -> RunConfigFile {
        RunConfigFile {
            grid: GridSection {
                n: Some(self.grid.n()),
                factors: Some(self.grid.rows()),
                overrides: Vec::new(),
            },
            objective: ObjectiveSection {
                weights: Some(self.objective.weights().as_map().into()),
                shapes: Some(self.objective.shapes().into()),
                cost_scale: Some(self.objective.cost_scale()),
                hazard: Some(self.objective.hazard().clone()),
                exposure: Some(self.objective.exposure().clone()),
            },
            ga: self.ga.clone(),
            sa: self.sa.clone(),
            output: self.output.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("config serializes")
    }
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(document: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let file: RunConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." {
            "<root>".to_string()
        } else {
            path
        };
        FloodError::config(path, e.into_inner().to_string())
    })?;
    file.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_err(doc: &str) -> (String, String) {
        match parse_config(doc) {
            Err(FloodError::Config { path, message }) => (path, message),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.grid, default_site_grid(6).unwrap());
        assert_eq!(cfg.objective.cost_scale(), 3.26);
    }

    #[test]
    fn explicit_default_override_is_identity() {
        let rows = default_site_grid(6).unwrap().rows();
        let doc = serde_json::json!({ "grid": { "factors": rows } }).to_string();
        assert_eq!(
            parse_config(&doc).unwrap().grid,
            default_site_grid(6).unwrap()
        );
    }

    #[test]
    fn negative_poverty_weight_names_field() {
        let (path, msg) = config_err(r#"{"objective": {"weights": {"Poverty": -1}}}"#);
        assert_eq!(path, "objective.weights.Poverty");
        assert!(msg.contains(">= 0"), "{msg}");
    }

    #[test]
    fn unknown_trait_is_rejected() {
        let (path, msg) = config_err(r#"{"objective": {"weights": {"Wealth": 1}}}"#);
        assert_eq!(path, "objective.weights.Wealth");
        assert!(msg.contains("unknown trait"));
        let (path, _) = config_err(r#"{"objective": {"shapes": {"Nope": "linear"}}}"#);
        assert_eq!(path, "objective.shapes.Nope");
    }

    #[test]
    fn syntax_and_type_errors_carry_paths() {
        let (path, _) = config_err(r#"{"ga": {"population_size": "many"}}"#);
        assert_eq!(path, "ga.population_size");
        let (path, _) = config_err(r#"{"objective": {"shapes": {"Poverty": "cubic"}}}"#);
        assert_eq!(path, "objective.shapes.Poverty");
        let (path, _) = config_err(r#"{"grid": {"side": 3}}"#);
        assert_eq!(path, "grid.side");
        assert!(parse_config("{ not json").is_err());
    }

    #[test]
    fn range_validation() {
        assert_eq!(config_err(r#"{"grid": {"n": 0}}"#).0, "grid.n");
        assert_eq!(
            config_err(r#"{"grid": {"factors": [[1.0, 0.0], [1.0, 1.0]]}}"#).0,
            "grid.factors[0][1]"
        );
        assert_eq!(
            config_err(r#"{"grid": {"factors": [[1.0, 1.0], [1.0]]}}"#).0,
            "grid.factors[1]"
        );
        assert_eq!(
            config_err(r#"{"ga": {"crossover_rate": 1.5}}"#).0,
            "ga.crossover_rate"
        );
        assert_eq!(
            config_err(r#"{"ga": {"mutation_rate_per_bit": -0.5}}"#).0,
            "ga.mutation_rate_per_bit"
        );
        assert_eq!(
            config_err(r#"{"sa": {"cooling_ratio": 1.2}}"#).0,
            "sa.cooling_ratio"
        );
        assert_eq!(
            config_err(r#"{"objective": {"cost_scale": 0}}"#).0,
            "objective.cost_scale"
        );
        assert_eq!(
            config_err(r#"{"objective": {"hazard": -1}}"#).0,
            "objective.hazard"
        );
        assert_eq!(
            config_err(
                r#"{"grid": {"n": 3}, "objective": {"exposure": [[1.0, 1.0], [1.0, 1.0]]}}"#
            )
            .0,
            "objective.exposure"
        );
        assert_eq!(
            config_err(r#"{"grid": {"overrides": [{"row": 0, "col": 0, "factor": -2}]}}"#).0,
            "grid.overrides[0]"
        );
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let cfg = parse_config(
            r#"{"grid": {"n": 4, "overrides": [{"row": 0, "col": 0, "factor": 3.0}]},
                "objective": {"weights": {"D": 5}, "shapes": {"literacy": "quadratic"}},
                "ga": {"generations": 10}, "sa": {"seed": 4}}"#,
        )
        .unwrap();
        assert_eq!(cfg.grid.n(), 4);
        assert_eq!(cfg.grid.factor(0, 0), 3.0);
        assert_eq!(cfg.grid.factor(0, 3), 2.0);
        assert_eq!(cfg.objective.weights().get(TraitId::Poverty), 5.0);
        assert_eq!(cfg.objective.weights().get(TraitId::Urbanized), 1.0);
        assert_eq!(
            cfg.objective.shapes()[TraitId::Literacy],
            PenaltyShape::Quadratic
        );
        assert_eq!(
            cfg.objective.shapes()[TraitId::Poverty],
            PenaltyShape::Exponential
        );
        assert_eq!(cfg.ga.generations, 10);
        assert_eq!(cfg.ga.population_size, 100);
        assert_eq!(cfg.sa.seed, 4);
    }

    #[test]
    fn serialize_then_parse_is_a_fixed_point() {
        let docs = [
            "{}",
            r#"{"grid": {"n": 3}, "objective": {"cost_scale": 1.0, "hazard": [[1,2,3],[0,0,0],[1,1,1]]}}"#,
            r#"{"objective": {"weights": {"Literacy": 0.25}}, "ga": {"seed": 8, "mutation_rate_per_bit": 0.01},
                "sa": {"initial_temperature": 12.5, "move_kind": "gene_resample"}, "output": {"trace_csv": false}}"#,
        ];
        for doc in docs {
            let first = parse_config(doc).unwrap();
            let second = parse_config(&first.to_json()).unwrap();
            assert_eq!(first, second);
            assert_eq!(first.to_json(), second.to_json());
        }
    }
}
