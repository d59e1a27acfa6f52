//! Per-trait grid rendering of a design, one `n x n` table of 2-bit codes per
//! trait, and the matching parser.
//!
//! ```text
//! (D) Poverty incidence [Poverty]
//! 01 10 01 00 11 10
//! ...
//! legend: 00 = 0-25% in class D; 01 = 25-50% in class D; ...
//! ```

use std::fmt::Write as _;

use crate::error::{FloodError, Result};
use crate::model::{BarangayGenome, CityDesign, GeneValue, TraitId, TRAIT_COUNT};

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    /// Traits to render, in order. Defaults to all seven.
    pub traits: Vec<TraitId>,
    pub legend: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            traits: TraitId::ALL.to_vec(),
            legend: true,
        }
    }
}

impl RenderOptions {
    pub fn single(t: TraitId) -> Self {
        RenderOptions {
            traits: vec![t],
            legend: true,
        }
    }
}

pub fn render_trait_grids(design: &CityDesign, options: &RenderOptions) -> String {
    let mut out = String::new();
    for (i, &t) in options.traits.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "({}) {} [{}]", t.letter(), t.title(), t.name());
        for row in design.rows() {
            let line: Vec<&str> = row.iter().map(|g| g.gene(t).code()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        if options.legend {
            let entries: Vec<String> = t
                .legend()
                .iter()
                .enumerate()
                .map(|(v, meaning)| {
                    format!(
                        "{} = {meaning}",
                        GeneValue::new(v as u8).expect("0..4").code()
                    )
                })
                .collect();
            let _ = writeln!(out, "legend: {}", entries.join("; "));
        }
    }
    out
}

/// Parses one binary code. Unpadded codes are accepted, so `1` reads as `01`.
pub fn parse_code(token: &str) -> Result<GeneValue> {
    if token.is_empty() || token.len() > 2 || !token.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(FloodError::MalformedEncoding(format!(
            "`{token}` is not a 2-bit binary code"
        )));
    }
    GeneValue::new(u8::from_str_radix(token, 2).expect("binary digits"))
}

fn is_grid_row(line: &str) -> bool {
    let mut tokens = line.split_whitespace().peekable();
    tokens.peek().is_some() && tokens.all(|t| parse_code(t).is_ok())
}

/// Parses a bare square grid of binary codes, one row per line. Blank lines
/// and lines that are not grid rows are ignored.
pub fn parse_trait_grid(text: &str) -> Result<Vec<Vec<GeneValue>>> {
    let rows = text
        .lines()
        .filter(|l| is_grid_row(l))
        .map(|l| {
            l.split_whitespace()
                .map(parse_code)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    check_square(&rows)?;
    Ok(rows)
}

fn check_square(rows: &[Vec<GeneValue>]) -> Result<()> {
    let n = rows.len();
    if n == 0 {
        return Err(FloodError::MalformedEncoding("grid has no rows".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(FloodError::MalformedEncoding(format!(
            "row {bad} has {} codes, expected {n}",
            rows[bad].len()
        )));
    }
    Ok(())
}

fn header_trait(line: &str) -> Option<TraitId> {
    let rest = line.strip_prefix('(')?;
    let letter = rest.get(..1)?;
    if !rest[1..].starts_with(')') {
        return None;
    }
    letter.parse().ok()
}

/// Inverse of [`render_trait_grids`] with all seven traits.
pub fn parse_trait_grids(text: &str) -> Result<CityDesign> {
    let mut grids: [Option<Vec<Vec<GeneValue>>>; TRAIT_COUNT] = Default::default();
    let mut current: Option<(TraitId, Vec<Vec<GeneValue>>)> = None;

    let finish = |block: Option<(TraitId, Vec<Vec<GeneValue>>)>,
                  grids: &mut [Option<Vec<Vec<GeneValue>>>; TRAIT_COUNT]|
     -> Result<()> {
        if let Some((t, rows)) = block {
            check_square(&rows)?;
            if grids[t.index()].replace(rows).is_some() {
                return Err(FloodError::MalformedEncoding(format!(
                    "trait {t} appears twice"
                )));
            }
        }
        Ok(())
    };

    for line in text.lines() {
        if let Some(t) = header_trait(line.trim_start()) {
            finish(current.take(), &mut grids)?;
            current = Some((t, Vec::new()));
        } else if is_grid_row(line) {
            let (_, rows) = current.as_mut().ok_or_else(|| {
                FloodError::MalformedEncoding("grid row before any trait header".into())
            })?;
            rows.push(
                line.split_whitespace()
                    .map(parse_code)
                    .collect::<Result<Vec<_>>>()?,
            );
        }
    }
    finish(current.take(), &mut grids)?;

    let mut resolved = Vec::with_capacity(TRAIT_COUNT);
    for (t, g) in TraitId::ALL.iter().zip(grids) {
        resolved.push(
            g.ok_or_else(|| FloodError::MalformedEncoding(format!("missing grid for trait {t}")))?,
        );
    }
    let n = resolved[0].len();
    if resolved.iter().any(|g| g.len() != n) {
        return Err(FloodError::MalformedEncoding(
            "trait grids differ in size".into(),
        ));
    }
    let cells = (0..n * n)
        .map(|i| BarangayGenome::from_genes(std::array::from_fn(|t| resolved[t][i / n][i % n])))
        .collect();
    CityDesign::new(n, cells)
}

/// Builds a design whose `t` genes come from `rows` and all other genes are 0.
pub fn design_from_trait_grid(t: TraitId, rows: &[Vec<GeneValue>]) -> Result<CityDesign> {
    check_square(rows)?;
    let n = rows.len();
    let cells = rows
        .iter()
        .flatten()
        .map(|&v| BarangayGenome::ZERO.with_gene(t, v))
        .collect();
    CityDesign::new(n, cells)
}
