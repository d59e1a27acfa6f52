use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::traits::{GeneValue, TraitId, TRAIT_COUNT};
use crate::error::{FloodError, Result};
use crate::rng::seeded_rng;

/// Bits used to encode one gene.
pub const BITS_PER_GENE: usize = 2;
/// Bits used to encode one barangay (seven 2-bit genes).
pub const BITS_PER_CELL: usize = TRAIT_COUNT * BITS_PER_GENE;
/// Number of distinct barangay genomes, `4^7`.
pub const GENOME_SPACE: usize = 1 << BITS_PER_CELL;

/// The seven trait levels of one barangay.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(try_from = "[u8; TRAIT_COUNT]", into = "[u8; TRAIT_COUNT]")]
pub struct BarangayGenome {
    genes: [GeneValue; TRAIT_COUNT],
}

impl BarangayGenome {
    pub const ZERO: BarangayGenome = BarangayGenome {
        genes: [GeneValue::ZERO; TRAIT_COUNT],
    };

    pub fn new(values: [u8; TRAIT_COUNT]) -> Result<Self> {
        let mut genes = [GeneValue::ZERO; TRAIT_COUNT];
        for (slot, v) in genes.iter_mut().zip(values) {
            *slot = GeneValue::new(v)?;
        }
        Ok(BarangayGenome { genes })
    }

    pub fn from_genes(genes: [GeneValue; TRAIT_COUNT]) -> Self {
        BarangayGenome { genes }
    }

    pub fn uniform(value: GeneValue) -> Self {
        BarangayGenome {
            genes: [value; TRAIT_COUNT],
        }
    }

    pub fn gene(&self, t: TraitId) -> GeneValue {
        self.genes[t.index()]
    }

    pub fn genes(&self) -> &[GeneValue; TRAIT_COUNT] {
        &self.genes
    }

    pub fn with_gene(mut self, t: TraitId, value: GeneValue) -> Self {
        self.genes[t.index()] = value;
        self
    }

    pub fn values(&self) -> [u8; TRAIT_COUNT] {
        self.genes.map(GeneValue::get)
    }

    /// 14-bit code with trait A in the most significant bits. Numeric order of
    /// codes equals lexicographic order of the A..G gene vectors.
    pub fn code(&self) -> u16 {
        self.genes
            .iter()
            .fold(0u16, |acc, g| (acc << BITS_PER_GENE) | g.get() as u16)
    }

    pub fn from_code(code: u16) -> Self {
        let mut genes = [GeneValue::ZERO; TRAIT_COUNT];
        for (i, slot) in genes.iter_mut().enumerate() {
            let shift = BITS_PER_GENE * (TRAIT_COUNT - 1 - i);
            *slot = GeneValue::from_bits((code >> shift) as u8);
        }
        BarangayGenome { genes }
    }

    /// Flips bit `bit` (0..14) of this genome's encoding, MSB-first per gene.
    pub fn flip_bit(&mut self, bit: usize) {
        debug_assert!(bit < BITS_PER_CELL);
        let gene = &mut self.genes[bit / BITS_PER_GENE];
        let mask = if bit.is_multiple_of(BITS_PER_GENE) {
            0b10
        } else {
            0b01
        };
        *gene = GeneValue::from_bits(gene.get() ^ mask);
    }
}

impl TryFrom<[u8; TRAIT_COUNT]> for BarangayGenome {
    type Error = FloodError;

    fn try_from(values: [u8; TRAIT_COUNT]) -> Result<Self> {
        BarangayGenome::new(values)
    }
}

impl From<BarangayGenome> for [u8; TRAIT_COUNT] {
    fn from(g: BarangayGenome) -> Self {
        g.values()
    }
}

/// An `n x n` city of barangays, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DesignFile", into = "DesignFile")]
pub struct CityDesign {
    n: usize,
    cells: Vec<BarangayGenome>,
}

impl CityDesign {
    pub fn new(n: usize, cells: Vec<BarangayGenome>) -> Result<Self> {
        if n == 0 {
            return Err(FloodError::InvalidDimension(
                "grid side must be at least 1".into(),
            ));
        }
        if cells.len() != n * n {
            return Err(FloodError::DimensionMismatch(format!(
                "expected {} cells for n = {n}, got {}",
                n * n,
                cells.len()
            )));
        }
        Ok(CityDesign { n, cells })
    }

    pub fn uniform(n: usize, genome: BarangayGenome) -> Result<Self> {
        CityDesign::new(n, vec![genome; n * n])
    }

    pub fn zeros(n: usize) -> Result<Self> {
        CityDesign::uniform(n, BarangayGenome::ZERO)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[BarangayGenome] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> &BarangayGenome {
        &self.cells[row * self.n + col]
    }

    pub fn cell_mut(&mut self, index: usize) -> &mut BarangayGenome {
        &mut self.cells[index]
    }

    pub fn gene(&self, row: usize, col: usize, t: TraitId) -> GeneValue {
        self.cell(row, col).gene(t)
    }

    /// Length of the binary encoding, `n * n * 7 * 2`.
    pub fn bit_len(&self) -> usize {
        self.cells.len() * BITS_PER_CELL
    }

    /// Flips one bit of the design's encoding in place.
    pub fn flip_bit(&mut self, bit: usize) {
        self.cells[bit / BITS_PER_CELL].flip_bit(bit % BITS_PER_CELL);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BarangayGenome]> {
        self.cells.chunks(self.n)
    }
}

/// On-disk layout of a design: `{ "n": 6, "cells": [[[a,b,c,d,e,f,g], ...], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub n: usize,
    pub cells: Vec<Vec<BarangayGenome>>,
}

impl TryFrom<DesignFile> for CityDesign {
    type Error = FloodError;

    fn try_from(file: DesignFile) -> Result<Self> {
        if file.cells.len() != file.n || file.cells.iter().any(|row| row.len() != file.n) {
            return Err(FloodError::DimensionMismatch(format!(
                "design declares n = {} but cells are not {0} x {0}",
                file.n
            )));
        }
        CityDesign::new(file.n, file.cells.into_iter().flatten().collect())
    }
}

impl From<CityDesign> for DesignFile {
    fn from(d: CityDesign) -> Self {
        let cells = d.cells.chunks(d.n).map(<[_]>::to_vec).collect();
        DesignFile { n: d.n, cells }
    }
}

/// A string of bits, rendered as `0`/`1` characters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Number of positions at which two equal-length strings differ.
    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(
            self.len(),
            other.len(),
            "hamming distance needs equal lengths"
        );
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = FloodError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(FloodError::MalformedEncoding(format!(
                    "unexpected character `{other}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

/// Row-major cells, A..G traits, two bits per gene most-significant first.
pub fn encode_design(city: &CityDesign) -> BitString {
    let mut bits = Vec::with_capacity(city.bit_len());
    for cell in &city.cells {
        for g in cell.genes() {
            bits.push(g.get() & 0b10 != 0);
            bits.push(g.get() & 0b01 != 0);
        }
    }
    BitString(bits)
}

pub fn decode_design(bits: &BitString, n: usize) -> Result<CityDesign> {
    if n == 0 {
        return Err(FloodError::InvalidDimension(
            "grid side must be at least 1".into(),
        ));
    }
    let expected = n * n * BITS_PER_CELL;
    if bits.len() != expected {
        return Err(FloodError::MalformedEncoding(format!(
            "expected {expected} bits for n = {n}, got {}",
            bits.len()
        )));
    }
    let cells = bits
        .0
        .chunks(BITS_PER_CELL)
        .map(|chunk| {
            let mut genes = [GeneValue::ZERO; TRAIT_COUNT];
            for (g, pair) in genes.iter_mut().zip(chunk.chunks(BITS_PER_GENE)) {
                *g = GeneValue::from_bits(((pair[0] as u8) << 1) | pair[1] as u8);
            }
            BarangayGenome::from_genes(genes)
        })
        .collect();
    CityDesign::new(n, cells)
}

/// Every gene drawn independently and uniformly from `0..=3`.
pub fn random_design_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<CityDesign> {
    if n == 0 {
        return Err(FloodError::InvalidDimension(
            "grid side must be at least 1".into(),
        ));
    }
    let cells = (0..n * n)
        .map(|_| {
            let mut genes = [GeneValue::ZERO; TRAIT_COUNT];
            for g in genes.iter_mut() {
                *g = GeneValue::from_bits(rng.gen_range(0..=GeneValue::MAX));
            }
            BarangayGenome::from_genes(genes)
        })
        .collect();
    CityDesign::new(n, cells)
}

/// Seeded variant of [`random_design_with`] using the crate's fixed generator.
pub fn random_design(seed: u64, n: usize) -> Result<CityDesign> {
    random_design_with(&mut seeded_rng(seed), n)
}
