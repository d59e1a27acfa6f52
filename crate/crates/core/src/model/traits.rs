use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FloodError, Result};

/// Number of vulnerability components carried by every barangay.
pub const TRAIT_COUNT: usize = 7;

/// The seven vulnerability components, in canonical A..G order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraitId {
    Urbanized,
    Literacy,
    Mortality,
    Poverty,
    TvRadio,
    NonStructural,
    Structural,
}

impl TraitId {
    pub const ALL: [TraitId; TRAIT_COUNT] = [
        TraitId::Urbanized,
        TraitId::Literacy,
        TraitId::Mortality,
        TraitId::Poverty,
        TraitId::TvRadio,
        TraitId::NonStructural,
        TraitId::Structural,
    ];

    /// Position in the canonical ordering (A = 0).
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<TraitId> {
        Self::ALL.get(i).copied()
    }

    /// Component letter, `'A'..='G'`.
    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn name(self) -> &'static str {
        match self {
            TraitId::Urbanized => "Urbanized",
            TraitId::Literacy => "Literacy",
            TraitId::Mortality => "Mortality",
            TraitId::Poverty => "Poverty",
            TraitId::TvRadio => "TvRadio",
            TraitId::NonStructural => "NonStructural",
            TraitId::Structural => "Structural",
        }
    }

    /// Human description of the component, used in rendered headings.
    pub fn title(self) -> &'static str {
        match self {
            TraitId::Urbanized => "Urbanized area ratio",
            TraitId::Literacy => "Literacy rate",
            TraitId::Mortality => "Mortality rate",
            TraitId::Poverty => "Poverty incidence",
            TraitId::TvRadio => "TV / radio penetration",
            TraitId::NonStructural => "State of non-structural measures",
            TraitId::Structural => "State of structural measures",
        }
    }

    /// Meaning of each code, indexed by gene value (0 = "00" .. 3 = "11").
    pub fn legend(self) -> [&'static str; 4] {
        match self {
            TraitId::Urbanized => [
                "Not urbanized",
                "A little urbanized",
                "Moderately urbanized",
                "Highly urbanized",
            ],
            TraitId::Literacy => [
                "0-25% are illiterate",
                "25-50% are illiterate",
                "50-75% are illiterate",
                "more than 75% are illiterate",
            ],
            TraitId::Mortality => [
                "Low mortality rate",
                "Below average mortality rate",
                "Average mortality rate",
                "High mortality rate",
            ],
            TraitId::Poverty => [
                "0-25% in class D",
                "25-50% in class D",
                "50-75% in class D",
                "more than 75% in class D",
            ],
            TraitId::TvRadio => [
                "75-100% penetration rate",
                "50-75% penetration rate",
                "25-50% penetration rate",
                "less than 25% penetration rate",
            ],
            TraitId::NonStructural => [
                "existing with good implementation/compliance",
                "existing with average implementation/compliance",
                "existing with poor implementation/compliance",
                "no non-structural measure",
            ],
            TraitId::Structural => [
                "existing structural measure in good condition",
                "existing structural measure in average condition",
                "existing structural measure in poor condition",
                "no structural measure",
            ],
        }
    }
}

impl fmt::Display for TraitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TraitId {
    type Err = FloodError;

    /// Accepts the canonical name (case-insensitive) or the component letter.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() == 1 {
            let c = s.as_bytes()[0].to_ascii_uppercase();
            if (b'A'..=b'G').contains(&c) {
                return Ok(TraitId::ALL[(c - b'A') as usize]);
            }
        }
        TraitId::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FloodError::param("trait", format!("unknown trait name `{s}`")))
    }
}

impl Serialize for TraitId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for TraitId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A 2-bit trait level, `0..=3` ("00".."11").
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(try_from = "u8", into = "u8")]
pub struct GeneValue(u8);

impl GeneValue {
    pub const MAX: u8 = 3;
    pub const ZERO: GeneValue = GeneValue(0);
    pub const THREE: GeneValue = GeneValue(3);

    pub fn new(value: u8) -> Result<Self> {
        if value > Self::MAX {
            return Err(FloodError::GeneOutOfRange(value));
        }
        Ok(GeneValue(value))
    }

    /// Masks to the low two bits; never fails.
    pub(crate) fn from_bits(bits: u8) -> Self {
        GeneValue(bits & 0b11)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Three's complement, `3 - value`.
    pub fn complement(self) -> u8 {
        Self::MAX - self.0
    }

    /// Zero-padded 2-bit binary code.
    pub fn code(self) -> &'static str {
        ["00", "01", "10", "11"][self.0 as usize]
    }
}

impl TryFrom<u8> for GeneValue {
    type Error = FloodError;

    fn try_from(value: u8) -> Result<Self> {
        GeneValue::new(value)
    }
}

impl From<GeneValue> for u8 {
    fn from(g: GeneValue) -> u8 {
        g.0
    }
}

impl fmt::Display for GeneValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// One value per trait, indexed by [`TraitId`].
///
/// Serialized as a map keyed by canonical trait names in A..G order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraitMap<T>([T; TRAIT_COUNT]);

impl<T: Copy> TraitMap<T> {
    pub fn from_array(values: [T; TRAIT_COUNT]) -> Self {
        TraitMap(values)
    }

    pub fn from_fn(mut f: impl FnMut(TraitId) -> T) -> Self {
        TraitMap(TraitId::ALL.map(&mut f))
    }

    pub fn as_array(&self) -> &[T; TRAIT_COUNT] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (TraitId, T)> + '_ {
        TraitId::ALL.into_iter().zip(self.0.iter().copied())
    }
}

impl<T> Index<TraitId> for TraitMap<T> {
    type Output = T;

    fn index(&self, t: TraitId) -> &T {
        &self.0[t.index()]
    }
}

impl<T> IndexMut<TraitId> for TraitMap<T> {
    fn index_mut(&mut self, t: TraitId) -> &mut T {
        &mut self.0[t.index()]
    }
}

impl<T: Serialize> Serialize for TraitMap<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(TRAIT_COUNT))?;
        for (t, v) in TraitId::ALL.iter().zip(self.0.iter()) {
            map.serialize_entry(t.name(), v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de> + Copy> Deserialize<'de> for TraitMap<T> {
    /// Requires all seven traits; partial maps are handled by the config layer.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct MapVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Deserialize<'de> + Copy> Visitor<'de> for MapVisitor<T> {
            type Value = TraitMap<T>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map with one entry per trait")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut slots: [Option<T>; TRAIT_COUNT] = [None; TRAIT_COUNT];
                while let Some(key) = access.next_key::<TraitId>()? {
                    if slots[key.index()].is_some() {
                        return Err(de::Error::custom(format!("duplicate trait `{key}`")));
                    }
                    slots[key.index()] = Some(access.next_value()?);
                }
                let mut out = Vec::with_capacity(TRAIT_COUNT);
                for (t, slot) in TraitId::ALL.iter().zip(slots) {
                    out.push(
                        slot.ok_or_else(|| de::Error::custom(format!("missing trait `{t}`")))?,
                    );
                }
                let arr: [T; TRAIT_COUNT] = out.try_into().unwrap_or_else(|_| unreachable!());
                Ok(TraitMap(arr))
            }
        }

        deserializer.deserialize_map(MapVisitor(std::marker::PhantomData))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_a_to_g() {
        let letters: String = TraitId::ALL.iter().map(|t| t.letter()).collect();
        assert_eq!(letters, "ABCDEFG");
        for (i, t) in TraitId::ALL.iter().enumerate() {
            assert_eq!(t.index(), i);
            assert_eq!(TraitId::from_index(i), Some(*t));
        }
    }

    #[test]
    fn trait_names_parse() {
        assert_eq!("poverty".parse::<TraitId>().unwrap(), TraitId::Poverty);
        assert_eq!("D".parse::<TraitId>().unwrap(), TraitId::Poverty);
        assert_eq!("g".parse::<TraitId>().unwrap(), TraitId::Structural);
        assert!("Wealth".parse::<TraitId>().is_err());
        assert!("H".parse::<TraitId>().is_err());
    }

    #[test]
    fn gene_range_is_enforced() {
        for v in 0..=3 {
            assert_eq!(GeneValue::new(v).unwrap().get(), v);
        }
        assert!(matches!(
            GeneValue::new(4),
            Err(FloodError::GeneOutOfRange(4))
        ));
        assert_eq!(GeneValue::new(2).unwrap().code(), "10");
        assert_eq!(GeneValue::new(1).unwrap().complement(), 2);
        assert!(serde_json::from_str::<GeneValue>("5").is_err());
    }

    #[test]
    fn trait_map_requires_every_trait() {
        let m = TraitMap::from_fn(|t| t.index() as f64);
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.starts_with(r#"{"Urbanized":0.0,"Literacy":1.0"#));
        let back: TraitMap<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<TraitMap<f64>>(r#"{"Poverty":1.0}"#).is_err());
    }
}
