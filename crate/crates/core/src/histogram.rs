//! Exact value → count multisets.
//!
//! The count type is generic so hot loops can tally into `u64` and convert to
//! arbitrary precision once at the end.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Count types a histogram can carry.
pub trait Count: Clone + Zero + PartialEq + for<'a> AddAssign<&'a Self> + fmt::Display {}

impl<C> Count for C where C: Clone + Zero + PartialEq + for<'a> AddAssign<&'a C> + fmt::Display {}

/// Multiset of signed integer values. Zero counts are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValueHistogram<C> {
    counts: BTreeMap<i64, C>,
}

impl<C: Count> ValueHistogram<C> {
    pub fn new() -> Self {
        ValueHistogram {
            counts: BTreeMap::new(),
        }
    }

    /// Adds `count` occurrences of `value`.
    pub fn add(&mut self, value: i64, count: C) {
        if count.is_zero() {
            return;
        }
        self.counts
            .entry(value)
            .and_modify(|c| *c += &count)
            .or_insert(count);
    }

    /// Adds every entry of `other`.
    pub fn merge(&mut self, other: &Self) {
        for (&v, c) in &other.counts {
            self.add(v, c.clone());
        }
    }

    /// Count for `value`, zero when absent.
    pub fn get(&self, value: i64) -> C {
        self.counts.get(&value).cloned().unwrap_or_else(C::zero)
    }

    pub fn total(&self) -> C {
        let mut t = C::zero();
        for c in self.counts.values() {
            t += c;
        }
        t
    }

    /// Number of distinct values.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Entries in descending value order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &C)> {
        self.counts.iter().rev().map(|(&v, c)| (v, c))
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        self.counts.keys().rev().copied()
    }

    pub fn max_value(&self) -> Option<i64> {
        self.counts.keys().next_back().copied()
    }

    pub fn min_value(&self) -> Option<i64> {
        self.counts.keys().next().copied()
    }

    /// Applies `f` to every value, merging collisions.
    pub fn map_values(&self, f: impl Fn(i64) -> i64) -> Self {
        let mut out = Self::new();
        for (&v, c) in &self.counts {
            out.add(f(v), c.clone());
        }
        out
    }

    /// Multiplies every count by `m`.
    pub fn scaled(&self, m: u64) -> Self
    where
        C: std::ops::Mul<u64, Output = C>,
    {
        let mut out = Self::new();
        for (&v, c) in &self.counts {
            out.add(v, c.clone() * m);
        }
        out
    }

    /// Converts to arbitrary-precision counts.
    pub fn to_exact(&self) -> ValueHistogram<BigUint>
    where
        C: Into<BigUint>,
    {
        let mut out = ValueHistogram::new();
        for (&v, c) in &self.counts {
            out.add(v, c.clone().into());
        }
        out
    }
}

impl<C: Count> FromIterator<(i64, C)> for ValueHistogram<C> {
    fn from_iter<I: IntoIterator<Item = (i64, C)>>(iter: I) -> Self {
        let mut h = Self::new();
        for (v, c) in iter {
            h.add(v, c);
        }
        h
    }
}

impl ValueHistogram<u64> {
    pub fn increment(&mut self, value: i64) {
        *self.counts.entry(value).or_insert(0) += 1;
    }

    /// Histogram of the given values, each counted once.
    pub fn of<I: IntoIterator<Item = i64>>(values: I) -> Self {
        let mut h = Self::new();
        for v in values {
            h.increment(v);
        }
        h
    }
}

impl ValueHistogram<BigUint> {
    /// Builds an exact histogram from small literal counts.
    pub fn from_u64_pairs(pairs: &[(i64, u64)]) -> Self {
        pairs.iter().map(|&(v, c)| (v, BigUint::from(c))).collect()
    }

    /// Signed sum `Σ count·value^d`.
    pub fn power_sum(&self, d: u32) -> num_bigint::BigInt {
        self.counts
            .iter()
            .map(|(&v, c)| num_bigint::BigInt::from(v).pow(d) * num_bigint::BigInt::from(c.clone()))
            .sum()
    }

    /// Count as `u64` when it fits.
    pub fn get_u64(&self, value: i64) -> Option<u64> {
        self.get(value).to_u64()
    }
}

impl<C: Count> fmt::Display for ValueHistogram<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}: {c}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct EntryRepr {
    pub value: i64,
    pub count: String,
}

#[derive(Serialize, Deserialize)]
struct HistogramRepr {
    entries: Vec<EntryRepr>,
}

impl<C: Count> ValueHistogram<C> {
    /// Entries as `{"value": v, "count": "decimal"}` in descending value order.
    pub(crate) fn entry_reprs(&self) -> Vec<EntryRepr> {
        self.iter()
            .map(|(value, c)| EntryRepr {
                value,
                count: c.to_string(),
            })
            .collect()
    }

    pub(crate) fn from_entry_reprs<E: serde::de::Error>(entries: Vec<EntryRepr>) -> Result<Self, E>
    where
        C: FromStr,
    {
        let mut h = Self::new();
        for e in entries {
            let c = e
                .count
                .parse::<C>()
                .map_err(|_| E::custom(format!("bad count {:?}", e.count)))?;
            h.add(e.value, c);
        }
        Ok(h)
    }
}

impl<C: Count> Serialize for ValueHistogram<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HistogramRepr {
            entries: self.entry_reprs(),
        }
        .serialize(s)
    }
}

impl<'de, C: Count + FromStr> Deserialize<'de> for ValueHistogram<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = HistogramRepr::deserialize(d)?;
        let mut prev: Option<i64> = None;
        for e in &repr.entries {
            if prev.is_some_and(|p| p <= e.value) {
                return Err(D::Error::custom(
                    "histogram values must be strictly decreasing",
                ));
            }
            prev = Some(e.value);
        }
        Self::from_entry_reprs(repr.entries)
    }
}

/// Serde adapter writing a histogram as a bare entry array.
pub mod as_entry_list {
    use super::*;

    pub fn serialize<S: Serializer>(h: &ValueHistogram<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        h.entry_reprs().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<ValueHistogram<BigUint>, D::Error> {
        ValueHistogram::from_entry_reprs(Vec::<EntryRepr>::deserialize(d)?)
    }
}

/// Like [`as_entry_list`] for an optional histogram (`null` when absent).
pub mod as_optional_entry_list {
    use super::*;

    pub fn serialize<S: Serializer>(
        h: &Option<ValueHistogram<BigUint>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        h.as_ref().map(|h| h.entry_reprs()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<ValueHistogram<BigUint>>, D::Error> {
        Option::<Vec<EntryRepr>>::deserialize(d)?
            .map(ValueHistogram::from_entry_reprs)
            .transpose()
    }
}
